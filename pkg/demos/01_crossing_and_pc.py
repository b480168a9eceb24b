# # Crossing probabilities and the square-lattice pivot
#
# Bond percolation on an L x L box of Z^2. Every replica draws one uniform per
# edge, so the same seed gives nested configurations as p grows. The crossing
# fraction is then monotone in p replica by replica.

# In[1]:

import numpy as np

from perclab import Hypercubic, build_graph, crossing_probability, estimate_pc, has_crossing, sample_bernoulli

# In[2]:

g = build_graph(Hypercubic(2, 32))
print(g.n_vertices, "vertices,", g.n_edges, "edges,", len(g.boundary), "boundary vertices")

# A single coupled replica, watched as p sweeps upward. The crossing switches
# on once and never switches off.

# In[3]:

for p in np.arange(0.40, 0.61, 0.02):
    config = sample_bernoulli(g, p, seed=7)
    print(f"p={p:.2f}  open={config.sum():5d}  crossing={has_crossing(g, config)}")

# Averaging over 400 replicas gives the familiar S-shaped curve through 1/2.

# In[4]:

for p in (0.44, 0.48, 0.50, 0.52, 0.56):
    est = crossing_probability(Hypercubic(2, 32), p, 400, seed=1)
    print(f"p={p:.2f}  crossing fraction {est.value:.3f} +- {est.stderr:.3f}")

# Bisection on the crossing fraction locates the finite-size pivot.

# In[5]:

res = estimate_pc(Hypercubic(2, 64), replicas=600, tolerance=0.01, seed=3)
print("p_hat =", round(res.p_hat, 4), "bracket", tuple(round(x, 4) for x in res.bracket))
