# # Random-cluster measures on small graphs
#
# Configurations are weighted by p^open (1-p)^closed q^clusters. On graphs with
# a handful of edges the measure can be enumerated exactly, which gives a
# reference for the heat-bath sampler.

# In[1]:

import numpy as np

from perclab import Hypercubic, build_graph, from_edges
from perclab.random_cluster import RCParams, exact_rc_distribution, sample_rc_chain

# The single edge at p = 1/2, q = 2. Open has weight 1/2 * 2, closed has
# weight 1/2 * 4, so the edge is open with probability 1/3.

# In[2]:

edge = from_edges(2, [(0, 1)])
print("exact:", exact_rc_distribution(edge, 0.5, 2.0).prob([1]))
chain = sample_rc_chain(edge, RCParams(0.5, 2.0, burn_in=100, spacing=1), 100_000, seed=1)
print("sampled:", chain.mean())

# A 2 x 2 box: compare the full empirical distribution with enumeration.

# In[3]:

box = build_graph(Hypercubic(2, 2))
for b, name in ((0, "free"), (1, "wired")):
    exact = exact_rc_distribution(box, 0.6, 2.0, b)
    x = sample_rc_chain(box, RCParams(0.6, 2.0, b, burn_in=200, spacing=10), 50_000, seed=2)
    emp = np.bincount(x @ (1 << np.arange(4)), minlength=16) / len(x)
    tv = 0.5 * np.abs(emp - exact.probs).sum()
    print(f"{name:5s} boundary: edge marginal {exact.edge_marginals().mean():.4f}, total variation {tv:.4f}")

# Wired boundary conditions push every edge marginal up when q > 1.

# In[4]:

g = build_graph(Hypercubic(2, 3))
for q in (1.0, 2.0, 4.0):
    free = exact_rc_distribution(g, 0.5, q, 0).edge_marginals()
    wired = exact_rc_distribution(g, 0.5, q, 1).edge_marginals()
    print(f"q={q}: free {free.mean():.4f}  wired {wired.mean():.4f}")
