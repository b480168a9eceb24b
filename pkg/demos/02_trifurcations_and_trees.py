# # Trifurcations, spanning clusters and the binary tree
#
# Inside a box a trifurcation is an interior vertex with exactly three open
# edges whose removal leaves three separate clusters, each reaching the
# boundary. Their number can never exceed the number of boundary vertices.

# In[1]:

import numpy as np

from perclab import Hypercubic, build_graph, sample_bernoulli
from perclab.uniqueness import (
    box_trifurcations,
    expected_tree_proliferation,
    spanning_cluster_count,
    tree_cluster_proliferation,
)

# In[2]:

g = build_graph(Hypercubic(2, 20))
for p in (0.3, 0.5, 0.55, 0.7):
    counts = [box_trifurcations(g, sample_bernoulli(g, p, s)).count for s in range(200)]
    print(f"p={p}: mean N = {np.mean(counts):.2f}, max N = {max(counts)}, boundary = {len(g.boundary)}")

# Above the threshold the box is crossed by one cluster, not several.

# In[3]:

g48 = build_graph(Hypercubic(2, 48))
spans = [spanning_cluster_count(g48, sample_bernoulli(g48, 0.7, s)) for s in range(200)]
print("Z^2, p=0.7, L=48: mean spanning clusters", np.mean(spans))

# On the binary tree the count of long clusters keeps growing with depth.
# The exact mean is available in closed form and matches the simulation.

# In[4]:

for depth in (6, 8, 10, 12):
    est = tree_cluster_proliferation(depth, 0.75, 2000, seed=depth)
    exact = expected_tree_proliferation(depth, 0.75)
    print(f"depth {depth:2d}: simulated {est.value:7.2f} +- {est.stderr:.2f}   exact {exact:7.2f}")
