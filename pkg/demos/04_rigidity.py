# # Rigidity percolation on the triangular lattice
#
# A graph in the plane is generically rigid when its rigidity matrix has rank
# 2n - 3. The pebble game decides the same question combinatorially.

# In[1]:

import itertools

from perclab.rigidity import (
    Framework,
    estimate_theta_rig,
    is_generically_rigid_2d,
    pivot_from_grid,
    random_framework,
    rigidity_matrix_rank,
)

# In[2]:

examples = {
    "triangle": (3, [(0, 1), (1, 2), (0, 2)]),
    "4-cycle": (4, [(0, 1), (1, 2), (2, 3), (3, 0)]),
    "K4": (4, list(itertools.combinations(range(4), 2))),
    "path": (3, [(0, 1), (1, 2)]),
}
for name, (n, edges) in examples.items():
    rank = rigidity_matrix_rank(random_framework(n, edges, seed=1))
    print(f"{name:8s} rank {rank} of {2 * n - 3}  pebble game says rigid: {is_generically_rigid_2d(n, edges)}")

# Connectivity across the patch appears well before rigidity does.

# In[3]:

ps = [0.30, 0.35, 0.40, 0.50, 0.60, 0.65, 0.70, 0.75, 0.80]
rig, conn = [], []
for i, p in enumerate(ps):
    r, c = estimate_theta_rig(p, 16, 60, seed=i)
    rig.append(r)
    conn.append(c)
    print(f"p={p:.2f}  rigid {r.value:.2f}  connected {c.value:.2f}")
print("rigidity pivot", round(pivot_from_grid(ps, rig)[0], 3), " connectivity pivot", round(pivot_from_grid(ps, conn)[0], 3))
