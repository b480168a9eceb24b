# # Linked lattice polygons
#
# Two disjoint closed curves with a nonzero linking number cannot be pulled
# apart by a sphere. The linking number is read from the signed crossings of
# a random projection and checked against the Gauss double integral.

# In[1]:

from perclab.entanglement import (
    LatticeCycle,
    count_connected_edge_sets,
    entanglement_witness,
    gauss_linking_integral,
    linking_number,
)

# In[2]:

a = LatticeCycle(((0, 0, 0), (1, 0, 0), (2, 0, 0), (2, 1, 0), (2, 2, 0), (1, 2, 0), (0, 2, 0), (0, 1, 0)))
b = LatticeCycle(((1, 1, -1), (2, 1, -1), (3, 1, -1), (3, 1, 0), (3, 1, 1), (2, 1, 1), (1, 1, 1), (1, 1, 0)))
print("projection:", linking_number(a, b), " Gauss integral:", round(gauss_linking_integral(a, b), 6))
print("far apart:", linking_number(a, b.translated((10, 0, 0))))

# In[3]:

def edges(c):
    vs = c.vertices
    return list(zip(vs, vs[1:] + vs[:1]))

print(entanglement_witness(edges(a) + edges(b)).__class__.__name__)
print(entanglement_witness(edges(a) + edges(b.translated((10, 0, 0)))))

# Connected edge-sets at the origin, counted by size.

# In[4]:

for n in range(1, 6):
    print(n, count_connected_edge_sets(n))
