"""Compiled inner loops: union-find labelling and heat-bath sweeps."""

import numpy as np
from numba import njit


@njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:  # path compression
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True)
def uf_labels(n, eu, ev, open_mask, skip_vertex):
    """Canonical component ids (minimum vertex index) of the open subgraph.

    Edges touching ``skip_vertex`` are ignored (pass -1 to keep all); the
    skipped vertex itself is reported as a singleton.
    """
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    for e in range(eu.shape[0]):
        if not open_mask[e]:
            continue
        u = eu[e]
        v = ev[e]
        if u == skip_vertex or v == skip_vertex:
            continue
        ru = _find(parent, u)
        rv = _find(parent, v)
        if ru == rv:
            continue
        if size[ru] < size[rv]:  # union by size
            ru, rv = rv, ru
        parent[rv] = ru
        size[ru] += size[rv]
    canon = np.full(n, -1, dtype=np.int64)
    labels = np.empty(n, dtype=np.int64)
    for x in range(n):
        r = _find(parent, x)
        if canon[r] < 0:
            canon[r] = x
        labels[x] = canon[r]
    return labels


@njit(cache=True)
def _connected_without(u, v, skip_edge, state, adj_ptr, adj_nbr, adj_eid, ghost, stack, mark, stamp):
    # DFS from u to v over open edges other than skip_edge; ghost >= 0 is a
    # super-vertex permanently joined to every boundary vertex (wired case)
    if u == v:
        return True
    top = 0
    stack[top] = u
    top += 1
    mark[u] = stamp
    while top > 0:
        top -= 1
        x = stack[top]
        for k in range(adj_ptr[x], adj_ptr[x + 1]):
            e = adj_eid[k]
            if e >= 0:
                if e == skip_edge or not state[e]:
                    continue
            elif ghost < 0:
                continue
            y = adj_nbr[k]
            if mark[y] == stamp:
                continue
            if y == v:
                return True
            mark[y] = stamp
            stack[top] = y
            top += 1
    return False


@njit(cache=True)
def heat_bath_sweeps(state, eu, ev, adj_ptr, adj_nbr, adj_eid, ghost, p, q, uniforms):
    """Run ``uniforms.shape[0]`` sweeps in place; each visits edges in index order.

    Returns the number of sweeps performed. The open probability of an edge is
    ``p`` when its endpoints are joined off the edge and ``p / (p + (1-p) q)``
    otherwise.
    """
    n_total = adj_ptr.shape[0] - 1
    stack = np.empty(n_total, dtype=np.int64)
    mark = np.zeros(n_total, dtype=np.int64)
    stamp = 0
    p_isolated = p / (p + (1.0 - p) * q)
    m = eu.shape[0]
    for s in range(uniforms.shape[0]):
        for e in range(m):
            if q == 1.0:
                prob = p
            else:
                stamp += 1
                if _connected_without(eu[e], ev[e], e, state, adj_ptr, adj_nbr, adj_eid, ghost, stack, mark, stamp):
                    prob = p
                else:
                    prob = p_isolated
            state[e] = uniforms[s, e] < prob
    return uniforms.shape[0]


@njit(cache=True)
def heat_bath_record(state, eu, ev, adj_ptr, adj_nbr, adj_eid, ghost, p, q, uniforms, spacing, out):
    """Sweeps as in ``heat_bath_sweeps``, copying the state into ``out[i]``
    after every ``spacing`` sweeps."""
    for i in range(out.shape[0]):
        heat_bath_sweeps(state, eu, ev, adj_ptr, adj_nbr, adj_eid, ghost, p, q, uniforms[i * spacing : (i + 1) * spacing])
        out[i] = state
    return out.shape[0]


@njit(cache=True)
def enumerate_cluster_counts(n, eu, ev, m_free):
    """Number of components for every open/closed pattern of the first
    ``m_free`` edges; edges past ``m_free`` are always open."""
    total = 1 << m_free
    out = np.empty(total, dtype=np.int64)
    parent = np.empty(n, dtype=np.int64)
    for mask in range(total):
        for i in range(n):
            parent[i] = i
        k = n
        for e in range(eu.shape[0]):
            if e < m_free and not (mask >> e) & 1:
                continue
            ru = _find(parent, eu[e])
            rv = _find(parent, ev[e])
            if ru != rv:
                parent[rv] = ru
                k -= 1
        out[mask] = k
    return out
