import itertools
from collections import deque

import numpy as np
import pytest


def bfs_components(n, edges, config):
    """Reference component labels (smallest vertex per component) by BFS."""
    adj = [[] for _ in range(n)]
    for (u, v), w in zip(edges, config):
        if w:
            adj[u].append(v)
            adj[v].append(u)
    label = [-1] * n
    for s in range(n):
        if label[s] >= 0:
            continue
        label[s] = s
        q = deque([s])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if label[y] < 0:
                    label[y] = s
                    q.append(y)
    return np.array(label)


def all_configs(m):
    return itertools.product((False, True), repeat=m)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
