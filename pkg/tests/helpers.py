"""Small graph builders shared across the test modules."""

from __future__ import annotations

import itertools

from matchlab.graphs import Graph


def path_graph(n_vertices: int) -> Graph:
    return Graph(n_vertices, [(i, i + 1) for i in range(n_vertices - 1)])


def cycle_graph(n_vertices: int) -> Graph:
    edges = [(i, (i + 1) % n_vertices) for i in range(n_vertices)]
    return Graph(n_vertices, edges)


def complete_graph(n_vertices: int) -> Graph:
    return Graph(n_vertices, list(itertools.combinations(range(n_vertices), 2)))


def complete_bipartite(a: int, b: int) -> Graph:
    edges = [(i, a + j) for i in range(a) for j in range(b)]
    return Graph(a + b, edges, bipartition=range(a))


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i + 1) for i in range(leaves)])


def fibonacci(k: int) -> int:
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


def lucas(k: int) -> int:
    a, b = 2, 1
    for _ in range(k):
        a, b = b, a + b
    return a
