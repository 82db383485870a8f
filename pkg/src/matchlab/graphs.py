"""Undirected graphs with stable edge ids, matchings, and pinnings.

Edge ids are assigned once (0..m-1 at construction or parse time) and survive
every view operation: deleting an edge or vertex never renumbers the survivors.
This keeps matchings of a graph and of its views in one shared id space, which
is what lets two distributions over matchings of G and G - e be compared under
a common Hamming metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

DEFAULT_ENUMERATION_CAP = 10_000_000


class GraphFormatError(ValueError):
    """Raised on malformed graph text; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EnumerationCapError(RuntimeError):
    """Raised when an exhaustive enumeration would exceed the configured cap."""


class Graph:
    """Immutable undirected simple graph.

    Vertices are non-negative ints and may be sparse in a view (after
    deletions the survivors keep their original labels).  Edges are stored as
    ``id -> (u, v)`` with ``u < v``.  Two optional annotations travel with the
    graph: a rotation system (cyclic order of incident edge ids around each
    vertex, fixing a planar embedding) and a bipartition (the set of left-side
    vertices).
    """

    __slots__ = ("_vertices", "_edges", "_rotation", "_bipartition",
                 "_incident", "_pair_to_id", "_fingerprint")

    def __init__(
        self,
        n: int,
        edges: Sequence[tuple[int, int]],
        *,
        rotation: Mapping[int, Sequence[int]] | None = None,
        bipartition: Iterable[int] | None = None,
    ):
        edge_map = {i: e for i, e in enumerate(edges)}
        self._init_from_parts(tuple(range(n)), edge_map, rotation, bipartition)

    @classmethod
    def from_parts(
        cls,
        vertices: Iterable[int],
        edges: Mapping[int, tuple[int, int]],
        *,
        rotation: Mapping[int, Sequence[int]] | None = None,
        bipartition: Iterable[int] | None = None,
    ) -> "Graph":
        """Build a graph from explicit (possibly sparse) vertex and edge ids."""
        g = object.__new__(cls)
        g._init_from_parts(tuple(vertices), dict(edges), rotation, bipartition)
        return g

    def _init_from_parts(self, vertices, edge_map, rotation, bipartition) -> None:
        vset = set(vertices)
        if len(vset) != len(tuple(vertices)):
            raise ValueError("duplicate vertex ids")
        if any(v < 0 for v in vset):
            raise ValueError("vertex ids must be non-negative")
        norm: dict[int, tuple[int, int]] = {}
        seen_pairs: dict[tuple[int, int], int] = {}
        for eid, (u, v) in edge_map.items():
            if eid < 0:
                raise ValueError(f"edge id {eid} is negative")
            if u == v:
                raise ValueError(f"edge {eid} is a self loop at {u}")
            if u not in vset or v not in vset:
                raise ValueError(f"edge {eid}=({u},{v}) has an endpoint outside the vertex set")
            pair = (u, v) if u < v else (v, u)
            if pair in seen_pairs:
                raise ValueError(f"edges {seen_pairs[pair]} and {eid} are parallel on {pair}")
            seen_pairs[pair] = eid
            norm[eid] = pair
        incident: dict[int, list[int]] = {v: [] for v in vset}
        for eid in sorted(norm):
            u, v = norm[eid]
            incident[u].append(eid)
            incident[v].append(eid)

        rot: dict[int, tuple[int, ...]] | None = None
        if rotation is not None:
            rot = {}
            for v in vset:
                cycle = tuple(rotation.get(v, ()))
                if sorted(cycle) != incident[v]:
                    raise ValueError(
                        f"rotation at vertex {v} is {cycle}, not a permutation of its incident edges {tuple(incident[v])}"
                    )
                rot[v] = cycle
        bip: frozenset[int] | None = None
        if bipartition is not None:
            bip = frozenset(bipartition)
            if not bip <= vset:
                raise ValueError("bipartition contains unknown vertices")
            for eid, (u, v) in norm.items():
                if (u in bip) == (v in bip):
                    raise ValueError(f"edge {eid}=({u},{v}) does not cross the bipartition")

        self._vertices = tuple(sorted(vset))
        self._edges = norm
        self._rotation = rot
        self._bipartition = bip
        self._incident = {v: tuple(eids) for v, eids in incident.items()}
        self._pair_to_id = seen_pairs
        self._fingerprint = (
            self._vertices,
            tuple(sorted((eid, u, v) for eid, (u, v) in norm.items())),
            None if rot is None else tuple(sorted(rot.items())),
            bip,
        )

    # -- basic accessors -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self._vertices)

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self._edges))

    @property
    def rotation(self) -> dict[int, tuple[int, ...]] | None:
        return None if self._rotation is None else dict(self._rotation)

    @property
    def bipartition(self) -> frozenset[int] | None:
        return self._bipartition

    def endpoints(self, eid: int) -> tuple[int, int]:
        return self._edges[eid]

    def has_edge_id(self, eid: int) -> bool:
        return eid in self._edges

    def edge_between(self, u: int, v: int) -> int | None:
        return self._pair_to_id.get((u, v) if u < v else (v, u))

    def incident(self, v: int) -> tuple[int, ...]:
        return self._incident[v]

    def degree(self, v: int) -> int:
        return len(self._incident[v])

    @property
    def max_degree(self) -> int:
        return max((len(e) for e in self._incident.values()), default=0)

    def other_end(self, eid: int, v: int) -> int:
        u, w = self._edges[eid]
        if v == u:
            return w
        if v == w:
            return u
        raise ValueError(f"vertex {v} is not an endpoint of edge {eid}")

    def adjacent_edges(self, eid: int) -> tuple[int, ...]:
        """Edge ids sharing an endpoint with ``eid`` (the edge itself excluded)."""
        u, v = self._edges[eid]
        out = [f for f in self._incident[u] if f != eid]
        out.extend(f for f in self._incident[v] if f != eid)
        return tuple(sorted(set(out)))

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(sorted(self.other_end(eid, v) for eid in self._incident[v]))

    def edge_list(self) -> list[tuple[int, int, int]]:
        """Sorted ``(edge_id, u, v)`` triples."""
        return [(eid, u, v) for eid, (u, v) in sorted(self._edges.items())]

    # -- view operations (all keep surviving ids) ------------------------

    def delete_edge(self, eid: int) -> "Graph":
        return self.delete_edges((eid,))

    def delete_edges(self, eids: Iterable[int]) -> "Graph":
        drop = set(eids)
        missing = drop - self._edges.keys()
        if missing:
            raise KeyError(f"no such edge ids: {sorted(missing)}")
        edges = {e: uv for e, uv in self._edges.items() if e not in drop}
        return self._view(self._vertices, edges)

    def delete_vertex(self, v: int) -> "Graph":
        if v not in self._incident:
            raise KeyError(f"no such vertex: {v}")
        verts = tuple(x for x in self._vertices if x != v)
        edges = {e: uv for e, uv in self._edges.items() if v not in uv}
        return self._view(verts, edges)

    def induced_subgraph(self, keep: Iterable[int]) -> "Graph":
        kset = set(keep)
        unknown = kset - set(self._vertices)
        if unknown:
            raise KeyError(f"no such vertices: {sorted(unknown)}")
        verts = tuple(v for v in self._vertices if v in kset)
        edges = {e: (u, v) for e, (u, v) in self._edges.items() if u in kset and v in kset}
        return self._view(verts, edges)

    def _view(self, vertices: tuple[int, ...], edges: dict[int, tuple[int, int]]) -> "Graph":
        rot = None
        if self._rotation is not None:
            rot = {v: tuple(e for e in self._rotation[v] if e in edges)
                   for v in vertices}
        bip = None if self._bipartition is None else (self._bipartition & set(vertices))
        return Graph.from_parts(vertices, edges, rotation=rot, bipartition=bip)

    def split_edge(self, eid: int) -> tuple["Graph", int, tuple[int, int]]:
        """Subdivide edge ``eid`` with a fresh midpoint vertex.

        Returns ``(graph, midpoint, (id_u_side, id_v_side))``.  The two new
        edges take fresh ids above every existing id; all other ids survive.
        """
        u, v = self._edges[eid]
        w = max(self._vertices) + 1
        base = max(self._edges) + 1
        e1, e2 = base, base + 1
        edges = {e: uv for e, uv in self._edges.items() if e != eid}
        edges[e1] = (u, w)
        edges[e2] = (w, v)
        rot = None
        if self._rotation is not None:
            rot = {}
            for x in self._vertices:
                cyc = self._rotation[x]
                if x == u:
                    cyc = tuple(e1 if e == eid else e for e in cyc)
                elif x == v:
                    cyc = tuple(e2 if e == eid else e for e in cyc)
                rot[x] = cyc
            rot[w] = (e1, e2)
        bip = None  # a subdivision flips one side's parity; callers re-annotate
        g = Graph.from_parts(self._vertices + (w,), edges, rotation=rot, bipartition=bip)
        return g, w, (e1, e2)

    # -- comparisons -----------------------------------------------------

    def fingerprint(self) -> tuple:
        return self._fingerprint

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self._fingerprint == other._fingerprint

    def __hash__(self) -> int:
        return hash(self._fingerprint)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def rotation_from_positions(g: Graph, pos: Mapping[int, tuple[float, float]]) -> Graph:
    """Annotate ``g`` with the rotation system of a straight-line drawing.

    Incident edges are ordered counterclockwise by angle at each vertex.  If
    the drawing is planar (no crossings), the result is a planar embedding.
    """
    rot: dict[int, tuple[int, ...]] = {}
    for v in g.vertices:
        x0, y0 = pos[v]

        def angle(eid: int) -> float:
            x1, y1 = pos[g.other_end(eid, v)]
            return math.atan2(y1 - y0, x1 - x0)

        rot[v] = tuple(sorted(g.incident(v), key=angle))
    edges = {e: g.endpoints(e) for e in g.edge_ids}
    return Graph.from_parts(g.vertices, edges, rotation=rot, bipartition=g.bipartition)


# -- matchings -----------------------------------------------------------

Matching = frozenset  # of edge ids


def is_matching(g: Graph, edge_ids: Iterable[int]) -> bool:
    seen: set[int] = set()
    for eid in edge_ids:
        if not g.has_edge_id(eid):
            return False
        u, v = g.endpoints(eid)
        if u in seen or v in seen:
            return False
        seen.add(u)
        seen.add(v)
    return True


def matched_vertices(g: Graph, matching: Iterable[int]) -> frozenset[int]:
    out: set[int] = set()
    for eid in matching:
        u, v = g.endpoints(eid)
        out.add(u)
        out.add(v)
    return frozenset(out)


@dataclass(frozen=True)
class Pinning:
    """Partial constraint on matchings.

    ``edges_present`` forces edges into the matching, ``edges_absent`` forbids
    them; ``vertices_matched`` requires the vertex to be covered by some edge,
    ``vertices_unmatched`` requires it exposed.
    """

    edges_present: frozenset[int] = field(default_factory=frozenset)
    edges_absent: frozenset[int] = field(default_factory=frozenset)
    vertices_matched: frozenset[int] = field(default_factory=frozenset)
    vertices_unmatched: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "edges_present", frozenset(self.edges_present))
        object.__setattr__(self, "edges_absent", frozenset(self.edges_absent))
        object.__setattr__(self, "vertices_matched", frozenset(self.vertices_matched))
        object.__setattr__(self, "vertices_unmatched", frozenset(self.vertices_unmatched))
        if self.edges_present & self.edges_absent:
            raise ValueError("an edge is pinned both present and absent")
        if self.vertices_matched & self.vertices_unmatched:
            raise ValueError("a vertex is pinned both matched and unmatched")

    def validate(self, g: Graph) -> None:
        for eid in self.edges_present | self.edges_absent:
            if not g.has_edge_id(eid):
                raise ValueError(f"pinned edge {eid} is not in the graph")
        for v in self.vertices_matched | self.vertices_unmatched:
            if v not in g.vertices:
                raise ValueError(f"pinned vertex {v} is not in the graph")

    def satisfied_by(self, g: Graph, matching: Iterable[int]) -> bool:
        mset = frozenset(matching)
        if not self.edges_present <= mset:
            return False
        if mset & self.edges_absent:
            return False
        covered = matched_vertices(g, mset)
        if not self.vertices_matched <= covered:
            return False
        if covered & self.vertices_unmatched:
            return False
        return True

    def is_empty(self) -> bool:
        return not (self.edges_present or self.edges_absent
                    or self.vertices_matched or self.vertices_unmatched)


def enumerate_matchings(
    g: Graph,
    pinning: Pinning | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> list[frozenset[int]]:
    """All matchings of ``g`` satisfying ``pinning``, in canonical order.

    Canonical order is lexicographic on the sorted edge-id tuple, so the empty
    matching comes first.  Raises :class:`EnumerationCapError` if more than
    ``cap`` matchings would be produced.
    """
    if pinning is None:
        pinning = Pinning()
    pinning.validate(g)

    forced = pinning.edges_present
    if not is_matching(g, forced):
        return []
    blocked = set(pinning.edges_absent)
    for eid in forced:
        blocked.update(g.adjacent_edges(eid))
    for v in pinning.vertices_unmatched:
        blocked.update(g.incident(v))
    if blocked & forced:
        return []  # a forced edge is forbidden or touches an unmatched-pinned vertex


    free = [e for e in g.edge_ids if e not in forced and e not in blocked]
    conflict = {e: set(g.adjacent_edges(e)) for e in free}

    results: list[frozenset[int]] = []

    def recurse(idx: int, current: list[int], used: set[int]) -> None:
        if len(results) > cap:
            raise EnumerationCapError(f"matching enumeration exceeded cap {cap}")
        if idx == len(free):
            results.append(frozenset(current) | forced)
            return
        e = free[idx]
        recurse(idx + 1, current, used)
        if e not in used:
            current.append(e)
            added = conflict[e] - used
            used |= added
            recurse(idx + 1, current, used)
            used -= added
            current.pop()

    recurse(0, [], set())
    if len(results) > cap:
        raise EnumerationCapError(f"matching enumeration exceeded cap {cap}")

    need = pinning.vertices_matched
    if need:
        results = [M for M in results if need <= matched_vertices(g, M)]
    results.sort(key=lambda M: tuple(sorted(M)))
    return results


def matchings_by_size(g: Graph, cap: int = DEFAULT_ENUMERATION_CAP) -> list[int]:
    """Histogram ``[#matchings of size 0, 1, ...]`` up to the maximum size."""
    counts: dict[int, int] = {}
    for M in enumerate_matchings(g, cap=cap):
        counts[len(M)] = counts.get(len(M), 0) + 1
    return [counts.get(k, 0) for k in range(max(counts) + 1)]


# -- maximum matchings ---------------------------------------------------

def two_coloring(g: Graph) -> frozenset[int] | None:
    """One side of a proper 2-coloring, or None if an odd cycle exists."""
    color: dict[int, int] = {}
    for start in g.vertices:
        if start in color:
            continue
        color[start] = 0
        queue = [start]
        while queue:
            v = queue.pop()
            for eid in g.incident(v):
                w = g.other_end(eid, v)
                if w not in color:
                    color[w] = 1 - color[v]
                    queue.append(w)
                elif color[w] == color[v]:
                    return None
    return frozenset(v for v, c in color.items() if c == 0)


def hopcroft_karp(g: Graph, left: Iterable[int]) -> frozenset[int]:
    """Maximum matching of a bipartite graph, as a set of edge ids."""
    INF = float("inf")
    lset = sorted(set(left))
    match_l: dict[int, int | None] = {u: None for u in lset}
    match_r: dict[int, int | None] = {v: None for v in g.vertices if v not in match_l}
    adj = {u: [g.other_end(eid, u) for eid in g.incident(u)] for u in lset}
    dist: dict[int, float] = {}

    def bfs() -> bool:
        queue = []
        for u in lset:
            if match_l[u] is None:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = False
        i = 0
        while i < len(queue):
            u = queue[i]
            i += 1
            for v in adj[u]:
                w = match_r[v]
                if w is None:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = match_r[v]
            if w is None or (dist.get(w) == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = INF
        return False

    while bfs():
        for u in lset:
            if match_l[u] is None:
                dfs(u)
    out = set()
    for u, v in match_l.items():
        if v is not None:
            out.add(g.edge_between(u, v))
    return frozenset(out)


def maximum_matching(g: Graph, cap: int = DEFAULT_ENUMERATION_CAP) -> frozenset[int]:
    """A maximum matching: augmenting paths when bipartite, search otherwise."""
    left = g.bipartition if g.bipartition is not None else two_coloring(g)
    if left is not None:
        return hopcroft_karp(g, left)

    eids = list(g.edge_ids)
    conflict = {e: set(g.adjacent_edges(e)) for e in eids}
    best: list[frozenset[int]] = [frozenset()]
    nodes = [0]

    def recurse(idx: int, current: list[int], used: set[int], free_vertices: int) -> None:
        nodes[0] += 1
        if nodes[0] > cap:
            raise EnumerationCapError(f"maximum-matching search exceeded cap {cap}")
        if len(current) > len(best[0]):
            best[0] = frozenset(current)
        if idx == len(eids) or len(current) + free_vertices // 2 <= len(best[0]):
            return
        e = eids[idx]
        if e not in used:
            current.append(e)
            added = conflict[e] - used
            used |= added
            used.add(e)
            recurse(idx + 1, current, used, free_vertices - 2)
            used.discard(e)
            used -= added
            current.pop()
        recurse(idx + 1, current, used, free_vertices)

    recurse(0, [], set(), g.n)
    return best[0]


# -- text format ---------------------------------------------------------

def parse_graph(text: str) -> Graph:
    """Parse the edge-list format.

    ::

        n m
        u v          (m lines, edge ids assigned in order of appearance)
        # rotation
        v: e1 e2 ...
        # bipartition: v1 v2 ...

    Lines starting with ``#`` are comments except the two section markers.
    """
    n = m = None
    edges: list[tuple[int, int]] = []
    rotation: dict[int, list[int]] | None = None
    bipartition: list[int] | None = None
    in_rotation = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body == "rotation":
                if m is None or len(edges) < m:
                    raise GraphFormatError("rotation section before all edges were read", lineno)
                in_rotation = True
                rotation = {}
            elif body.startswith("bipartition:"):
                in_rotation = False
                try:
                    bipartition = [int(t) for t in body[len("bipartition:"):].split()]
                except ValueError:
                    raise GraphFormatError("bipartition entries must be integers", lineno)
            continue
        if n is None:
            parts = line.split()
            if len(parts) != 2:
                raise GraphFormatError("expected header 'n m'", lineno)
            try:
                n, m = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError("header values must be integers", lineno)
            if n < 0 or m < 0:
                raise GraphFormatError("header values must be non-negative", lineno)
            continue
        if in_rotation:
            head, sep, tail = line.partition(":")
            if not sep:
                raise GraphFormatError("rotation line must look like 'v: e1 e2 ...'", lineno)
            try:
                v = int(head)
                cyc = [int(t) for t in tail.split()]
            except ValueError:
                raise GraphFormatError("rotation entries must be integers", lineno)
            if rotation is None or v in rotation:
                raise GraphFormatError(f"duplicate rotation line for vertex {v}", lineno)
            rotation[v] = cyc
            continue
        if len(edges) >= (m or 0):
            raise GraphFormatError("unexpected line after all edges were read", lineno)
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError("expected edge line 'u v'", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError("edge endpoints must be integers", lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"edge ({u},{v}) out of range for n={n}", lineno)
        edges.append((u, v))

    if n is None:
        raise GraphFormatError("empty input: missing 'n m' header")
    if len(edges) != m:
        raise GraphFormatError(f"header promised {m} edges but {len(edges)} were given")
    try:
        return Graph(n, edges, rotation=rotation, bipartition=bipartition)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc


def serialize_graph(g: Graph) -> tuple[str, dict[int, int], dict[int, int]]:
    """Serialize ``g``, densifying sparse ids.

    Returns ``(text, vertex_map, edge_map)`` where the maps send original ids
    to the dense ids used in the text.
    """
    vmap = {v: i for i, v in enumerate(g.vertices)}
    emap = {e: i for i, e in enumerate(g.edge_ids)}
    lines = [f"{g.n} {g.m}"]
    for eid in g.edge_ids:
        u, v = g.endpoints(eid)
        lines.append(f"{vmap[u]} {vmap[v]}")
    rot = g.rotation
    if rot is not None:
        lines.append("# rotation")
        for v in g.vertices:
            cyc = " ".join(str(emap[e]) for e in rot[v])
            lines.append(f"{vmap[v]}: {cyc}".rstrip())
    if g.bipartition is not None:
        side = " ".join(str(vmap[v]) for v in sorted(g.bipartition))
        lines.append(f"# bipartition: {side}".rstrip())
    return "\n".join(lines) + "\n", vmap, emap
