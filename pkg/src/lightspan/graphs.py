"""Core graph and point types, MST, subdivision and shortest paths."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field


class DisconnectedGraph(ValueError):
    """Raised when a connected graph is required but more than one component exists."""


class DegeneratePoints(ValueError):
    """Raised on duplicate points or an unusable dimension."""


class FormatError(ValueError):
    """Malformed input text; carries a 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _check_weight(w: float, line_no: int | None = None) -> None:
    if not (w > 0.0) or math.isinf(w) or math.isnan(w):
        msg = f"edge weight must be a positive finite float, got {w!r}"
        if line_no is not None:
            raise FormatError(line_no, msg)
        raise ValueError(msg)


@dataclass
class WeightedGraph:
    """Undirected graph with positive 64-bit float edge weights.

    Edges are (u, v, w) triples; edge ids are positions in `edges`.
    Parallel edges are tolerated on ingest and removed by `dedup_parallel`.
    """

    n: int
    edges: list[tuple[int, int, float]]
    _adj: list[list[int]] | None = field(default=None, repr=False, compare=False)

    @property
    def m(self) -> int:
        return len(self.edges)

    def adjacency(self) -> list[list[int]]:
        """Per-vertex list of incident edge ids (built once, cached)."""
        if self._adj is None:
            adj: list[list[int]] = [[] for _ in range(self.n)]
            for i, (u, v, _) in enumerate(self.edges):
                adj[u].append(i)
                adj[v].append(i)
            self._adj = adj
        return self._adj

    def weighted_adjacency(self) -> list[list[tuple[int, float]]]:
        """Per-vertex (neighbor, weight) lists."""
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        return adj

    def validate(self) -> None:
        for i, (u, v, w) in enumerate(self.edges):
            if u == v:
                raise ValueError(f"edge {i}: self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {i}: vertex id out of range")
            _check_weight(w)

    def total_weight(self) -> float:
        return sum(w for _, _, w in self.edges)


@dataclass
class PointSet:
    """n distinct points in R^d, one coordinate tuple per point."""

    d: int
    points: list[tuple[float, ...]]

    @property
    def n(self) -> int:
        return len(self.points)

    def validate(self) -> None:
        if self.d < 1:
            raise DegeneratePoints(f"dimension must be >= 1, got {self.d}")
        seen = set()
        for i, p in enumerate(self.points):
            if len(p) != self.d:
                raise DegeneratePoints(f"point {i} has {len(p)} coordinates, expected {self.d}")
            if p in seen:
                raise DegeneratePoints(f"duplicate point at index {i}: {p}")
            seen.add(p)

    def distance(self, i: int, j: int) -> float:
        return math.dist(self.points[i], self.points[j])


# ---------------------------------------------------------------------------
# text formats: graphs are "n m" then m lines "u v w"; points are "n d" then
# n coordinate lines; '#' starts a comment line; ids are 0-based


def _data_lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield no, line


def parse_graph(text: str) -> WeightedGraph:
    lines = _data_lines(text)
    try:
        no, header = next(lines)
    except StopIteration:
        raise FormatError(1, "empty graph file") from None
    parts = header.split()
    if len(parts) != 2:
        raise FormatError(no, f"expected header 'n m', got {header!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise FormatError(no, f"non-integer header fields in {header!r}") from None
    if n <= 0 or m < 0:
        raise FormatError(no, f"invalid sizes n={n} m={m}")
    edges: list[tuple[int, int, float]] = []
    for no, line in lines:
        parts = line.split()
        if len(parts) != 3:
            raise FormatError(no, f"expected 'u v w', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
            w = float(parts[2])
        except ValueError:
            raise FormatError(no, f"could not parse edge line {line!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise FormatError(no, f"vertex id out of range in {line!r}")
        if u == v:
            raise FormatError(no, f"self-loop at vertex {u}")
        _check_weight(w, no)
        edges.append((u, v, w))
    if len(edges) != m:
        raise FormatError(no if edges else 1, f"header promised {m} edges, found {len(edges)}")
    return WeightedGraph(n, edges)


def format_graph(g: WeightedGraph) -> str:
    out = [f"{g.n} {g.m}"]
    for u, v, w in g.edges:
        out.append(f"{u} {v} {w!r}")
    return "\n".join(out) + "\n"


def parse_points(text: str) -> PointSet:
    lines = _data_lines(text)
    try:
        no, header = next(lines)
    except StopIteration:
        raise FormatError(1, "empty point file") from None
    parts = header.split()
    if len(parts) != 2:
        raise FormatError(no, f"expected header 'n d', got {header!r}")
    try:
        n, d = int(parts[0]), int(parts[1])
    except ValueError:
        raise FormatError(no, f"non-integer header fields in {header!r}") from None
    points: list[tuple[float, ...]] = []
    for no, line in lines:
        parts = line.split()
        if len(parts) != d:
            raise FormatError(no, f"expected {d} coordinates, got {len(parts)}")
        try:
            points.append(tuple(float(x) for x in parts))
        except ValueError:
            raise FormatError(no, f"could not parse coordinates {line!r}") from None
    if len(points) != n:
        raise FormatError(no if points else 1, f"header promised {n} points, found {len(points)}")
    ps = PointSet(d, points)
    ps.validate()
    return ps


def format_points(ps: PointSet) -> str:
    out = [f"{ps.n} {ps.d}"]
    for p in ps.points:
        out.append(" ".join(repr(x) for x in p))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# normalization and cleanup before the pipeline


def dedup_parallel(g: WeightedGraph) -> WeightedGraph:
    """Keep the minimum-weight edge per vertex pair (ties by first occurrence)."""
    best: dict[tuple[int, int], tuple[float, int]] = {}
    for i, (u, v, w) in enumerate(g.edges):
        key = (u, v) if u < v else (v, u)
        cur = best.get(key)
        if cur is None or w < cur[0]:
            best[key] = (w, i)
    keep = sorted(i for _, i in best.values())
    return WeightedGraph(g.n, [g.edges[i] for i in keep])


def normalize(g: WeightedGraph) -> tuple[WeightedGraph, float]:
    """Scale weights so the minimum is exactly 1; returns (graph, scale factor)."""
    if not g.edges:
        return g, 1.0
    scale = min(w for _, _, w in g.edges)
    edges = [(u, v, w / scale) for u, v, w in g.edges]
    return WeightedGraph(g.n, edges), scale


# ---------------------------------------------------------------------------
# MST (Kruskal over a plain union-find on the original vertices)


def build_mst(g: WeightedGraph) -> list[int]:
    """Edge ids of the minimum spanning tree; ties broken by (weight, u, v).

    Raises DisconnectedGraph when g has more than one component.
    """
    order = sorted(range(g.m), key=lambda i: (g.edges[i][2], min(g.edges[i][:2]), max(g.edges[i][:2])))
    parent = list(range(g.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree: list[int] = []
    for i in order:
        u, v, _ = g.edges[i]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            tree.append(i)
            if len(tree) == g.n - 1:
                break
    if len(tree) != g.n - 1:
        raise DisconnectedGraph(f"graph has more than one component ({g.n} vertices, tree size {len(tree)})")
    return tree


# ---------------------------------------------------------------------------
# MST subdivision into pieces of weight at most w_bar


@dataclass
class SubdividedMst:
    """MST with every edge heavier than w_bar split into equal pieces.

    Virtual vertices get ids n_original, n_original+1, ... in edge order.
    segments[j] lists the virtual chain of MST edge j from u to v; an unsplit
    edge has an empty chain.  tree_edges holds the full subdivided tree with
    stable edge ids 0..extended_vertex_count-2.
    """

    n_original: int
    original_mst_edges: list[tuple[int, int, float]]
    segments: list[list[int]]
    piece_weights: list[float]
    w_bar: float
    extended_vertex_count: int
    tree_edges: list[tuple[int, int, float]] = field(default_factory=list)
    # tree edge id -> owning MST edge position
    tree_edge_owner: list[int] = field(default_factory=list)

    @property
    def virtual_count(self) -> int:
        return self.extended_vertex_count - self.n_original

    def tree_adjacency(self) -> list[list[tuple[int, float, int]]]:
        """Per extended vertex: (neighbor, weight, tree edge id) lists."""
        adj: list[list[tuple[int, float, int]]] = [[] for _ in range(self.extended_vertex_count)]
        for eid, (a, b, w) in enumerate(self.tree_edges):
            adj[a].append((b, w, eid))
            adj[b].append((a, w, eid))
        return adj


def subdivide_mst(g: WeightedGraph, mst_edge_ids: list[int], w_bar: float) -> SubdividedMst:
    """Split each MST edge of weight > w_bar into ceil(w/w_bar) equal pieces."""
    if not (w_bar > 0):
        raise ValueError(f"w_bar must be positive, got {w_bar}")
    originals = [g.edges[i] for i in mst_edge_ids]
    segments: list[list[int]] = []
    piece_weights: list[float] = []
    tree_edges: list[tuple[int, int, float]] = []
    tree_edge_owner: list[int] = []
    next_id = g.n
    for j, (u, v, w) in enumerate(originals):
        if w <= w_bar:
            pieces = 1
        else:
            pieces = math.ceil(w / w_bar)
            # float ceil can land one short when w/w_bar is just above an integer
            if w / pieces > w_bar:
                pieces += 1
        sub_w = w / pieces
        chain = list(range(next_id, next_id + pieces - 1))
        next_id += pieces - 1
        segments.append(chain)
        piece_weights.append(sub_w)
        prev = u
        for x in chain:
            tree_edges.append((prev, x, sub_w))
            tree_edge_owner.append(j)
            prev = x
        tree_edges.append((prev, v, sub_w))
        tree_edge_owner.append(j)
    return SubdividedMst(
        n_original=g.n,
        original_mst_edges=originals,
        segments=segments,
        piece_weights=piece_weights,
        w_bar=w_bar,
        extended_vertex_count=next_id,
        tree_edges=tree_edges,
        tree_edge_owner=tree_edge_owner,
    )


# ---------------------------------------------------------------------------
# shortest paths


def dijkstra(
    adj: list[list[tuple[int, float]]],
    source: int,
    cutoff: float | None = None,
    target: int | None = None,
) -> list[float]:
    """Exact nonnegative shortest paths from source; unreachable = inf.

    `adj` is a per-vertex (neighbor, weight) list.  With `cutoff`, vertices
    beyond it stay at inf.  With `target`, stops as soon as it settles.
    """
    n = len(adj)
    dist = [math.inf] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        if cutoff is not None and d > cutoff:
            break
        if target is not None and u == target:
            break
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v]:
                if cutoff is not None and nd > cutoff:
                    continue
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist
