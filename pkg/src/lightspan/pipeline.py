"""End-to-end spanner drivers.

One run: normalize, MST, light/heavy split, then per weight class a
hierarchy of contracted levels where each level groups clusters, keeps the
class edges selected by build_hi, and contracts.  The union of the MST,
the light edges and every class's kept edges is the spanner.  Entry points
exist for general weighted graphs, Euclidean point sets, unit-disk graphs
and minor-free graphs; they differ in the sparse-spanner backend and in
the metric the result is certified against.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass

from .clustering import cluster_level
from .graphs import (
    PointSet,
    WeightedGraph,
    build_mst,
    dedup_parallel,
    normalize,
    subdivide_mst,
)
from .hierarchy import (
    POTENTIAL_RATIO,
    PotentialLedger,
    build_cluster_graph,
    build_level1,
    contract_level,
)
from .leveling import classify_edges, reduce_over_sigma
from .ssa import DEFAULT_BETA, SsaInput, ssa_general, ssa_geom, ssa_minor
from .unionfind import UnionFind

S_GENERAL = 2.0 * DEFAULT_BETA + 1.0
S_GEOM = 2.0 * (19.0 * DEFAULT_BETA + 14.0)
S_MINOR = 0.0
STRICT_EPS_CAP = 1.0 / 256.0


def stretch_rho(s_ssa: float) -> float:
    """Constant multiplying eps in the per-level stretch guarantee."""
    return max(s_ssa + 4.0 * POTENTIAL_RATIO, 10.0 * POTENTIAL_RATIO)


RHO_GENERAL = stretch_rho(S_GENERAL)
RHO_GEOM = stretch_rho(S_GEOM)
RHO_MINOR = stretch_rho(S_MINOR)


@dataclass
class PipelineConfig:
    mode: str = "general"  # general | euclidean | udg | minor
    k: int = 2
    dim: int = 2
    radius: float = 1.0
    eps_user: float = 0.25
    eps_internal: float | None = None
    psi: float | None = None
    seed: int = 0
    strict: bool = False
    trace: bool = False
    verify_cap: int = 500
    sample_size: int = 1000

    def validate(self) -> None:
        if self.mode not in ("general", "euclidean", "udg", "minor"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "general" and self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.mode == "udg" and not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if not (0.0 < self.eps() < 1.0):
            raise ValueError(f"internal eps must be in (0,1), got {self.eps()}")

    def s_ssa(self) -> float:
        return {"general": S_GENERAL, "euclidean": S_GEOM, "udg": S_GEOM, "minor": S_MINOR}[
            self.mode
        ]

    def rho(self) -> float:
        return stretch_rho(self.s_ssa())

    def eps(self) -> float:
        if self.eps_internal is not None:
            return self.eps_internal
        if self.strict:
            return min(self.eps_user / self.rho(), STRICT_EPS_CAP)
        return self.eps_user

    def psi_value(self) -> float:
        return self.psi if self.psi is not None else self.eps()

    def t(self) -> float:
        return 2.0 * self.k - 1.0 if self.mode == "general" else 1.0 + self.eps()

    def eps_base(self) -> float:
        # cone-graph opening for the geometric base; capped so the base
        # spanner stays reasonable even for coarse eps_user
        return min(self.eps_user, 0.125)

    def stretch_target(self) -> float:
        # hierarchy certifies t(1 + rho*eps) against the run graph; geometric
        # modes pay the base graph's (1 + eps_base) on top
        target = self.t() * (1.0 + self.rho() * self.eps())
        if self.mode in ("euclidean", "udg"):
            target *= 1.0 + self.eps_base()
        return target


@dataclass
class SpannerResult:
    edges: list[tuple[int, int, float]]  # de-normalized spanner edges
    edge_ids: list[int]  # ids into the graph the transformation ran on
    run_graph: WeightedGraph  # that graph (input, or the geometric base)
    stats: dict
    trace: dict | None = None


# ---------------------------------------------------------------------------
# per-level edge selection


def build_hi(cg, outcome, backend, cfg: PipelineConfig, ssa_clock: list[float]) -> set[int]:
    """Source edge ids kept at one level.

    Three sources: class edges inside grouped subgraphs, every class edge
    touching a non-heavy node, and the backend's pruning of the heavy-heavy
    remainder.
    """
    kept: set[int] = set()
    inside: set[int] = set()
    for eids in outcome.class_eids:
        for cid in eids:
            inside.add(cid)
            kept.add(cg.class_edges[cid][3])
    kind = outcome.node_kind
    high_pairs: list[tuple[int, int, float, int]] = []
    for cid, (a, b, w, src) in enumerate(cg.class_edges):
        if cid in inside:
            continue
        if kind[a] == "high" and kind[b] == "high":
            high_pairs.append((a, b, w, src))
        else:
            kept.add(src)
    if high_pairs:
        nodes = sorted({v for a, b, _, _ in high_pairs for v in (a, b)})
        inp = SsaInput(
            nodes=nodes,
            edges=high_pairs,
            level_scale=cg.level_scale / (1.0 + cfg.psi_value()),
            eps=cfg.eps(),
            beta=DEFAULT_BETA,
            psi=cfg.psi_value(),
            gamma=cfg.rho(),
            reps={v: cg.node_source[v] for v in nodes},
            strict=cfg.strict,
        )
        inp.validate()
        t0 = time.perf_counter()
        out = backend(inp)
        ssa_clock[0] += time.perf_counter() - t0
        for idx in out.pruned:
            kept.add(high_pairs[idx][3])
    return kept


# ---------------------------------------------------------------------------
# per-class hierarchy


def _class_spanner(g, sub, schedule, sigma, cfg, backend, ssa_clock, level_rows, trace_sigma):
    cells = {i: ids for i, ids in schedule.per_sigma[sigma].items() if ids}
    if not cells:
        return set()
    max_i = max(cells)
    trace_levels = None if trace_sigma is None else trace_sigma["levels"]
    uf = UnionFind(g.n, sub.extended_vertex_count)
    lvl = build_level1(sub, schedule.level_threshold(sigma, 0), uf)
    ledger = PotentialLedger()
    ledger.record_level(lvl)
    kept: set[int] = set()
    rows_here: list[dict] = []
    for i in range(1, max_i + 1):
        li = schedule.level_threshold(sigma, i)
        lvl.scale = li
        cg = build_cluster_graph(
            lvl, cells.get(i, []), g, uf, cfg.t(), cfg.eps(), level_scale=li, w_bar=sub.w_bar
        )
        outcome = cluster_level(cg, cfg.eps(), strict=cfg.strict)
        h_i = build_hi(cg, outcome, backend, cfg, ssa_clock)
        kept |= h_i
        ledger.record_transition(outcome.local_change, outcome.corrective)
        row = {
            "sigma": sigma,
            "i": i,
            "clusters": cg.n_nodes,
            "class_edges": len(cg.class_edges),
            "h_i_edges": len(h_i),
            "phi": sum(lvl.potentials),
            "delta": sum(outcome.local_change),
            "degenerate": outcome.degenerate,
        }
        rows_here.append(row)
        if trace_levels is not None:
            trace_levels.append(
                {
                    "i": i,
                    "scale": li,
                    "prev_scale": lvl.prev_scale,
                    "members": [list(ms) for ms in lvl.members],
                    "potentials": list(lvl.potentials),
                    "collapse": list(lvl.collapse),
                    "h_i": sorted(h_i),
                    "local_change": list(outcome.local_change),
                    "corrected_change": list(outcome.corrected_change),
                    "degenerate": outcome.degenerate,
                }
            )
        lvl = contract_level(lvl, outcome, uf)
        ledger.record_level(lvl)
        if lvl.cluster_count == 1 and not any(cells.get(j) for j in range(i + 1, max_i + 1)):
            break
    level_rows.extend(rows_here)
    if trace_sigma is not None:
        trace_sigma["ledger"] = {
            "phi_totals": list(ledger.phi_totals),
            "deltas": list(ledger.deltas),
            "local_changes": [list(r) for r in ledger.local_changes],
            "corrected_changes": [list(r) for r in ledger.corrected_changes],
        }
    return kept


def _transform(g: WeightedGraph, cfg: PipelineConfig, backend, timings: dict):
    """Shared trunk: MST, split, per-class hierarchies, union."""
    t0 = time.perf_counter()
    mst_ids = build_mst(g)
    timings["mst"] = time.perf_counter() - t0
    mst_w = sum(g.edges[i][2] for i in mst_ids)
    if mst_w <= 0.0 or g.m == 0:
        timings.setdefault("leveling", 0.0)
        timings.setdefault("hierarchy", 0.0)
        timings.setdefault("ssa", 0.0)
        return set(range(g.m)), mst_w, [], None

    eps = cfg.eps()
    w_bar = eps * mst_w / g.n
    t0 = time.perf_counter()
    sub = subdivide_mst(g, mst_ids, w_bar)
    schedule = classify_edges(g, w_bar, eps, cfg.psi_value())
    mst_set = set(mst_ids)
    schedule.light_edges = [e for e in schedule.light_edges if e not in mst_set]
    for sigma in list(schedule.per_sigma):
        cells = schedule.per_sigma[sigma]
        for i in list(cells):
            cells[i] = [e for e in cells[i] if e not in mst_set]
            if not cells[i]:
                del cells[i]
        if not cells:
            del schedule.per_sigma[sigma]
    timings["leveling"] = time.perf_counter() - t0

    ssa_clock = [0.0]
    level_rows: list[dict] = []
    trace: dict | None = {"per_sigma": {}} if cfg.trace else None
    t0 = time.perf_counter()

    def per_class(sigma: int) -> set[int]:
        trace_sigma = None
        if trace is not None:
            trace_sigma = {"levels": [], "ledger": None}
            trace["per_sigma"][sigma] = trace_sigma
        return _class_spanner(
            g, sub, schedule, sigma, cfg, backend, ssa_clock, level_rows, trace_sigma
        )

    h_all, per_class_sets = reduce_over_sigma(g, mst_ids, schedule, per_class)
    timings["hierarchy"] = time.perf_counter() - t0 - ssa_clock[0]
    timings["ssa"] = ssa_clock[0]
    if trace is not None:
        trace["edges"] = [list(e) for e in g.edges]
        trace["mst_ids"] = list(mst_ids)
        trace["mst_weight"] = mst_w
        trace["w_bar"] = w_bar
        trace["light_ids"] = list(schedule.light_edges)
        trace["sub_tree_edges"] = [list(e) for e in sub.tree_edges]
        trace["n_original"] = g.n
        trace["n_extended"] = sub.extended_vertex_count
        trace["eps"] = eps
        trace["per_class_edges"] = {s: sorted(v) for s, v in per_class_sets.items()}
    return h_all, mst_w, level_rows, trace


# ---------------------------------------------------------------------------
# certification


def _certify(g: WeightedGraph, h_ids: set[int], cfg: PipelineConfig) -> tuple[float, int]:
    """Measured max stretch over input edges and its witness edge id."""
    from .verify import measure_stretch

    if g.n <= cfg.verify_cap:
        return measure_stretch(g, sorted(h_ids))
    rng = random.Random(cfg.seed)
    mst_ids = build_mst(g)
    sample = set(mst_ids)
    pool = [i for i in range(g.m)]
    sample.update(rng.sample(pool, min(cfg.sample_size, len(pool))))
    # Demands whose edge sits in the spanner are met by that edge itself
    # (ratio <= 1, never above the 1.0 floor), so only the rest need searches.
    outside = [i for i in sorted(sample) if i not in h_ids]
    if not outside:
        return 1.0, -1
    return batched_stretch(g, sorted(h_ids), outside)


def batched_stretch(
    g: WeightedGraph, h_edge_ids: list[int], demand_ids: list[int]
) -> tuple[float, int]:
    """Same contract as measure_stretch over the given demand edges.

    Runs scipy's Dijkstra in source blocks; used above the verification cap
    where one pure-Python search per source is too slow.
    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import dijkstra as cs_dijkstra

    from .verify import NotSpanning

    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    for i in h_edge_ids:
        u, v, w = g.edges[i]
        rows.extend((u, v))
        cols.extend((v, u))
        vals.extend((w, w))
    mat = csr_matrix((vals, (rows, cols)), shape=(g.n, g.n))
    by_src: dict[int, list[int]] = {}
    for eid in demand_ids:
        u, v, _ = g.edges[eid]
        by_src.setdefault(min(u, v), []).append(eid)
    sources = sorted(by_src)
    best = 0.0
    witness = -1
    block = 256
    for lo in range(0, len(sources), block):
        chunk = sources[lo : lo + block]
        dist = cs_dijkstra(mat, directed=False, indices=chunk)
        for row, src in zip(dist, chunk):
            for eid in by_src[src]:
                u, v, w = g.edges[eid]
                other = v if u == src else u
                d = float(row[other])
                if math.isinf(d):
                    raise NotSpanning(f"no path between {u} and {v} in the candidate spanner")
                ratio = d / w
                if ratio > best or (ratio == best and eid < witness):
                    best = ratio
                    witness = eid
    if witness < 0:
        return 1.0, -1
    return max(best, 1.0), witness


def _result_stats(cfg, g, h_ids, mst_w, stretch, witness, level_rows, timings, scale=1.0, extra=None):
    for key in ("mst", "leveling", "hierarchy", "ssa", "verify"):
        timings.setdefault(key, 0.0)
    w_h = sum(g.edges[i][2] for i in h_ids)
    stats = {
        "mode": cfg.mode,
        "n": g.n,
        "m": g.m,
        "epsilon_user": cfg.eps_user,
        "epsilon_internal": cfg.eps(),
        "k": cfg.k if cfg.mode == "general" else None,
        "stretch_target": cfg.stretch_target(),
        "stretch_measured": stretch,
        "stretch_witness_edge": witness,
        "lightness": w_h / mst_w if mst_w > 0 else 1.0,
        "sparsity": len(h_ids) / max(1, g.n - 1),
        "mst_weight": mst_w * scale,
        "seed": cfg.seed,
        "strict": cfg.strict,
        "psi": cfg.psi_value(),
        "timings_ms": {k: round(v * 1000.0, 3) for k, v in timings.items()},
        "levels": level_rows,
    }
    if extra:
        stats.update(extra)
    return stats


# ---------------------------------------------------------------------------
# mode drivers


def _graph_driver(g: WeightedGraph, cfg: PipelineConfig, backend) -> SpannerResult:
    g.validate()
    gn, scale = normalize(dedup_parallel(g))
    timings: dict = {}
    h_ids, mst_w, level_rows, trace = _transform(gn, cfg, backend, timings)
    t0 = time.perf_counter()
    stretch, witness = _certify(gn, h_ids, cfg)
    timings["verify"] = time.perf_counter() - t0
    stats = _result_stats(cfg, gn, h_ids, mst_w, stretch, witness, level_rows, timings, scale)
    edges = [(gn.edges[i][0], gn.edges[i][1], gn.edges[i][2] * scale) for i in sorted(h_ids)]
    return SpannerResult(edges=edges, edge_ids=sorted(h_ids), run_graph=gn, stats=stats, trace=trace)


def light_spanner_general(g: WeightedGraph, cfg: PipelineConfig) -> SpannerResult:
    cfg.validate()
    if cfg.mode != "general":
        raise ValueError(f"config mode is {cfg.mode!r}, expected 'general'")
    return _graph_driver(g, cfg, _general_backend(cfg))


def light_spanner_minor_free(g: WeightedGraph, cfg: PipelineConfig) -> SpannerResult:
    cfg.validate()
    if cfg.mode != "minor":
        raise ValueError(f"config mode is {cfg.mode!r}, expected 'minor'")
    return _graph_driver(g, cfg, lambda inp: ssa_minor(inp))


def light_spanner_geometric(p: PointSet, cfg: PipelineConfig) -> SpannerResult:
    cfg.validate()
    if cfg.mode not in ("euclidean", "udg"):
        raise ValueError(f"config mode is {cfg.mode!r}, expected a geometric mode")
    p.validate()
    if cfg.dim != p.d:
        raise ValueError(f"config dim {cfg.dim} does not match points dim {p.d}")
    t0 = time.perf_counter()
    if cfg.mode == "udg":
        base = _udg_base(p, cfg)
    else:
        base = _yao_base(p, cfg)
    base_time = time.perf_counter() - t0

    backend = lambda inp: ssa_geom(inp, p.d, _RepPositions(p, inp.reps))  # noqa: E731
    timings: dict = {"base": base_time}
    h_ids, mst_w, level_rows, trace = _transform(base, cfg, backend, timings)
    t0 = time.perf_counter()
    stretch, witness = _certify_geometric(p, base, h_ids, cfg)
    timings["verify"] = time.perf_counter() - t0
    stats = _result_stats(
        cfg,
        base,
        h_ids,
        mst_w,
        stretch,
        witness,
        level_rows,
        timings,
        extra={"eps_base": cfg.eps_base(), "base_edges": base.m},
    )
    edges = [base.edges[i] for i in sorted(h_ids)]
    return SpannerResult(
        edges=edges, edge_ids=sorted(h_ids), run_graph=base, stats=stats, trace=trace
    )


def _general_backend(cfg: PipelineConfig):
    return lambda inp: ssa_general(inp, cfg.k)


class _RepPositions:
    """Node id -> representative coordinates, insisting reps are original."""

    def __init__(self, p: PointSet, reps: dict[int, int]):
        self._p = p
        self._reps = reps

    def __getitem__(self, node: int):
        rep = self._reps[node]
        if rep >= self._p.n:
            raise ValueError(f"node {node} has a virtual representative {rep}")
        return self._p.points[rep]


# ---------------------------------------------------------------------------
# geometric base graphs


def _cone_angle(eps_base: float) -> float:
    # largest theta with 1/(cos(theta) - sin(theta)) <= 1 + eps_base,
    # found numerically; the Yao stretch bound then gives 1 + eps_base
    theta = eps_base / 2.0
    while theta > 1e-9 and 1.0 / (math.cos(theta) - math.sin(theta)) > 1.0 + eps_base:
        theta *= 0.9
    return theta


def _cone_selector(d: int, theta: float):
    """(cone count, vec -> cone id) with same-cone angular spread <= theta."""
    from .ssa import _cone_index_2d, _cone_index_net, direction_net

    if d == 1:
        return 2, lambda vec: 0 if vec[0] >= 0 else 1
    if d == 2:
        tau = max(1, math.ceil(2.0 * math.pi / theta))
        return tau, lambda vec: _cone_index_2d(vec[0], vec[1], theta, tau)
    # net resolution theta/2: two vectors sharing a nearest direction are
    # within theta of each other
    net = direction_net(d, theta / 2.0)
    if len(net) > 64:
        import numpy as np

        mat = np.asarray(net)

        def nearest(vec):
            return int(np.argmax(mat @ vec))

        return len(net), nearest
    return len(net), lambda vec: _cone_index_net(vec, net)


def _yao_base(p: PointSet, cfg: PipelineConfig) -> WeightedGraph:
    """Cone graph: per point and cone, the edge to the nearest neighbor."""
    theta = _cone_angle(cfg.eps_base())
    _, cone_of = _cone_selector(p.d, theta)
    chosen: set[tuple[int, int]] = set()
    for u in range(p.n):
        pu = p.points[u]
        best: dict[int, tuple[float, int]] = {}
        for v in range(p.n):
            if v == u:
                continue
            vec = tuple(a - b for a, b in zip(p.points[v], pu))
            cand = (math.sqrt(sum(c * c for c in vec)), v)
            cone = cone_of(vec)
            if cone not in best or cand < best[cone]:
                best[cone] = cand
        for _, v in best.values():
            chosen.add((u, v) if u < v else (v, u))
    edges = [(u, v, p.distance(u, v)) for u, v in sorted(chosen)]
    return WeightedGraph(p.n, edges)


def _grid_buckets(p: PointSet, cell: float) -> dict[tuple[int, ...], list[int]]:
    buckets: dict[tuple[int, ...], list[int]] = {}
    for i in range(p.n):
        key = tuple(int(math.floor(c / cell)) for c in p.points[i])
        buckets.setdefault(key, []).append(i)
    return buckets


def _cell_offsets(d: int) -> list[tuple[int, ...]]:
    offsets: list[tuple[int, ...]] = [()]
    for _ in range(d):
        offsets = [o + (s,) for o in offsets for s in (-1, 0, 1)]
    return offsets


def _udg_base(p: PointSet, cfg: PipelineConfig) -> WeightedGraph:
    """Unit-disk cone graph: nearest neighbor per cone among in-range points.

    Grid buckets with cell side = radius keep the neighbor scan local; all
    in-range pairs live in adjacent cells.
    """
    r = cfg.radius
    theta = _cone_angle(cfg.eps_base())
    _, cone_of = _cone_selector(p.d, theta)
    buckets = _grid_buckets(p, r)
    offsets = _cell_offsets(p.d)
    chosen: set[tuple[int, int]] = set()
    for u in range(p.n):
        pu = p.points[u]
        key = tuple(int(math.floor(c / r)) for c in pu)
        best: dict[int, tuple[float, int]] = {}
        for off in offsets:
            for v in buckets.get(tuple(k + s for k, s in zip(key, off)), ()):
                if v == u:
                    continue
                vec = tuple(a - b for a, b in zip(p.points[v], pu))
                dist = math.sqrt(sum(c * c for c in vec))
                if dist > r:
                    continue
                cand = (dist, v)
                cone = cone_of(vec)
                if cone not in best or cand < best[cone]:
                    best[cone] = cand
        for _, v in best.values():
            chosen.add((u, v) if u < v else (v, u))
    edges = [(u, v, p.distance(u, v)) for u, v in sorted(chosen)]
    return WeightedGraph(p.n, edges)


def _udg_metric_edges(p: PointSet, radius: float) -> list[tuple[int, int, float]]:
    """Every pair within the radius, found through the grid."""
    buckets = _grid_buckets(p, radius)
    edges = []
    for u in range(p.n):
        key = tuple(int(math.floor(c / radius)) for c in p.points[u])
        for off in _cell_offsets(p.d):
            for v in buckets.get(tuple(k + s for k, s in zip(key, off)), ()):
                if v > u:
                    d = p.distance(u, v)
                    if d <= radius:
                        edges.append((u, v, d))
    return edges


def _certify_geometric(p: PointSet, base: WeightedGraph, h_ids: set[int], cfg: PipelineConfig):
    """Stretch against the point metric itself, not just the base graph.

    Up to the cap this is every pair (every in-range pair for unit disks);
    above it, a seeded pair sample.  The spanner edges always enter the
    comparison graph so the measured value certifies them too.
    """
    from .verify import measure_stretch

    pairs: dict[tuple[int, int], float] = {}
    if p.n <= cfg.verify_cap:
        if cfg.mode == "udg":
            for u, v, w in _udg_metric_edges(p, cfg.radius):
                pairs[(u, v)] = w
        else:
            for u in range(p.n):
                for v in range(u + 1, p.n):
                    pairs[(u, v)] = p.distance(u, v)
        demand = None  # certify every pair
    else:
        rng = random.Random(cfg.seed)
        if cfg.mode == "udg":
            in_range = _udg_metric_edges(p, cfg.radius)
            for u, v, w in rng.sample(in_range, min(cfg.sample_size, len(in_range))):
                pairs[(u, v)] = w
        else:
            want = min(cfg.sample_size, p.n * (p.n - 1) // 2)
            while len(pairs) < want:
                u = rng.randrange(p.n)
                v = rng.randrange(p.n)
                if u != v:
                    pairs[(min(u, v), max(u, v))] = p.distance(u, v)
        demand = set(pairs)

    for i in h_ids:
        u, v, w = base.edges[i]
        pairs[(min(u, v), max(u, v))] = w
    keys = sorted(pairs)
    metric = WeightedGraph(p.n, [(u, v, pairs[(u, v)]) for u, v in keys])
    index = {key: j for j, key in enumerate(keys)}
    h_in_metric = sorted(
        {index[(min(u, v), max(u, v))] for u, v, _ in (base.edges[i] for i in h_ids)}
    )
    edge_ids = None if demand is None else sorted(index[key] for key in demand)
    return measure_stretch(metric, h_in_metric, edge_ids=edge_ids)
