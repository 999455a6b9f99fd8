"""Weight classes for heavy edges and the outer per-class reduction.

Heavy edges (weight above w_bar/eps) are split into mu classes indexed by
sigma; within a class, level i collects edges with weight in
[L_i/(1+psi), L_i) where L_i = (1+psi)^sigma * w_bar / eps^i.  Light edges
and the MST go straight into the output, so each class only has to span its
own edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class LevelSchedule:
    psi: float
    eps: float
    mu: int
    w_bar: float
    light_edges: list[int]
    # sigma -> level i -> edge ids, nonempty cells only
    per_sigma: dict[int, dict[int, list[int]]]
    # (sigma, i) per heavy edge id, for audits
    assignment: dict[int, tuple[int, int]] = field(default_factory=dict)

    def level_threshold(self, sigma: int, i: int) -> float:
        """L_i = (1+psi)^sigma * w_bar / eps^i (same expression the classifier uses)."""
        return self.w_bar * (1.0 + self.psi) ** sigma / self.eps**i

    def busy_sigmas(self) -> list[int]:
        return sorted(self.per_sigma)

    def max_level(self, sigma: int) -> int:
        levels = self.per_sigma.get(sigma)
        return max(levels) if levels else 0


def _locate_level(w: float, base: float, eps: float, psi: float) -> tuple[int, bool]:
    """Smallest i >= 1 with w < base/eps^i, and whether w >= that threshold/(1+psi).

    base = (1+psi)^sigma * w_bar.  The candidate comes from a logarithm and is
    then nudged against the exact inequalities so float rounding cannot move
    an edge across a cell boundary.
    """
    # w < base/eps^i  <=>  i > log(w/base)/log(1/eps)
    i = max(1, math.floor(math.log(w / base) / math.log(1.0 / eps)) + 1)
    thr = base / eps**i
    while i > 1 and w < thr * eps:
        i -= 1
        thr = base / eps**i
    while w >= thr:
        i += 1
        thr = base / eps**i
    return i, w >= thr / (1.0 + psi)


def classify_edges(g, w_bar: float, eps: float, psi: float) -> LevelSchedule:
    """Assign every heavy edge to exactly one (sigma, i) cell.

    Classes sigma < mu are tried in increasing order; edges matched by none
    of them fall through to sigma = mu, which keeps the partition exhaustive
    when the top class overlaps the next level of the bottom one.
    """
    if not (0.0 < eps < 1.0):
        raise ValueError(f"eps must be in (0,1), got {eps}")
    if not (0.0 < psi <= 1.0):
        raise ValueError(f"psi must be in (0,1], got {psi}")
    mu = max(1, math.ceil(math.log(1.0 / eps) / math.log(1.0 + psi)))
    light_cut = w_bar / eps
    light: list[int] = []
    per_sigma: dict[int, dict[int, list[int]]] = {}
    assignment: dict[int, tuple[int, int]] = {}
    pow_psi = [1.0]
    for _ in range(mu):
        pow_psi.append(pow_psi[-1] * (1.0 + psi))
    for eid, (_, _, w) in enumerate(g.edges):
        if w <= light_cut:
            light.append(eid)
            continue
        placed = None
        for sigma in range(1, mu):
            i, ok = _locate_level(w, w_bar * pow_psi[sigma], eps, psi)
            if ok:
                placed = (sigma, i)
                break
        if placed is None:
            i, ok = _locate_level(w, w_bar * pow_psi[mu], eps, psi)
            if not ok:
                raise AssertionError(f"edge weight {w} escaped every class (w_bar={w_bar}, eps={eps}, psi={psi})")
            placed = (mu, i)
        sigma, i = placed
        per_sigma.setdefault(sigma, {}).setdefault(i, []).append(eid)
        assignment[eid] = placed
    return LevelSchedule(psi=psi, eps=eps, mu=mu, w_bar=w_bar, light_edges=light,
                         per_sigma=per_sigma, assignment=assignment)


def reduce_over_sigma(g, mst_edge_ids: list[int], schedule: LevelSchedule, per_class_spanner) -> tuple[set[int], dict[int, set[int]]]:
    """Union of MST, light edges and one spanner per busy class.

    per_class_spanner(sigma) must return a set of edge ids covering the
    class's own edges with the target stretch.  Returns (all edge ids,
    per-sigma contribution) so lightness can be attributed per class.
    """
    out: set[int] = set(mst_edge_ids)
    out.update(schedule.light_edges)
    per_class: dict[int, set[int]] = {}
    for sigma in schedule.busy_sigmas():
        h_sigma = per_class_spanner(sigma)
        per_class[sigma] = set(h_sigma)
        out.update(h_sigma)
    return out, per_class
