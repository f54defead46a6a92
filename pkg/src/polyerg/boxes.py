"""Finite unions of half-open boxes in [0,1)^d and the correlations

    mu(A  ∩  T^{-m_1} A  ∩ ... ∩  T^{-m_k} A)

for unipotent affine maps T.  On T^1 the answer is an intersection of arcs.
On T^2, T^m(t, s) = (t + tau_m, s + a_m t + gamma_m): for fixed t the
s-section is an intersection of shifted arc unions, which is a piecewise
linear function of t whose breakpoints can all be listed, so the integral is
exact (up to float rounding).  d >= 3 falls back to stratified Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .affine import UnipotentAffineMap
from .polynomial import PolyFamily

DEFAULT_SEED = 0x5EED
DEFAULT_SAMPLES = 10**6
MAX_BREAKPOINTS = 50_000_000
_EVAL_BLOCK = 200_000


def _merge_intervals(intervals: Iterable[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    out: list[list[Fraction]] = []
    for lo, hi in sorted((Fraction(a), Fraction(b)) for a, b in intervals):
        if hi <= lo:
            continue
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(a, b) for a, b in out]


@dataclass(frozen=True)
class BoxSet:
    """Union of boxes prod_i [lo_i, hi_i) inside [0,1)^d, stored disjoint."""

    dimension: int
    boxes: tuple = ()

    def __post_init__(self):
        norm = _normalize(self.dimension, self.boxes)
        object.__setattr__(self, "boxes", norm)

    # constructors
    @classmethod
    def interval_union(cls, intervals) -> "BoxSet":
        return cls(1, tuple(((a,), (b,)) for a, b in intervals))

    @classmethod
    def full(cls, d: int) -> "BoxSet":
        return cls(d, (((0,) * d, (1,) * d),))

    @classmethod
    def empty(cls, d: int) -> "BoxSet":
        return cls(d, ())

    @classmethod
    def product(cls, *factors: "BoxSet") -> "BoxSet":
        boxes = []
        for combo in product(*(f.boxes for f in factors)):
            lo = tuple(x for box in combo for x in box[0])
            hi = tuple(x for box in combo for x in box[1])
            boxes.append((lo, hi))
        return cls(sum(f.dimension for f in factors), tuple(boxes))

    @property
    def measure(self) -> Fraction:
        total = Fraction(0)
        for lo, hi in self.boxes:
            total += math.prod((b - a for a, b in zip(lo, hi)), start=Fraction(1))
        return total

    def projection(self, axis: int) -> list[tuple[Fraction, Fraction]]:
        return _merge_intervals((lo[axis], hi[axis]) for lo, hi in self.boxes)

    def product_factors(self):
        """1-D factors if the set is a product of its projections, else None."""
        if not self.boxes:
            return None
        projs = [self.projection(i) for i in range(self.dimension)]
        prod_measure = math.prod((sum((b - a for a, b in p), Fraction(0)) for p in projs), start=Fraction(1))
        return projs if prod_measure == self.measure else None

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Membership of points (shape (n, d), coordinates taken mod 1)."""
        pts = np.mod(np.asarray(points, dtype=np.float64).reshape(-1, self.dimension), 1.0)
        factors = self.product_factors()
        if factors is not None:
            inside = np.ones(len(pts), dtype=bool)
            for axis, ivs in enumerate(factors):
                inside &= _in_intervals(pts[:, axis], ivs)
            return inside
        inside = np.zeros(len(pts), dtype=bool)
        for lo, hi in self.boxes:
            hit = np.ones(len(pts), dtype=bool)
            for axis in range(self.dimension):
                hit &= (pts[:, axis] >= float(lo[axis])) & (pts[:, axis] < float(hi[axis]))
            inside |= hit
        return inside

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "boxes": [[[str(x) for x in lo], [str(x) for x in hi]] for lo, hi in self.boxes],
            "measure": str(self.measure),
        }


def _in_intervals(x: np.ndarray, ivs) -> np.ndarray:
    if not ivs:
        return np.zeros(len(x), dtype=bool)
    starts = np.array([float(a) for a, _ in ivs])
    ends = np.array([float(b) for _, b in ivs])
    idx = np.searchsorted(starts, x, side="right") - 1
    ok = idx >= 0
    out = np.zeros(len(x), dtype=bool)
    out[ok] = x[ok] < ends[idx[ok]]
    return out


def _normalize(d: int, boxes) -> tuple:
    """Split overlapping boxes on the common coordinate grid and merge cells
    back along the last axis; deterministic for a given input set."""
    clean = []
    for lo, hi in boxes:
        lo = tuple(Fraction(x) for x in lo)
        hi = tuple(Fraction(x) for x in hi)
        if len(lo) != d or len(hi) != d:
            raise ValueError(f"box {lo}..{hi} does not have dimension {d}")
        if any(not (0 <= a and b <= 1) for a, b in zip(lo, hi)):
            raise ValueError(f"box {lo}..{hi} leaves the unit cube")
        if all(a < b for a, b in zip(lo, hi)):
            clean.append((lo, hi))
    if len(clean) <= 1:
        return tuple(clean)
    if not _any_overlap(clean):
        return tuple(sorted(clean))
    grids = [sorted({b[0][i] for b in clean} | {b[1][i] for b in clean}) for i in range(d)]
    cells = set()
    for lo, hi in clean:
        ranges = [range(grids[i].index(lo[i]), grids[i].index(hi[i])) for i in range(d)]
        cells.update(product(*ranges))
    out = []
    for key in sorted({c[:-1] for c in cells}):
        last = sorted(c[-1] for c in cells if c[:-1] == key)
        runs, start, prev = [], last[0], last[0]
        for v in last[1:]:
            if v != prev + 1:
                runs.append((start, prev))
                start = v
            prev = v
        runs.append((start, prev))
        for a, b in runs:
            lo = tuple(grids[i][key[i]] for i in range(d - 1)) + (grids[-1][a],)
            hi = tuple(grids[i][key[i] + 1] for i in range(d - 1)) + (grids[-1][b + 1],)
            out.append((lo, hi))
    return tuple(sorted(out))


def _any_overlap(boxes) -> bool:
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            if all(a1 < b2 and a2 < b1 for a1, b1, a2, b2 in
                   zip(boxes[i][0], boxes[i][1], boxes[j][0], boxes[j][1])):
                return True
    return False


# arc sweep ------------------------------------------------------------------

def arc_intersection_lengths(arc_sets: Sequence[np.ndarray], shifts: np.ndarray) -> np.ndarray:
    """Measure of  ∩_k (S_k + shifts[r, k])  on the circle, for every row r.

    Each S_k is an array of disjoint arcs [lo, hi) with 0 <= lo < hi <= 1.
    """
    shifts = np.atleast_2d(np.asarray(shifts, dtype=np.float64))
    R, K = shifts.shape
    if len(arc_sets) != K:
        raise ValueError("one shift column per arc set")
    if any(len(s) == 0 for s in arc_sets):
        return np.zeros(R)
    out = np.empty(R)
    for r0 in range(0, R, _EVAL_BLOCK):
        out[r0:r0 + _EVAL_BLOCK] = _sweep(arc_sets, shifts[r0:r0 + _EVAL_BLOCK])
    return out


def _sweep(arc_sets, shifts):
    R = len(shifts)
    pos_parts, delta_parts = [], []
    init = np.zeros(R)
    for k, arcs in enumerate(arc_sets):
        arcs = np.asarray(arcs, dtype=np.float64)
        length = arcs[:, 1] - arcs[:, 0]
        start = np.mod(arcs[None, :, 0] + shifts[:, k:k + 1], 1.0)
        end = start + length[None, :]
        wrap = end > 1.0
        end = np.where(wrap, end - 1.0, end)
        init += wrap.sum(axis=1)
        pos_parts += [start, end]
        delta_parts += [np.ones_like(start), -np.ones_like(end)]
    pos = np.concatenate(pos_parts, axis=1)
    delta = np.concatenate(delta_parts, axis=1)
    order = np.argsort(pos, axis=1, kind="stable")
    pos = np.take_along_axis(pos, order, axis=1)
    delta = np.take_along_axis(delta, order, axis=1)
    coverage = init[:, None] + np.cumsum(delta, axis=1)
    K = len(arc_sets)
    seg = np.diff(np.concatenate([pos, np.ones((R, 1))], axis=1), axis=1)
    total = np.where(coverage >= K - 0.5, seg, 0.0).sum(axis=1)
    total += np.where(init >= K - 0.5, pos[:, 0], 0.0)
    return total


def _arcs(intervals) -> np.ndarray:
    return np.array([[float(a), float(b)] for a, b in intervals], dtype=np.float64).reshape(-1, 2)


# correlations -----------------------------------------------------------------

@dataclass
class CorrelationEstimate:
    value: float
    stderr: float
    method: str
    shifts: tuple
    samples: int = 0
    seed: int | None = None
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        prov = "exact" if self.method.startswith("exact") else f"empirical({self.samples}, {self.seed})"
        return {"value": self.value, "stderr": self.stderr, "method": self.method,
                "shifts": list(self.shifts), "provenance": prov}


def _frac(x) -> float:
    return float(x.frac_mpf(30))


def box_correlation(T: UnipotentAffineMap, A: BoxSet, f: PolyFamily, n: int, resolution: int = 8,
                    method: str = "auto", samples: int = DEFAULT_SAMPLES,
                    seed: int = DEFAULT_SEED) -> CorrelationEstimate:
    """mu(A ∩ T^{-p_1(n)} A ∩ ... ∩ T^{-p_k(n)} A)."""
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    if A.dimension != T.dimension:
        raise ValueError(f"set dimension {A.dimension} differs from map dimension {T.dimension}")
    return correlation_for_shifts(T, A, [p(n) for p in f.members], resolution, method, samples, seed)


def correlation_for_shifts(T, A: BoxSet, ms: Sequence[int], resolution: int = 8, method: str = "auto",
                           samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> CorrelationEstimate:
    shifts = tuple(sorted({0, *(int(m) for m in ms)}))
    if len(shifts) == 1 or not A.boxes:
        return CorrelationEstimate(float(A.measure), 0.0, "exact", shifts)
    d = T.dimension
    if method == "auto":
        method = "exact" if d <= 2 else "montecarlo"
    if method == "exact":
        if d == 1:
            return _exact_1d(T, A, shifts)
        if d == 2:
            return _exact_2d(T, A, shifts)
        raise ValueError("exact correlations are implemented for d <= 2 only")
    if method == "montecarlo":
        return _montecarlo(T, A, shifts, resolution, samples, seed)
    raise ValueError(f"unknown method {method!r}")


def _exact_1d(T, A, shifts):
    arcs = _arcs(A.projection(0))
    row = [-_frac(T.power(m)[1][0]) for m in shifts]
    val = float(arc_intersection_lengths([arcs] * len(shifts), np.array([row]))[0])
    return CorrelationEstimate(val, 0.0, "exact", shifts)


def _exact_2d(T, A, shifts):
    data = []
    for m in shifts:
        U, v = T.power(m)
        data.append((U[1][0], _frac(v[0]), _frac(v[1])))
    slopes = [a for a, _, _ in data]
    taus = np.array([tau for _, tau, _ in data])
    gammas = np.array([g for _, _, g in data])
    boxes = [((float(lo[0]), float(hi[0])), (float(lo[1]), float(hi[1]))) for lo, hi in A.boxes]
    full_t = all(t0 == 0.0 and t1 == 1.0 for (t0, t1), _ in boxes)
    if full_t:
        # the integrand depends on t only through g*t mod 1
        g = math.gcd(*slopes) or 1
        slopes = [a // g for a in slopes]
        taus = np.zeros_like(taus)
        cuts = np.array([0.0, 1.0])
    else:
        edges = np.array(sorted({e for (t0, t1), _ in boxes for e in (t0, t1)}))
        cuts = np.unique(np.concatenate([[0.0, 1.0], np.mod(edges[None, :] - taus[:, None], 1.0).ravel()]))
    slopes_arr = np.array(slopes, dtype=np.float64)
    total, n_pieces = 0.0, 0
    for u0, u1 in zip(cuts[:-1], cuts[1:]):
        if u1 - u0 <= 0:
            continue
        mid = 0.5 * (u0 + u1)
        arc_sets = []
        for k in range(len(shifts)):
            tk = (mid + taus[k]) % 1.0
            active = [s for (t0, t1), s in boxes if t0 <= tk < t1]
            arc_sets.append(_arcs(_merge_float(active)))
        if any(len(a) == 0 for a in arc_sets):
            continue
        pts = _crossings(arc_sets, slopes, gammas, u0, u1)
        pts = np.unique(np.concatenate([[u0, u1], pts]))
        mids = 0.5 * (pts[:-1] + pts[1:])
        widths = np.diff(pts)
        sh = -(mids[:, None] * slopes_arr[None, :] + gammas[None, :])
        vals = arc_intersection_lengths(arc_sets, np.mod(sh, 1.0))
        total += float(np.dot(vals, widths))
        n_pieces += len(mids)
    return CorrelationEstimate(total, 0.0, "exact-slice", shifts, extras={"pieces": n_pieces})


def _merge_float(intervals):
    out = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return out


def _crossings(arc_sets, slopes, gammas, u0, u1) -> np.ndarray:
    """All t in (u0, u1) where an endpoint of shifted set k meets one of set l."""
    pts = []
    count = 0
    ends = [np.unique(a.ravel()) for a in arc_sets]
    for k in range(len(arc_sets)):
        for l in range(k + 1, len(arc_sets)):
            D = slopes[l] - slopes[k]
            if D == 0:
                continue
            # (e_k - a_k t - g_k) = (e_l - a_l t - g_l) mod 1  <=>  D t = e_l - e_k + g_k - g_l mod 1
            r = (ends[l][None, :] - ends[k][:, None] + gammas[k] - gammas[l]).ravel()
            if D < 0:
                D, r = -D, -r
            jlo = np.ceil(D * u0 - r).astype(np.int64)
            jhi = np.ceil(D * u1 - r).astype(np.int64)
            cnt = np.maximum(jhi - jlo, 0)
            count += int(cnt.sum())
            if count > MAX_BREAKPOINTS:
                raise RuntimeError("too many breakpoints for exact slice integration; use Monte Carlo")
            if cnt.sum() == 0:
                continue
            base = np.repeat(r + jlo, cnt)
            offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
            pts.append((base + offs) / D)
    if not pts:
        return np.zeros(0)
    allp = np.concatenate(pts)
    return allp[(allp > u0) & (allp < u1)]


def _montecarlo(T, A, shifts, resolution, samples, seed):
    d = T.dimension
    rng = np.random.default_rng(seed)
    strata = resolution ** d
    per = max(2, -(-samples // strata))
    maps = []
    for m in shifts:
        U, v = T.power(m)
        maps.append((np.array(U, dtype=np.float64), np.array([_frac(x) for x in v])))
    cells = np.array(list(product(range(resolution), repeat=d)), dtype=np.float64)
    means, variances = np.empty(strata), np.empty(strata)
    block = max(1, _EVAL_BLOCK // per)
    for c0 in range(0, strata, block):
        cb = cells[c0:c0 + block]
        pts = (cb[:, None, :] + rng.random((len(cb), per, d))) / resolution
        flat = pts.reshape(-1, d)
        inside = np.ones(len(flat), dtype=bool)
        for U, v in maps:
            inside &= A.contains(np.mod(flat @ U.T + v, 1.0))
        vals = inside.reshape(len(cb), per).astype(np.float64)
        means[c0:c0 + len(cb)] = vals.mean(axis=1)
        variances[c0:c0 + len(cb)] = vals.var(axis=1, ddof=1)
    est = float(means.mean())
    stderr = float(math.sqrt(variances.sum() / per) / strata)
    return CorrelationEstimate(est, stderr, "montecarlo", shifts, samples=per * strata, seed=seed,
                               extras={"resolution": resolution})


__all__ = [
    "BoxSet", "CorrelationEstimate", "DEFAULT_SAMPLES", "DEFAULT_SEED", "arc_intersection_lengths",
    "box_correlation", "correlation_for_shifts",
]
