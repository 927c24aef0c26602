"""Surrogates, the REC-indexed radius grid, rule-of-thumb radii and the
two surrogate-discrimination radius optimisers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embedding import DistanceMatrix, EmbeddingParams, distance_matrix, embed
from .rqa import RQA_FIELDS, rqa_curve
from .signal import DataError, TimeSeries


class DegenerateError(ArithmeticError):
    """Raised when an input leaves nothing to optimise over."""


@dataclass(frozen=True)
class SurrogateSpec:
    alpha: float = 0.2
    seed: int = 0
    count: int = 10

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.count < 1:
            raise ValueError("count must be >= 1")


@dataclass(frozen=True)
class SegmentPlan:
    n_segments: int = 20
    segment_length: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n_segments < 2:
            raise ValueError("need at least two segments")

    def length_for(self, n: int) -> int:
        return self.segment_length if self.segment_length else min(500, n // 4)


@dataclass(frozen=True)
class RadiusGrid:
    rec_targets: np.ndarray
    radii: np.ndarray
    theiler: int


@dataclass
class SweepResult:
    method: int
    grid: RadiusGrid
    objective: np.ndarray
    epsilon_star: float
    rec_star: float
    index_star: int
    rule_markers: dict[str, float]
    degenerate: bool = False
    notes: list[str] = field(default_factory=list)
    # per-radius diagnostics, method dependent
    curves: dict[str, np.ndarray] = field(default_factory=dict)


def _values(ts) -> np.ndarray:
    return ts.values if isinstance(ts, TimeSeries) else np.asarray(ts, dtype=float)


def make_surrogate(ts, spec: SurrogateSpec, rng: np.random.Generator | None = None):
    """Additive white-noise surrogate ``x + N(0, alpha * std(x))``.

    ``rng`` overrides the generator seeded from ``spec.seed``. The return
    type follows the input (``TimeSeries`` in, ``TimeSeries`` out).
    """
    x = _values(ts)
    if x.size == 0:
        raise DataError("series is empty")
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    scale = spec.alpha * float(np.std(x))
    noise = rng.standard_normal(x.size)
    out = x + scale * noise if scale > 0 else x.copy()
    return ts.with_values(out) if isinstance(ts, TimeSeries) else out


def _grid_distances(dm: DistanceMatrix, theiler: int) -> np.ndarray:
    """Distances of every cell outside the band, each ordered pair once per
    matrix cell up to the shared factor two."""
    upper = dm.off_band(theiler)
    if theiler == 0:
        # full-matrix multiset: both triangles plus the zero diagonal
        return np.concatenate([upper, upper, np.zeros(dm.m)])
    return upper


def build_radius_grid(dm: DistanceMatrix, theiler: int = 1,
                      step_pct: float = 0.5) -> RadiusGrid:
    """Radii at the REC targets ``0, step, ..., 100`` percent.

    Each radius is the matching percentile (linear interpolation) of the
    off-band distances; the 0 % radius is pinned to zero.
    """
    if not 0 < step_pct <= 100:
        raise ValueError("step_pct must be in (0, 100]")
    n_steps = int(round(100.0 / step_pct))
    if not np.isclose(n_steps * step_pct, 100.0):
        raise ValueError(f"step_pct {step_pct} does not divide 100")
    dist = _grid_distances(dm, theiler)
    if dist.size == 0:
        raise DegenerateError("no distances outside the Theiler band")
    if np.all(dist == dist[0]):
        raise DegenerateError("all off-band distances are identical")
    targets = np.arange(n_steps + 1) * step_pct
    radii = np.percentile(dist, targets)
    radii[0] = 0.0
    radii = np.maximum.accumulate(radii)
    return RadiusGrid(targets, radii, int(theiler))


def rules_of_thumb(ts, dm: DistanceMatrix, theiler: int = 1) -> dict[str, float]:
    """The four conventional radii used as reference markers."""
    dist = _grid_distances(dm, theiler)
    x = _values(ts)
    if dist.size == 0:
        return {"rec1pct": 0.0, "sigma01": 0.1 * float(np.std(x)),
                "max10": 0.0, "mean10": 0.0}
    return {
        "rec1pct": float(np.percentile(dist, 1.0)),
        "sigma01": 0.1 * float(np.std(x)),
        "max10": 0.1 * float(np.max(dist)),
        "mean10": 0.1 * float(np.mean(dist)),
    }


def minmax(values: np.ndarray) -> tuple[np.ndarray, bool]:
    """Rescale to [0, 1]; constant input maps to zeros and reports True."""
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        return np.zeros_like(values, dtype=float), True
    return (values - lo) / (hi - lo), False


def cluster_scores(original: np.ndarray, surrogate: np.ndarray) -> tuple[float, float]:
    """Inertia and centroid separation of two labelled point clouds.

    Inertia sums, over every point of both clouds, the Euclidean distance to
    the nearer of the two centroids.
    """
    mu1 = original.mean(axis=0)
    mu2 = surrogate.mean(axis=0)
    pts = np.vstack([original, surrogate])
    d1 = np.linalg.norm(pts - mu1, axis=1)
    d2 = np.linalg.norm(pts - mu2, axis=1)
    inertia = float(np.sum(np.minimum(d1, d2)))
    return inertia, float(np.linalg.norm(mu1 - mu2))


def _standardizer(stack: np.ndarray) -> np.ndarray:
    """Per-variable scale pooled over every point of a sweep."""
    flat = stack.reshape(-1, stack.shape[-1])
    scale = flat.std(axis=0)
    scale[scale == 0] = 1.0
    return scale


def segment_starts(n: int, plan: SegmentPlan, params: EmbeddingParams) -> tuple[np.ndarray, int]:
    length = plan.length_for(n)
    if length - params.span < 2:
        raise DataError(
            f"segment length {length} too short for tau={params.tau}, dim={params.dim}"
        )
    if length > n:
        raise DataError(f"segment length {length} exceeds series length {n}")
    rng = np.random.default_rng(plan.seed)
    starts = rng.integers(0, n - length + 1, size=plan.n_segments)
    return starts, length


def _argbest(objective: np.ndarray, maximise: bool) -> int:
    # np.argmin/argmax return the first optimum, i.e. the smallest radius
    return int(np.argmax(objective) if maximise else np.argmin(objective))


def method1(ts, params: EmbeddingParams, spec: SurrogateSpec, plan: SegmentPlan,
            grid: RadiusGrid, l_min: int = 2, v_min: int = 2, theiler: int = 1,
            standardize: bool = True, rule_markers: dict | None = None) -> SweepResult:
    """Clustering criterion: minimise normalised inertia minus normalised
    centroid separation of segment RQA vectors, original vs surrogate.

    The same segment positions are used for the original and for a single
    surrogate realisation, at every radius of ``grid``. With ``standardize``
    each RQA variable is divided by its spread over all points of the sweep
    before distances are taken; otherwise raw units are used.
    """
    x = _values(ts)
    sur = make_surrogate(x, spec)
    starts, length = segment_starts(x.size, plan, params)
    radii = grid.radii

    def segment_q(series):
        out = []
        for s in starts:
            seg = series[s:s + length]
            dm = distance_matrix(embed(seg, params))
            out.append(rqa_curve(dm, radii, theiler, l_min, v_min))
        return np.stack(out, axis=1)  # (n_radii, n_segments, 5)

    q_or = segment_q(x)
    q_su = segment_q(sur)
    if np.all(q_or == q_or[0, 0]) and np.all(q_su == q_or[0, 0]):
        raise DegenerateError("all segment RQA vectors are identical at every radius")
    if standardize:
        scale = _standardizer(np.concatenate([q_or, q_su], axis=1))
        q_or, q_su = q_or / scale, q_su / scale

    inertia = np.empty(radii.size)
    sep = np.empty(radii.size)
    for k in range(radii.size):
        inertia[k], sep[k] = cluster_scores(q_or[k], q_su[k])
    i_hat, i_flat = minmax(inertia)
    d_hat, d_flat = minmax(sep)
    objective = i_hat - d_hat
    notes = []
    if i_flat:
        notes.append("inertia is constant over the sweep")
    if d_flat:
        notes.append("centroid separation is constant over the sweep")
    degenerate = bool(np.all(sep == 0))
    if degenerate:
        notes.append("surrogate indistinguishable from original at every radius")
    # radii where every segment vector coincides (e.g. zero radius) say nothing
    informative = ~np.all(np.concatenate([q_or, q_su], axis=1) == q_or[:, :1], axis=(1, 2))
    k = _argbest(np.where(informative, objective, np.inf), maximise=False) \
        if informative.any() else 0
    return SweepResult(
        method=1, grid=grid, objective=objective, epsilon_star=float(radii[k]),
        rec_star=float(grid.rec_targets[k]), index_star=k,
        rule_markers=dict(rule_markers or {}), degenerate=degenerate, notes=notes,
        curves={"inertia": inertia, "dc": sep},
    )


def surrogate_seeds(spec: SurrogateSpec) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(spec.seed).spawn(spec.count)


def method2(ts, params: EmbeddingParams, spec: SurrogateSpec, grid: RadiusGrid,
            l_min: int = 2, v_min: int = 2, theiler: int = 1,
            standardize: bool = True, rule_markers: dict | None = None,
            dm: DistanceMatrix | None = None) -> SweepResult:
    """Distance criterion: maximise the Euclidean distance between the RQA
    vector of the whole signal and the mean over surrogate realisations."""
    x = _values(ts)
    radii = grid.radii
    if dm is None:
        dm = distance_matrix(embed(x, params))
    q_or = rqa_curve(dm, radii, theiler, l_min, v_min)
    del dm
    first, offset = None, np.zeros_like(q_or)
    for seq in surrogate_seeds(spec):
        sur = make_surrogate(x, spec, np.random.default_rng(seq))
        q = rqa_curve(distance_matrix(embed(sur, params)), radii, theiler, l_min, v_min)
        if first is None:
            first = q
        else:
            offset += q - first
    # mean as first + mean offset: exact when all realisations coincide
    q_su = first + offset / spec.count
    if np.all(q_or == q_or[0]) and np.all(q_su == q_or[0]):
        raise DegenerateError("RQA vectors are identical at every radius")
    if standardize:
        scale = _standardizer(np.concatenate([q_or[:, None], q_su[:, None]], axis=1))
        q_or_s, q_su_s = q_or / scale, q_su / scale
    else:
        q_or_s, q_su_s = q_or, q_su
    objective = np.linalg.norm(q_or_s - q_su_s, axis=1)
    degenerate = bool(np.all(objective == 0))
    notes = ["surrogate indistinguishable from original at every radius"] if degenerate else []
    k = _argbest(objective, maximise=True)
    curves = {f"{name}_or": q_or[:, c] for c, name in enumerate(RQA_FIELDS)}
    curves.update({f"{name}_su": q_su[:, c] for c, name in enumerate(RQA_FIELDS)})
    return SweepResult(
        method=2, grid=grid, objective=objective, epsilon_star=float(radii[k]),
        rec_star=float(grid.rec_targets[k]), index_star=k,
        rule_markers=dict(rule_markers or {}), degenerate=degenerate, notes=notes,
        curves=curves,
    )
