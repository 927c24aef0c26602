"""Phase-space reconstruction and selection of delay and dimension."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .signal import DataError, TimeSeries


@dataclass(frozen=True)
class EmbeddingParams:
    tau: int = 1
    dim: int = 1

    def __post_init__(self):
        if int(self.tau) != self.tau or self.tau < 1:
            raise ValueError(f"tau must be a positive integer, got {self.tau}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")

    @property
    def span(self) -> int:
        """Samples consumed by one delay vector beyond the first."""
        return (self.dim - 1) * self.tau


@dataclass(frozen=True)
class PhaseSpace:
    vectors: np.ndarray
    params: EmbeddingParams

    @property
    def m(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True)
class DistanceMatrix:
    d: np.ndarray

    @property
    def m(self) -> int:
        return self.d.shape[0]

    def off_band(self, theiler: int = 0) -> np.ndarray:
        """Upper-triangle distances with ``j - i >= max(theiler, 1)``.

        Each unordered pair appears once; the diagonal is only meaningful for
        ``theiler == 0`` and is handled by callers that need it.
        """
        k = max(int(theiler), 1)
        iu = np.triu_indices(self.m, k=k)
        return self.d[iu]


def _as_values(x) -> np.ndarray:
    return x.values if isinstance(x, TimeSeries) else np.asarray(x, dtype=float)


def embed(ts, params: EmbeddingParams) -> PhaseSpace:
    """Delay vectors ``(x_i, x_{i-tau}, ..., x_{i-(D-1)tau})`` in time order."""
    x = _as_values(ts)
    n = x.size
    if n <= params.span:
        raise DataError(
            f"series of length {n} too short for tau={params.tau}, dim={params.dim}"
        )
    m = n - params.span
    cols = [x[params.span - k * params.tau: params.span - k * params.tau + m]
            for k in range(params.dim)]
    return PhaseSpace(np.column_stack(cols), params)


def distance_matrix(ps: PhaseSpace | np.ndarray) -> DistanceMatrix:
    vectors = ps.vectors if isinstance(ps, PhaseSpace) else np.asarray(ps, dtype=float)
    if vectors.ndim == 1:
        vectors = vectors[:, None]
    if vectors.shape[0] < 2:
        raise DataError("need at least two phase-space vectors")
    return DistanceMatrix(squareform(pdist(vectors, "euclidean")))


@dataclass(frozen=True)
class MICurve:
    lags: np.ndarray
    mi: np.ndarray
    bins: int


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-np.sum(p * np.log(p)))


def mutual_information(ts, max_lag: int = 50, bins: int = 16) -> MICurve:
    """Histogram estimate (nats) of the MI between ``x_t`` and ``x_{t+k}``.

    Bin edges are equal-width over the range of the whole series and shared
    by both coordinates and all lags.
    """
    x = _as_values(ts)
    if bins < 2:
        raise ValueError("bins must be >= 2")
    if max_lag < 1 or x.size <= max_lag + 1:
        raise DataError(f"series of length {x.size} too short for max_lag={max_lag}")
    lo, hi = float(x.min()), float(x.max())
    if not hi > lo:
        raise DataError("mutual information undefined for a constant series")
    codes = np.minimum(((x - lo) / (hi - lo) * bins).astype(np.int64), bins - 1)
    lags = np.arange(1, max_lag + 1)
    mi = np.empty(max_lag)
    for idx, k in enumerate(lags):
        a, b = codes[:-k], codes[k:]
        joint = np.bincount(a * bins + b, minlength=bins * bins)
        h_a = _entropy(np.bincount(a, minlength=bins))
        h_b = _entropy(np.bincount(b, minlength=bins))
        mi[idx] = max(h_a + h_b - _entropy(joint), 0.0)
    return MICurve(lags, mi, bins)


def select_delay(curve: MICurve) -> int:
    """First strict local minimum of the MI curve, else the steepest drop.

    The value before lag 1 is treated as infinite, so lag 1 qualifies when
    it is lower than lag 2.
    """
    mi = np.asarray(curve.mi, dtype=float)
    lags = np.asarray(curve.lags)
    if mi.size < 3:
        raise ValueError("MI curve needs at least three lags")
    prev = np.concatenate([[np.inf], mi[:-2]])
    here, nxt = mi[:-1], mi[1:]
    minima = np.flatnonzero((here < prev) & (here < nxt))
    if minima.size:
        return int(lags[minima[0]])
    return int(lags[int(np.argmax(here - nxt))])


@dataclass(frozen=True)
class CaoCurves:
    dims: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    stochastic_flag: bool
    tau: int


class DimensionChoice(NamedTuple):
    dim: int
    stochastic_capped: bool


def cao_dimensions(ts, tau: int, d_max: int = 12, theiler: int | None = None,
                   e2_band: float = 0.05) -> CaoCurves:
    """Cao's E1/E2 curves for ``d = 1..d_max``.

    Delay vectors run forward in time and distances use the maximum norm.
    The nearest neighbour of each vector is taken at dimension ``d`` among
    vectors having a ``(d+1)``-th coordinate, ignoring exact duplicates and
    vectors closer than ``theiler`` samples in time (default ``tau``).
    ``theiler=0`` gives the unrestricted search.
    """
    x = _as_values(ts)
    n = x.size
    if tau < 1 or d_max < 1:
        raise ValueError("tau and d_max must be positive")
    # E(d) for d = 1..d_max+1, each needing a (d+1)-th coordinate
    if n - (d_max + 1) * tau < 3:
        raise DataError(f"series of length {n} too short for tau={tau}, d_max={d_max}")
    theiler = tau if theiler is None else int(theiler)
    n_pts = n - tau
    idx = np.arange(n_pts)
    band = np.abs(idx[:, None] - idx[None, :]) < theiler
    cheb = np.zeros((n_pts, n_pts))
    big_e = np.empty(d_max + 1)
    big_e_star = np.empty(d_max + 1)
    for d in range(1, d_max + 2):
        m = n - d * tau
        comp = x[(d - 1) * tau:(d - 1) * tau + n_pts]
        block = cheb[:m, :m]
        np.maximum(block, np.abs(comp[:m, None] - comp[None, :m]), out=block)
        dist = block.copy()
        dist[dist == 0] = np.inf
        dist[band[:m, :m]] = np.inf
        nn = np.argmin(dist, axis=1)
        near = dist[np.arange(m), nn]
        if not np.all(np.isfinite(near)):
            bad = int(np.flatnonzero(~np.isfinite(near))[0])
            raise DataError(f"all neighbours of vector {bad} coincide at dimension {d}")
        nxt = x[d * tau:d * tau + m]
        extra = np.abs(nxt - nxt[nn])
        big_e[d - 1] = np.mean(np.maximum(near, extra) / near)
        big_e_star[d - 1] = np.mean(extra)
    e1 = big_e[1:] / big_e[:-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        e2 = big_e_star[1:] / big_e_star[:-1]
    stochastic = bool(np.all(np.abs(e2 - 1.0) <= e2_band))
    return CaoCurves(np.arange(1, d_max + 1), e1, e2, stochastic, int(tau))


def select_dimension(curves: CaoCurves, saturation_tol: float = 0.05,
                     e1_floor: float = 0.90) -> DimensionChoice:
    """Smallest ``d`` where E1 has levelled off above ``e1_floor``.

    Falls back to the largest examined dimension, flagged as capped, when
    E1 never saturates or when E2 already marks the series as stochastic.
    """
    e1 = np.asarray(curves.e1, dtype=float)
    dims = np.asarray(curves.dims)
    if e1.size == 0:
        raise ValueError("empty Cao curves")
    if curves.stochastic_flag:
        return DimensionChoice(int(dims[-1]), True)
    for k in range(e1.size - 1):
        if abs(e1[k + 1] - e1[k]) < saturation_tol and e1[k] > e1_floor:
            return DimensionChoice(int(dims[k]), False)
    return DimensionChoice(int(dims[-1]), True)
