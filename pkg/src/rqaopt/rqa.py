"""Recurrence plots and the five line-based RQA measures."""

from __future__ import annotations

from dataclasses import astuple, dataclass
from pathlib import Path

import numba
import numpy as np

from .embedding import DistanceMatrix

RQA_FIELDS = ("rec", "det", "ent", "lam", "tt")


@dataclass(frozen=True)
class RecurrencePlot:
    r: np.ndarray
    epsilon: float
    theiler: int = 1

    @property
    def m(self) -> int:
        return self.r.shape[0]


@dataclass(frozen=True)
class LineHistogram:
    """Number of maximal lines per length; ``counts[l]`` for ``l >= 1``."""

    counts: dict[int, int]
    orientation: str

    def total_points(self, min_length: int = 1) -> int:
        return sum(l * c for l, c in self.counts.items() if l >= min_length)


@dataclass(frozen=True)
class RQAVector:
    rec: float
    det: float
    ent: float
    lam: float
    tt: float

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self))


def band_mask(m: int, theiler: int) -> np.ndarray:
    """True where ``|i - j| >= theiler``."""
    idx = np.arange(m)
    return np.abs(idx[:, None] - idx[None, :]) >= theiler


def n_off_band(m: int, theiler: int) -> int:
    """Cells of an ``m x m`` plot with ``|i - j| >= theiler``."""
    w = min(int(theiler), m)
    if w <= 0:
        return m * m
    inside = m + 2 * sum(m - k for k in range(1, w))
    return m * m - inside


def recurrence_plot(dm: DistanceMatrix, epsilon: float, theiler: int = 1) -> RecurrencePlot:
    """Threshold the distances (recurrent when ``d <= epsilon``) and blank
    the Theiler band ``|i - j| < theiler``."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    if theiler < 0:
        raise ValueError("theiler must be non-negative")
    r = dm.d <= epsilon
    if theiler > 0:
        r &= band_mask(dm.m, theiler)
    return RecurrencePlot(r, float(epsilon), int(theiler))


@numba.njit(cache=True)
def _scan_lines(r, theiler, include_loi):
    """One row-major pass collecting maximal diagonal and vertical runs.

    Returns the recurrent-cell count outside the band and two histograms
    indexed by line length.
    """
    m = r.shape[0]
    diag_hist = np.zeros(m + 1, np.int64)
    vert_hist = np.zeros(m + 1, np.int64)
    # diagonal j - i is stored at offset j - i + m - 1
    diag_run = np.zeros(2 * m - 1, np.int64)
    vert_run = np.zeros(m, np.int64)
    n_rec = 0
    for i in range(m):
        for j in range(m):
            k = j - i
            off = k if k >= 0 else -k
            hit = r[i, j] and off >= theiler
            if hit:
                n_rec += 1
                vert_run[j] += 1
                if k != 0 or include_loi:
                    diag_run[k + m - 1] += 1
            else:
                if vert_run[j] > 0:
                    vert_hist[vert_run[j]] += 1
                    vert_run[j] = 0
                if diag_run[k + m - 1] > 0:
                    diag_hist[diag_run[k + m - 1]] += 1
                    diag_run[k + m - 1] = 0
    for j in range(m):
        if vert_run[j] > 0:
            vert_hist[vert_run[j]] += 1
    for d in range(2 * m - 1):
        if diag_run[d] > 0:
            diag_hist[diag_run[d]] += 1
    return n_rec, diag_hist, vert_hist


@numba.njit(cache=True)
def _scan_symmetric(dm, epsilon, theiler):
    """``_scan_lines`` for the plot ``dm <= epsilon`` without building it.

    Uses symmetry: only the upper triangle is visited, where diagonals are
    counted twice (the main diagonal once) and vertical runs of the full
    plot are the column runs above the band plus row runs right of it.
    Requires ``theiler >= 1`` so no run crosses the main diagonal.
    """
    m = dm.shape[0]
    diag_hist = np.zeros(m + 1, np.int64)
    vert_hist = np.zeros(m + 1, np.int64)
    diag_run = np.zeros(m, np.int64)
    col_run = np.zeros(m, np.int64)
    n_upper = 0
    for i in range(m):
        row_run = 0
        for j in range(i + theiler, m):
            k = j - i
            if dm[i, j] <= epsilon:
                n_upper += 1
                col_run[j] += 1
                diag_run[k] += 1
                row_run += 1
            else:
                if col_run[j] > 0:
                    vert_hist[col_run[j]] += 1
                    col_run[j] = 0
                if diag_run[k] > 0:
                    diag_hist[diag_run[k]] += 2
                    diag_run[k] = 0
                if row_run > 0:
                    vert_hist[row_run] += 1
                    row_run = 0
        if row_run > 0:
            vert_hist[row_run] += 1
        # row i is the last one reaching column i + theiler
        j = i + theiler
        if j < m and col_run[j] > 0:
            vert_hist[col_run[j]] += 1
            col_run[j] = 0
    for j in range(m):
        if col_run[j] > 0:
            vert_hist[col_run[j]] += 1
    for k in range(m):
        if diag_run[k] > 0:
            diag_hist[diag_run[k]] += 2
    return 2 * n_upper, diag_hist, vert_hist


def _to_dict(hist: np.ndarray) -> dict[int, int]:
    return {int(l): int(hist[l]) for l in np.flatnonzero(hist)}


def line_histogram(rp: RecurrencePlot, orientation: str = "diagonal",
                   include_loi: bool = False) -> LineHistogram:
    """Histogram of maximal diagonal or vertical runs of recurrent points.

    The main diagonal contributes diagonal lines only when ``include_loi``
    is set and the plot has no Theiler band.
    """
    if orientation not in ("diagonal", "vertical"):
        raise ValueError(f"unknown orientation {orientation!r}")
    _, diag, vert = _scan_lines(np.ascontiguousarray(rp.r, dtype=np.bool_),
                                rp.theiler, include_loi and rp.theiler == 0)
    return LineHistogram(_to_dict(diag if orientation == "diagonal" else vert),
                         orientation)


def _measures(n_rec, diag_hist, vert_hist, n_cells, l_min, v_min) -> RQAVector:
    if n_rec == 0 or n_cells == 0:
        return RQAVector(0.0, 0.0, 0.0, 0.0, 0.0)
    lengths = np.arange(diag_hist.size)
    rec = 100.0 * n_rec / n_cells
    dl = diag_hist[l_min:]
    on_diag = int(np.dot(lengths[l_min:], dl))
    det = 100.0 * on_diag / n_rec
    n_lines = int(dl.sum())
    ent = 0.0
    if n_lines > 0:
        p = dl[dl > 0] / n_lines
        ent = float(-np.sum(p * np.log(p))) + 0.0
    vl = vert_hist[v_min:]
    on_vert = int(np.dot(lengths[v_min:], vl))
    lam = 100.0 * on_vert / n_rec
    n_vert = int(vl.sum())
    tt = on_vert / n_vert if n_vert else 0.0
    return RQAVector(rec, det, ent, lam, float(tt))


def rqa_variables(rp: RecurrencePlot, dm: DistanceMatrix | None = None,
                  l_min: int = 2, v_min: int = 2) -> RQAVector:
    """REC, DET, ENT, LAM and TT of a recurrence plot.

    Percentages are relative to the cells outside the Theiler band (REC) or
    to the recurrent points (DET, LAM). ENT is in nats; TT in samples.
    """
    if dm is not None and dm.m != rp.m:
        raise ValueError(f"plot size {rp.m} != distance matrix size {dm.m}")
    if l_min < 1 or v_min < 1:
        raise ValueError("minimum line lengths must be >= 1")
    n_rec, diag, vert = _scan_lines(np.ascontiguousarray(rp.r, dtype=np.bool_),
                                    rp.theiler, rp.theiler == 0)
    return _measures(n_rec, diag, vert, n_off_band(rp.m, rp.theiler), l_min, v_min)


def rqa_at(dm: DistanceMatrix, epsilon: float, theiler: int = 1,
           l_min: int = 2, v_min: int = 2) -> RQAVector:
    """``rqa_variables(recurrence_plot(dm, epsilon, theiler))`` without
    materialising the plot when the band allows it."""
    if theiler >= 1:
        n_rec, diag, vert = _scan_symmetric(dm.d, float(epsilon), int(theiler))
        return _measures(n_rec, diag, vert, n_off_band(dm.m, theiler), l_min, v_min)
    return rqa_variables(recurrence_plot(dm, epsilon, theiler), dm, l_min, v_min)


def rqa_curve(dm: DistanceMatrix, radii, theiler: int = 1,
              l_min: int = 2, v_min: int = 2) -> np.ndarray:
    """RQA vectors at each radius, shape ``(len(radii), 5)``."""
    return np.array([rqa_at(dm, eps, theiler, l_min, v_min).as_array() for eps in radii])


def recurrence_rate(dm: DistanceMatrix, epsilon: float, theiler: int = 1) -> float:
    """REC (percent) alone, by direct counting."""
    m = dm.m
    cells = n_off_band(m, theiler)
    if cells == 0:
        return 0.0
    if theiler >= 1:
        hits = 2 * int(np.count_nonzero(dm.off_band(theiler) <= epsilon))
    else:
        hits = int(np.count_nonzero(dm.d <= epsilon))
    return 100.0 * hits / cells


def write_coordinates(rp: RecurrencePlot, path: str | Path):
    """Recurrent cells as ``i,j`` rows."""
    ii, jj = np.nonzero(rp.r)
    with Path(path).open("w", newline="") as fh:
        fh.write("i,j\n")
        for i, j in zip(ii.tolist(), jj.tolist()):
            fh.write(f"{i},{j}\n")


def write_pbm(rp: RecurrencePlot, path: str | Path):
    """Plain (P1) PBM bitmap; black pixels are recurrences, row 0 on top."""
    m = rp.m
    with Path(path).open("w") as fh:
        fh.write(f"P1\n{m} {m}\n")
        for row in rp.r:
            fh.write(" ".join("1" if v else "0" for v in row))
            fh.write("\n")
