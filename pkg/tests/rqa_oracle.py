"""Exhaustive run enumeration used as an independent RQA reference."""

import math
from collections import Counter
from fractions import Fraction


def _runs(cells):
    """Lengths of maximal runs of truthy entries in a sequence."""
    out, cur = [], 0
    for c in cells:
        if c:
            cur += 1
        elif cur:
            out.append(cur)
            cur = 0
    if cur:
        out.append(cur)
    return out


def effective(r, theiler):
    m = len(r)
    return [[bool(r[i][j]) and abs(i - j) >= theiler for j in range(m)] for i in range(m)]


def diagonal_runs(r):
    m = len(r)
    lengths = []
    for k in range(-(m - 1), m):
        lengths += _runs(r[i][i + k] for i in range(m) if 0 <= i + k < m)
    return Counter(lengths)


def vertical_runs(r):
    m = len(r)
    lengths = []
    for j in range(m):
        lengths += _runs(r[i][j] for i in range(m))
    return Counter(lengths)


def oracle_rqa(r, theiler, l_min=2, v_min=2):
    """(REC, DET, ENT, LAM, TT); rational components returned as Fractions."""
    m = len(r)
    eff = effective(r, theiler)
    cells = sum(1 for i in range(m) for j in range(m) if abs(i - j) >= theiler)
    n_rec = sum(map(sum, eff))
    if n_rec == 0 or cells == 0:
        return (Fraction(0),) * 5
    diag, vert = diagonal_runs(eff), vertical_runs(eff)
    long_d = {l: c for l, c in diag.items() if l >= l_min}
    long_v = {l: c for l, c in vert.items() if l >= v_min}
    rec = Fraction(100 * n_rec, cells)
    det = Fraction(100 * sum(l * c for l, c in long_d.items()), n_rec)
    total = sum(long_d.values())
    ent = -sum(c / total * math.log(c / total) for c in long_d.values()) if total else 0.0
    lam = Fraction(100 * sum(l * c for l, c in long_v.items()), n_rec)
    n_v = sum(long_v.values())
    tt = Fraction(sum(l * c for l, c in long_v.items()), n_v) if n_v else Fraction(0)
    return rec, det, ent, lam, tt
