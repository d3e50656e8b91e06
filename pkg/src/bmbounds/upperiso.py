"""The explicit block isomorphism pair and its operator norms.

A parameter t in [3, 4] fixes two 3x3 matrices: M couples the three limit
values into the head coordinates, C couples level m of the domain into
output block m.  Every output coordinate depends on at most six inputs,
and the tail blocks repeat identically for every level, so the operator
norms over the infinite index set reduce to row l1-norms of six distinct
rows per direction.  All computations are exact when t is a Fraction and
run at 40 significant digits when t is a float/mpf.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath as mp

PRECISION_DPS = 40

# Default level count for function-level experiments; norms are independent
# of it because the tail coefficients repeat at every level.
DEFAULT_TRUNCATION = 64

Matrix = tuple[tuple, ...]


class IsoDomainError(ValueError):
    """t outside [3, 4] or a structural denominator vanished."""


class ShapeError(ValueError):
    """Mismatched truncation shapes."""


def _mat_vec(m: Matrix, v: Sequence) -> tuple:
    return tuple(sum(m[i][j] * v[j] for j in range(len(v))) for i in range(len(m)))


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


def _mat_inverse(m: Matrix) -> Matrix:
    """Gauss-Jordan inverse, generic over exact and high-precision scalars."""
    n = len(m)
    aug = [list(row) + [0] * n for row in m]
    for i in range(n):
        aug[i][n + i] = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise IsoDomainError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        scale = aug[col][col]
        aug[col] = [x / scale for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def _row_l1(row: Sequence):
    return sum(abs(x) for x in row)


@dataclass(frozen=True)
class IsoMatrices:
    """All coefficient blocks of the pair (T, S) at one parameter value."""

    t: object
    M: Matrix
    C: Matrix
    M3: tuple
    Minv: Matrix
    Cinv: Matrix
    tail_block: Matrix      # 3x6: [C | M' - C] acting on (f(m,.), f(omega,.))
    s_tail_block: Matrix    # 3x6: coefficients of Sg(m,.) on (g(3m..3m+2), g(1), g(2), g(omega))


def build_matrices(t) -> IsoMatrices:
    """Populate every block at t; exact inverse when t is rational.

    Guards: 3 <= t <= 4 and the quartic/cubic denominators of the inverse
    must not vanish (they are negative on the whole interval).
    """
    exact = isinstance(t, (Fraction, int))
    t = Fraction(t) if exact else mp.mpf(t)
    if not (3 <= t <= 4):
        raise IsoDomainError(f"parameter must satisfy 3 <= t <= 4, got {t}")
    d1 = t**4 - 7 * t**3 + 12 * t**2 - 8 * t + 8
    d2 = t**3 - 5 * t**2 + 2 * t - 4
    for name, value in (("t", t), ("t+1", t + 1),
                        ("t^4-7t^3+12t^2-8t+8", d1), ("t^3-5t^2+2t-4", d2)):
        if value == 0:
            raise IsoDomainError(f"denominator {name} vanishes at t = {t}")
    q = -(t**2 - 5 * t + 2) / 4
    M = (
        (t - 2, -1 + t * 0, -1 + t * 0),
        (t * 0, t / 2, -t / 2),
        ((t - 2) / t, q, q),
    )
    c0 = 2 * t / (t + 1)
    c1 = (t**2 - t + 2) / (2 * t)
    zero = t * 0
    C = ((c0, zero, zero), (zero, c1, zero), (zero, zero, c1))
    M3 = M[2]
    Minv = _mat_inverse(M)
    Cinv = ((1 / c0, zero, zero), (zero, 1 / c1, zero), (zero, zero, 1 / c1))
    tail = []
    for i in range(3):
        left = [zero, zero, zero]
        left[i] = C[i][i]
        right = [M3[j] - C[i][j] for j in range(3)]
        tail.append(tuple(left + right))
    # W = (M' - C) Minv; row i of the S tail couples g(3m+i) and the head values.
    Mprime = (M3, M3, M3)
    W = _mat_mul(tuple(tuple(Mprime[i][j] - C[i][j] for j in range(3)) for i in range(3)), Minv)
    s_tail = []
    for i in range(3):
        left = [zero, zero, zero]
        left[i] = Cinv[i][i]
        right = [-Cinv[i][i] * W[i][j] for j in range(3)]
        s_tail.append(tuple(left + right))
    return IsoMatrices(t, M, C, M3, Minv, Cinv, tuple(tail), tuple(s_tail))


def inverse_closed_form(t) -> Matrix:
    """The algebraic closed form of M^{-1}, kept as an independent cross-check."""
    exact = isinstance(t, (Fraction, int))
    t = Fraction(t) if exact else mp.mpf(t)
    d1 = t**4 - 7 * t**3 + 12 * t**2 - 8 * t + 8
    d2 = t**3 - 5 * t**2 + 2 * t - 4
    if d1 == 0 or d2 == 0:
        raise IsoDomainError("closed-form denominator vanishes")
    zero = t * 0
    return (
        (t * (t**2 - 5 * t + 2) / d1, zero, -4 * t / d1),
        (2 / d2, 1 / t, -2 * t / d2),
        (2 / d2, -1 / t, -2 * t / d2),
    )


# ---------------------------------------------------------------------------
# Function-level application
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncatedFunction:
    """A function on N levels of three tails plus the three limit values."""

    rows: tuple[tuple, ...]   # rows[r] = values at level r+1, one per tail
    limit: tuple              # values at the three limit points

    def __post_init__(self):
        if len(self.rows) < 1:
            raise ShapeError("truncation length must be at least 1")
        if any(len(r) != 3 for r in self.rows) or len(self.limit) != 3:
            raise ShapeError("rows and limit must have width 3")

    @property
    def n_levels(self) -> int:
        return len(self.rows)

    def sup_norm(self):
        return max(
            max(abs(x) for x in self.limit),
            max(abs(x) for row in self.rows for x in row),
        )


@dataclass(frozen=True)
class TransformedSequence:
    """The image Tf: two head values, N tail triples, and the limit value."""

    head: tuple               # (Tf(1), Tf(2))
    tail: tuple[tuple, ...]   # tail[r] = (Tf(3m), Tf(3m+1), Tf(3m+2)) at m = r+1
    omega: object

    def sup_norm(self):
        return max(
            max(abs(x) for x in self.head),
            abs(self.omega),
            max(abs(x) for row in self.tail for x in row),
        )


def apply_T(f: TruncatedFunction, mats: IsoMatrices) -> TransformedSequence:
    head_all = _mat_vec(mats.M, f.limit)
    shift = _mat_vec(
        tuple(tuple(mats.M3[j] - mats.C[i][j] for j in range(3)) for i in range(3)),
        f.limit,
    )
    tail = []
    for row in f.rows:
        tail.append(tuple(mats.C[i][i] * row[i] + shift[i] for i in range(3)))
    return TransformedSequence((head_all[0], head_all[1]), tuple(tail), head_all[2])


def apply_S(g: TransformedSequence, mats: IsoMatrices) -> TruncatedFunction:
    if len(g.tail) < 1:
        raise ShapeError("transformed sequence has no tail levels")
    head_vec = (g.head[0], g.head[1], g.omega)
    limit = _mat_vec(mats.Minv, head_vec)
    shift = _mat_vec(
        tuple(tuple(mats.M3[j] - mats.C[i][j] for j in range(3)) for i in range(3)),
        limit,
    )
    rows = []
    for triple in g.tail:
        rows.append(tuple((triple[i] - shift[i]) * mats.Cinv[i][i] for i in range(3)))
    return TruncatedFunction(tuple(rows), limit)


# ---------------------------------------------------------------------------
# Operator norms and distortion
# ---------------------------------------------------------------------------

_T_ROW_IDS = ("M:0", "M:1", "M:2", "tail:0", "tail:1", "tail:2")
_S_ROW_IDS = ("Minv:0", "Minv:1", "Minv:2", "stail:0", "stail:1", "stail:2")


def _norm_rows_T(mats: IsoMatrices) -> list:
    return [_row_l1(r) for r in mats.M] + [_row_l1(r) for r in mats.tail_block]


def _norm_rows_S(mats: IsoMatrices) -> list:
    return [_row_l1(r) for r in mats.Minv] + [_row_l1(r) for r in mats.s_tail_block]


def operator_norm_T(t, mats: IsoMatrices | None = None):
    """sup over output coordinates of the coefficient-row l1 norm."""
    mats = build_matrices(t) if mats is None else mats
    rows = _norm_rows_T(mats)
    best = max(range(6), key=lambda i: rows[i])
    return rows[best], _T_ROW_IDS[best]


def operator_norm_S(t, mats: IsoMatrices | None = None):
    mats = build_matrices(t) if mats is None else mats
    rows = _norm_rows_S(mats)
    best = max(range(6), key=lambda i: rows[i])
    return rows[best], _S_ROW_IDS[best]


@dataclass(frozen=True)
class NormReport:
    t: object
    norm_t: object
    norm_s: object
    distortion: object
    argmax_t: str
    argmax_s: str


def norm_report(t) -> NormReport:
    mats = build_matrices(t)
    nt, at = operator_norm_T(t, mats)
    ns, as_ = operator_norm_S(t, mats)
    return NormReport(mats.t, nt, ns, nt * ns, at, as_)


def sign_pattern_input(mats: IsoMatrices, row_id: str, n_levels: int = 1) -> TruncatedFunction:
    """A sup-norm-one input whose image attains the given coefficient row."""
    def sgn(x):
        return 1 if x > 0 else (-1 if x < 0 else 0)

    kind, idx = row_id.split(":")
    i = int(idx)
    if kind == "M":
        limit = tuple(sgn(x) for x in mats.M[i])
        rows = tuple((0, 0, 0) for _ in range(n_levels))
        if all(v == 0 for v in limit):
            raise ShapeError("zero row cannot be attained")
        return TruncatedFunction(rows, limit)
    if kind == "tail":
        limit = tuple(sgn(mats.M3[j] - mats.C[i][j]) for j in range(3))
        level = [0, 0, 0]
        level[i] = sgn(mats.C[i][i])
        rows = tuple(tuple(level) for _ in range(n_levels))
        return TruncatedFunction(rows, limit)
    raise ShapeError(f"unknown row id {row_id!r}")


def scan_distortion(lo: Fraction, hi: Fraction, step: Fraction) -> list[tuple]:
    """Exact (t, normT, normS, distortion) rows on a rational grid."""
    lo, hi, step = Fraction(lo), Fraction(hi), Fraction(step)
    if step <= 0 or lo > hi:
        raise IsoDomainError("scan needs lo <= hi and step > 0")
    out = []
    t = lo
    while t <= hi:
        mats = build_matrices(t)
        nt, _ = operator_norm_T(t, mats)
        ns, _ = operator_norm_S(t, mats)
        out.append((t, nt, ns, nt * ns))
        t += step
    return out


def optimize_distortion(lo=3, hi=4, tol="1e-12") -> tuple[mp.mpf, NormReport]:
    """Minimize normT(t)*normS(t) over [lo, hi] by grid plus golden section."""
    with mp.workdps(PRECISION_DPS):
        lo = mp.mpf(lo)
        hi = mp.mpf(hi)
        tol = mp.mpf(tol)
        if not (3 <= lo <= hi <= 4):
            raise IsoDomainError("optimization interval must stay inside [3, 4]")
        if lo == hi:
            return lo, norm_report(lo)

        def value(t):
            mats = build_matrices(t)
            return max(_norm_rows_T(mats)) * max(_norm_rows_S(mats))

        # Coarse grid to bracket the minimizer.
        ngrid = 64
        xs = [lo + (hi - lo) * k / ngrid for k in range(ngrid + 1)]
        vals = [value(x) for x in xs]
        k = min(range(ngrid + 1), key=lambda i: vals[i])
        a = xs[max(k - 1, 0)]
        b = xs[min(k + 1, ngrid)]

        invphi = (mp.sqrt(5) - 1) / 2
        x1 = b - invphi * (b - a)
        x2 = a + invphi * (b - a)
        f1, f2 = value(x1), value(x2)
        best_x, best_f = min(
            ((xs[k], vals[k]), (x1, f1), (x2, f2)), key=lambda p: p[1]
        )
        while b - a > tol:
            if f1 <= f2:
                b, x2, f2 = x2, x1, f1
                x1 = b - invphi * (b - a)
                f1 = value(x1)
            else:
                a, x1, f1 = x1, x2, f2
                x2 = a + invphi * (b - a)
                f2 = value(x2)
            if f1 < best_f:
                best_x, best_f = x1, f1
            if f2 < best_f:
                best_x, best_f = x2, f2
        return best_x, norm_report(best_x)


@dataclass(frozen=True)
class CubicFormulaReport:
    """Both readings of the closed-form minimizer and which one the optimizer confirms."""

    printed: mp.mpf
    corrected: mp.mpf
    optimizer_t: mp.mpf
    matching: str

    @property
    def consistent(self) -> bool:
        return self.matching in ("printed", "corrected")


def cubic_formula_value(tol="1e-4") -> CubicFormulaReport:
    """Evaluate the closed-form expression as printed and sign-corrected.

    The printed expression repeats the radicand 73 - 6*sqrt(87) under both
    cube roots; the corrected variant flips the second sign.  The report
    flags whichever lies within tol of the numeric distortion minimizer.
    """
    with mp.workdps(PRECISION_DPS):
        tol = mp.mpf(tol)
        root87 = mp.sqrt(87)
        printed = (4 + 2 * mp.cbrt(73 - 6 * root87)) / 3
        corrected = (4 + mp.cbrt(73 - 6 * root87) + mp.cbrt(73 + 6 * root87)) / 3
        t_star, _ = optimize_distortion()
        if abs(corrected - t_star) <= tol and abs(printed - t_star) > tol:
            matching = "corrected"
        elif abs(printed - t_star) <= tol and abs(corrected - t_star) > tol:
            matching = "printed"
        else:
            matching = "ambiguous"
        return CubicFormulaReport(printed, corrected, t_star, matching)
