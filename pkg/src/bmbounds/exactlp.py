"""Exact feasibility decisions for rational linear-inequality systems.

The primary decision procedure is Fourier-Motzkin elimination carried out
in exact rational arithmetic.  Every derived row keeps the nonnegative
multiplier combination of the original rows that produced it, so an
infeasible run yields a ready-made Farkas certificate and a feasible run
yields a witness point by back-substitution.  An exact phase-1 simplex
(Bland's rule) and brute-force vertex enumeration provide independent
cross-check paths; all three must agree.

No floating point is used anywhere in this module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)

LE = "<="
GE = ">="


class SystemError_(ValueError):
    """Malformed system or certificate input."""


@dataclass(frozen=True)
class LinearInequality:
    """A single inequality  sum(coeffs[v] * v) REL rhs  with REL in {<=, >=}."""

    coeffs: Mapping[str, Fraction]
    relation: str
    rhs: Fraction
    label: str

    def __post_init__(self):
        if self.relation not in (LE, GE):
            raise SystemError_(f"unknown relation {self.relation!r} in {self.label!r}")
        if not self.label:
            raise SystemError_("inequality label must be nonempty")
        object.__setattr__(self, "coeffs", {k: Fraction(v) for k, v in self.coeffs.items()})
        object.__setattr__(self, "rhs", Fraction(self.rhs))

    def scaled(self, factor: Fraction) -> "LinearInequality":
        """Multiply both sides by a positive rational (relation unchanged)."""
        factor = Fraction(factor)
        if factor <= 0:
            raise SystemError_("scaling factor must be positive")
        return LinearInequality(
            {v: c * factor for v, c in self.coeffs.items()},
            self.relation,
            self.rhs * factor,
            self.label,
        )

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        return sum((c * point[v] for v, c in self.coeffs.items()), ZERO)

    def satisfied_by(self, point: Mapping[str, Fraction]) -> bool:
        lhs = self.evaluate(point)
        return lhs <= self.rhs if self.relation == LE else lhs >= self.rhs


@dataclass(frozen=True)
class LinearSystem:
    """A finite list of inequalities over an ordered variable tuple.

    ``nonneg`` lists the variables additionally constrained to be >= 0.
    ``meta`` is a free-form provenance record carried through reports.
    """

    variables: tuple[str, ...]
    inequalities: tuple[LinearInequality, ...]
    nonneg: frozenset[str] = frozenset()
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        object.__setattr__(self, "nonneg", frozenset(self.nonneg))
        declared = set(self.variables)
        if len(self.variables) != len(declared):
            raise SystemError_("duplicate variable names")
        if not self.nonneg <= declared:
            raise SystemError_(f"nonneg names undeclared variables: {sorted(self.nonneg - declared)}")
        for ineq in self.inequalities:
            undeclared = set(ineq.coeffs) - declared
            if undeclared:
                raise SystemError_(
                    f"inequality {ineq.label!r} references undeclared variables {sorted(undeclared)}"
                )

    @property
    def nonneg_ordered(self) -> tuple[str, ...]:
        return tuple(v for v in self.variables if v in self.nonneg)

    def normalized_rows(self) -> list[tuple[tuple[Fraction, ...], Fraction]]:
        """All constraints as <=-rows: inequalities in order, then -v <= 0 per nonneg var."""
        rows = []
        for ineq in self.inequalities:
            vec = [ineq.coeffs.get(v, ZERO) for v in self.variables]
            rhs = ineq.rhs
            if ineq.relation == GE:
                vec = [-c for c in vec]
                rhs = -rhs
            rows.append((tuple(vec), rhs))
        for v in self.nonneg_ordered:
            vec = tuple(-ONE if w == v else ZERO for w in self.variables)
            rows.append((vec, ZERO))
        return rows


@dataclass(frozen=True)
class FeasibilityResult:
    """Either a rational witness point or a Farkas infeasibility certificate.

    For infeasible systems ``farkas`` holds one nonnegative multiplier per
    <=-normalized inequality followed by one per nonnegativity row; the
    combination has all-zero variable coefficients and negative rhs.
    """

    status: str  # "feasible" | "infeasible"
    witness: Optional[dict[str, Fraction]] = None
    farkas: Optional[tuple[Fraction, ...]] = None

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"


# ---------------------------------------------------------------------------
# Fourier-Motzkin elimination with certificate provenance
# ---------------------------------------------------------------------------

def _normalize_row(vec, rhs, prov):
    """Scale a row so its first nonzero coefficient has absolute value 1."""
    pivot = next((c for c in vec if c != 0), None)
    if pivot is None:
        return vec, rhs, prov
    scale = ONE / abs(pivot)
    if scale == 1:
        return vec, rhs, prov
    return (
        tuple(c * scale for c in vec),
        rhs * scale,
        tuple(p * scale for p in prov),
    )


def _prune(rows):
    """Dedup identical direction vectors keeping the tightest rhs."""
    best: dict[tuple, tuple] = {}
    order: list[tuple] = []
    for vec, rhs, prov in rows:
        if vec not in best:
            best[vec] = (rhs, prov)
            order.append(vec)
        elif rhs < best[vec][0]:
            best[vec] = (rhs, prov)
    return [(vec, best[vec][0], best[vec][1]) for vec in order]


def check_feasibility(system: LinearSystem) -> FeasibilityResult:
    """Exact feasibility verdict with a verifying certificate attached.

    Fourier-Motzkin elimination; the variable with the fewest pairings is
    eliminated first (ties broken by variable order) so the intermediate
    row count stays small for the few-variable systems this targets.
    """
    n = len(system.variables)
    base = system.normalized_rows()
    nrows = len(base)
    rows = []
    for i, (vec, rhs) in enumerate(base):
        prov = tuple(ONE if j == i else ZERO for j in range(nrows))
        rows.append((vec, rhs, prov))

    contradiction = None

    def sift(candidates):
        """Drop trivially-true rows; catch an all-zero row with negative rhs."""
        nonlocal contradiction
        kept = []
        for vec, rhs, prov in candidates:
            if all(c == 0 for c in vec):
                if rhs < 0 and contradiction is None:
                    contradiction = prov
                continue
            kept.append(_normalize_row(vec, rhs, prov))
        return _prune(kept)

    rows = sift(rows)
    remaining = list(range(n))
    layers = []  # (var index, pos rows, neg rows) for witness back-substitution

    while remaining and contradiction is None:
        counts = []
        for j in remaining:
            p = sum(1 for vec, _, _ in rows if vec[j] > 0)
            m = sum(1 for vec, _, _ in rows if vec[j] < 0)
            counts.append((p * m, remaining.index(j), j, p, m))
        _, _, j, _, _ = min(counts)
        pos = [r for r in rows if r[0][j] > 0]
        neg = [r for r in rows if r[0][j] < 0]
        zero = [r for r in rows if r[0][j] == 0]
        layers.append((j, pos, neg))
        new_rows = []
        for pvec, prhs, pprov in pos:
            inv_p = ONE / pvec[j]
            for nvec, nrhs, nprov in neg:
                inv_n = ONE / -nvec[j]
                vec = tuple(pc * inv_p + nc * inv_n for pc, nc in zip(pvec, nvec))
                rhs = prhs * inv_p + nrhs * inv_n
                prov = tuple(pp * inv_p + np_ * inv_n for pp, np_ in zip(pprov, nprov))
                new_rows.append((vec, rhs, prov))
        rows = sift(zero + new_rows)
        remaining.remove(j)

    if contradiction is not None:
        result = FeasibilityResult("infeasible", farkas=contradiction)
    else:
        # Feasible: rebuild a witness from the elimination stack.
        values: dict[int, Fraction] = {}
        for j, pos, neg in reversed(layers):
            lo = None
            hi = None
            for vec, rhs, _ in pos:  # vec[j] > 0:  x_j <= (rhs - rest)/vec[j]
                rest = sum((vec[k] * values.get(k, ZERO) for k in range(n) if k != j), ZERO)
                bound = (rhs - rest) / vec[j]
                hi = bound if hi is None or bound < hi else hi
            for vec, rhs, _ in neg:  # vec[j] < 0:  x_j >= (rhs - rest)/vec[j]
                rest = sum((vec[k] * values.get(k, ZERO) for k in range(n) if k != j), ZERO)
                bound = (rhs - rest) / vec[j]
                lo = bound if lo is None or bound > lo else lo
            if lo is not None:
                values[j] = lo
            elif hi is not None:
                values[j] = hi
            else:
                values[j] = ZERO
        witness = {v: values.get(i, ZERO) for i, v in enumerate(system.variables)}
        result = FeasibilityResult("feasible", witness=witness)

    if not verify_certificate(system, result):
        raise AssertionError("internal error: emitted certificate failed verification")
    return result


# ---------------------------------------------------------------------------
# Certificate verification (pure substitution)
# ---------------------------------------------------------------------------

def verify_certificate(system: LinearSystem, result: FeasibilityResult) -> bool:
    """Re-check a feasibility result against the system by substitution only.

    Independent of the solver: a witness must satisfy every constraint
    exactly; a Farkas vector must be nonnegative, cancel every variable and
    combine the right-hand sides into a negative number.
    """
    if result.status == "feasible":
        if result.witness is None:
            raise SystemError_("feasible result lacks a witness")
        missing = set(system.variables) - set(result.witness)
        if missing:
            raise SystemError_(f"witness misses variables {sorted(missing)}")
        point = {v: Fraction(result.witness[v]) for v in system.variables}
        if any(point[v] < 0 for v in system.nonneg):
            return False
        return all(ineq.satisfied_by(point) for ineq in system.inequalities)

    if result.status == "infeasible":
        if result.farkas is None:
            raise SystemError_("infeasible result lacks Farkas multipliers")
        rows = system.normalized_rows()
        if len(result.farkas) != len(rows):
            raise SystemError_(
                f"Farkas vector has length {len(result.farkas)}, expected {len(rows)}"
            )
        lam = [Fraction(x) for x in result.farkas]
        if any(x < 0 for x in lam):
            return False
        n = len(system.variables)
        combo = [ZERO] * n
        rhs = ZERO
        for mult, (vec, b) in zip(lam, rows):
            if mult == 0:
                continue
            for k in range(n):
                combo[k] += mult * vec[k]
            rhs += mult * b
        return all(c == 0 for c in combo) and rhs < 0

    raise SystemError_(f"unknown status {result.status!r}")


# ---------------------------------------------------------------------------
# Vertex enumeration (basic feasible points)
# ---------------------------------------------------------------------------

def _solve_square(rows: Sequence[tuple[tuple[Fraction, ...], Fraction]]) -> Optional[list[Fraction]]:
    """Solve an n x n rational linear system by Gaussian elimination.

    Returns None when the matrix is singular.
    """
    n = len(rows)
    a = [list(vec) + [rhs] for vec, rhs in rows]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        inv = ONE / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def enumerate_vertices(system: LinearSystem) -> list[tuple[Fraction, ...]]:
    """All basic feasible points, deduplicated and sorted lexicographically.

    Every subset of n constraints with an invertible coefficient matrix is
    solved as equalities; the solution is kept when it satisfies the whole
    system.  Intended for small systems (<= ~6 variables).
    """
    n = len(system.variables)
    rows = system.normalized_rows()
    if n == 0:
        return []
    points = set()
    for subset in itertools.combinations(range(len(rows)), n):
        sol = _solve_square([rows[i] for i in subset])
        if sol is None:
            continue
        ok = True
        for vec, rhs in rows:
            if sum((c * x for c, x in zip(vec, sol)), ZERO) > rhs:
                ok = False
                break
        if ok:
            points.add(tuple(sol))
    return sorted(points)


# ---------------------------------------------------------------------------
# Exact phase-1 simplex (cross-check path)
# ---------------------------------------------------------------------------

def simplex_feasibility(system: LinearSystem) -> FeasibilityResult:
    """Phase-1 simplex with Bland's rule, exact arithmetic.

    Free variables are split into differences of nonnegative parts.  Used
    as an independent verdict to cross-check Fourier-Motzkin; infeasible
    outcomes carry no certificate (that is the elimination path's job), so
    the returned result for infeasible systems is status-only.
    """
    rows = system.normalized_rows()[: len(system.inequalities)]
    # Columns: one per nonneg var, two (plus/minus) per free var.
    columns: list[tuple[str, int]] = []  # (variable, sign)
    for v in system.variables:
        if v in system.nonneg:
            columns.append((v, +1))
        else:
            columns.append((v, +1))
            columns.append((v, -1))
    var_index = {v: i for i, v in enumerate(system.variables)}

    m = len(rows)
    ncols = len(columns)
    # Tableau rows: coefficients over structural cols + slack cols + artificial cols | rhs
    art_rows = [i for i, (_, rhs) in enumerate(rows) if rhs < 0]
    nart = len(art_rows)
    total = ncols + m + nart
    tab = []
    basis = []
    art_seq = {r: k for k, r in enumerate(art_rows)}
    for i, (vec, rhs) in enumerate(rows):
        row = [ZERO] * (total + 1)
        for ci, (v, sign) in enumerate(columns):
            row[ci] = vec[var_index[v]] * sign
        row[ncols + i] = ONE  # slack
        row[total] = rhs
        if rhs < 0:
            row = [-x for x in row]
            row[ncols + m + art_seq[i]] = ONE
            basis.append(ncols + m + art_seq[i])
        else:
            basis.append(ncols + i)
        tab.append(row)

    if nart == 0:
        witness = {v: ZERO for v in system.variables}
        # slack-basic start is already feasible for the normalized rows;
        # nonneg rows are satisfied by zero as well.
        return FeasibilityResult("feasible", witness=witness)

    # Objective: minimize the sum of artificials.  Cost 1 on artificial
    # columns, minus the artificial-basic rows to express reduced costs.
    obj = [ZERO] * (total + 1)
    for j in range(ncols + m, total):
        obj[j] = ONE
    for i in range(m):
        if basis[i] >= ncols + m:
            for k in range(total + 1):
                obj[k] -= tab[i][k]

    def pivot(row_i: int, col_j: int) -> None:
        inv = ONE / tab[row_i][col_j]
        tab[row_i] = [x * inv for x in tab[row_i]]
        for r in range(m):
            if r != row_i and tab[r][col_j] != 0:
                f = tab[r][col_j]
                tab[r] = [x - f * y for x, y in zip(tab[r], tab[row_i])]
        f = obj[col_j]
        if f != 0:
            for k in range(total + 1):
                obj[k] -= f * tab[row_i][k]
        basis[row_i] = col_j

    while True:
        # Artificial columns are barred from re-entering (Bland's rule on
        # the structural and slack columns only).
        entering = next((j for j in range(ncols + m) if obj[j] < 0), None)
        if entering is None:
            break
        ratios = [
            (tab[r][total] / tab[r][entering], basis[r], r)
            for r in range(m)
            if tab[r][entering] > 0
        ]
        if not ratios:  # unbounded phase-1 cannot happen; defensive
            break
        _, _, leave = min(ratios)
        pivot(leave, entering)

    objective_value = -obj[total]
    if objective_value != 0:
        return FeasibilityResult("infeasible")
    values = [ZERO] * total
    for r, b in enumerate(basis):
        values[b] = tab[r][total]
    witness = {v: ZERO for v in system.variables}
    for ci, (v, sign) in enumerate(columns):
        witness[v] += values[ci] * sign
    return FeasibilityResult("feasible", witness=witness)
