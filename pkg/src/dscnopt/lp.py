"""Dense two-phase simplex with dual solutions, extreme rays and Farkas certificates.

The solver is deliberately small and deterministic: Dantzig pricing with a
Bland fallback after a streak of degenerate pivots, dense numpy linear
algebra throughout. Instances in this project are tiny (tens of variables),
so no factorization reuse or sparsity is attempted.

Unbounded verdicts carry a feasible point and an improving extreme ray,
which is what Benders feasibility cuts are built from. Infeasible verdicts
carry a Farkas certificate expressed as row multipliers (plus multipliers
for finite upper bounds), i.e. a dual ray proving the constraints empty.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import lu_factor, lu_solve

FEAS_TOL = 1e-7
OPT_TOL = 1e-9
STRICT_TOL = 1e-10     # callers needing a strict feasibility split use this
_BLAND_AFTER = 20      # degenerate pivots before switching to Bland's rule
_MAX_PIVOTS = 50_000

LE, EQ, GE = "<=", "=", ">="


class LpError(ValueError):
    """Raised on malformed linear programs."""


@dataclass
class LinearProgram:
    """min/max  c @ x  subject to  A x (<=,=,>=) b  and simple variable bounds.

    Variable lower bounds are 0 (default) or -inf; upper bounds are +inf
    (default) or finite.
    """

    sense: str                    # "min" | "max"
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    row_senses: Sequence[str]
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.b = np.asarray(self.b, dtype=float)
        m, n = self.A.shape
        if self.sense not in ("min", "max"):
            raise LpError(f"unknown sense {self.sense!r}")
        if self.c.shape != (n,) or self.b.shape != (m,):
            raise LpError("dimension mismatch between c, A and b")
        if len(self.row_senses) != m or any(
            s not in (LE, EQ, GE) for s in self.row_senses
        ):
            raise LpError("row senses must be one of <=, =, >= per row")
        if self.lower is None:
            self.lower = np.zeros(n)
        else:
            self.lower = np.asarray(self.lower, dtype=float)
        if self.upper is None:
            self.upper = np.full(n, np.inf)
        else:
            self.upper = np.asarray(self.upper, dtype=float)
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise LpError("bound vectors must match the variable count")
        if not np.all((self.lower == 0.0) | np.isneginf(self.lower)):
            raise LpError("variable lower bounds must be 0 or -inf")
        for arr in (self.c, self.A, self.b):
            if not np.all(np.isfinite(arr)):
                raise LpError("c, A, b must be finite")

    @property
    def num_vars(self) -> int:
        return self.A.shape[1]

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]


@dataclass
class LpResult:
    """Outcome of a solve: exactly one of optimal / unbounded / infeasible.

    * optimal: ``x``, ``objective`` and row duals ``dual`` (original rows,
      in the problem's own sense, so ``c @ x == dual-value`` within tol).
    * unbounded: feasible ``x`` plus improving ``ray`` in original variables.
    * infeasible: ``farkas`` row multipliers plus ``farkas_upper`` per-variable
      multipliers on finite upper bounds. Together they certify emptiness:
      ``farkas @ A[:, j] + farkas_upper[j] <= 0`` for every column j while
      ``farkas @ b + farkas_upper @ upper > 0``, with ``farkas`` respecting
      row senses (>= 0 on >= rows, <= 0 on <= rows) and ``farkas_upper <= 0``.
    """

    status: str
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    dual: Optional[np.ndarray] = None
    upper_duals: Optional[np.ndarray] = None
    ray: Optional[np.ndarray] = None
    farkas: Optional[np.ndarray] = None
    farkas_upper: Optional[np.ndarray] = None


@dataclass
class StandardForm:
    """min c @ z  s.t.  A z = b, z >= 0, with b >= 0, plus back-maps."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    obj_sign: float                 # multiply standard objective by this
    pos_part: np.ndarray            # standard column of x_j (or its + part)
    neg_part: np.ndarray            # standard column of - part, -1 if none
    row_sign: np.ndarray            # +-1 per standard row (b-sign flips)
    n_user_rows: int                # rows from the original A (before ub rows)
    upper_rows: list = field(default_factory=list)  # (var, std row) pairs


def standard_form(lp: LinearProgram) -> StandardForm:
    """Rewrite an LP as min c z s.t. A z = b, z >= 0 with b >= 0.

    Free variables are split, finite upper bounds become extra rows, and
    inequality rows gain slack/surplus columns.
    """
    m, n = lp.num_rows, lp.num_vars
    ub_rows = [(j, float(lp.upper[j])) for j in range(n) if np.isfinite(lp.upper[j])]
    total_rows = m + len(ub_rows)

    pos = np.zeros(n, dtype=int)
    neg = np.full(n, -1, dtype=int)
    cols = []
    c_cols = []
    sign = 1.0 if lp.sense == "min" else -1.0
    col = 0
    for j in range(n):
        a = np.zeros(total_rows)
        a[:m] = lp.A[:, j]
        for r, (var, _) in enumerate(ub_rows):
            if var == j:
                a[m + r] = 1.0
        cols.append(a)
        c_cols.append(sign * lp.c[j])
        pos[j] = col
        col += 1
        if np.isneginf(lp.lower[j]):
            cols.append(-a)
            c_cols.append(-sign * lp.c[j])
            neg[j] = col
            col += 1
    # slack/surplus columns
    for r in range(m):
        s = lp.row_senses[r]
        if s == EQ:
            continue
        a = np.zeros(total_rows)
        a[r] = 1.0 if s == LE else -1.0
        cols.append(a)
        c_cols.append(0.0)
        col += 1
    for r in range(len(ub_rows)):
        a = np.zeros(total_rows)
        a[m + r] = 1.0
        cols.append(a)
        c_cols.append(0.0)
        col += 1

    A = np.column_stack(cols) if cols else np.zeros((total_rows, 0))
    b = np.concatenate([lp.b, [u for _, u in ub_rows]])
    row_sign = np.ones(total_rows)
    flip = b < 0
    row_sign[flip] = -1.0
    A[flip] *= -1.0
    b = b * row_sign
    return StandardForm(
        c=np.array(c_cols),
        A=A,
        b=b,
        obj_sign=sign,
        pos_part=pos,
        neg_part=neg,
        row_sign=row_sign,
        n_user_rows=m,
        upper_rows=[(j, m + r) for r, (j, _) in enumerate(ub_rows)],
    )


def _simplex(A, b, c, basis, tol):
    """Primal simplex from a feasible basis.

    Returns (status, basis, x_basic, dual, entering_ray) where status is
    "optimal" or "unbounded". On unboundedness ``entering_ray`` is the
    improving direction in standard variables.
    """
    m, n = A.shape
    basis = list(basis)
    degenerate_streak = 0
    for _ in range(_MAX_PIVOTS):
        # one LU factorization per pivot serves all three basis solves
        factors = lu_factor(A[:, basis], check_finite=False)
        if not np.all(np.abs(np.diagonal(factors[0])) > 0.0):
            raise np.linalg.LinAlgError("singular simplex basis")
        xB = lu_solve(factors, b, check_finite=False)
        y = lu_solve(factors, c[basis], trans=1, check_finite=False)
        reduced = c - A.T @ y
        in_basis = np.zeros(n, dtype=bool)
        in_basis[basis] = True
        candidates = np.nonzero(~in_basis & (reduced < -tol))[0]
        if candidates.size == 0:
            return "optimal", basis, xB, y, None
        if degenerate_streak >= _BLAND_AFTER:
            enter = int(candidates[0])                      # Bland
        else:
            enter = int(candidates[np.argmin(reduced[candidates])])  # Dantzig
        d = lu_solve(factors, A[:, enter], check_finite=False)
        positive = d > tol
        if not positive.any():
            ray = np.zeros(n)
            ray[enter] = 1.0
            for pos_i, bi in enumerate(basis):
                ray[bi] = -d[pos_i]
            return "unbounded", basis, xB, y, ray
        ratios = np.full(m, np.inf)
        # clamp at zero so a basic value driven slightly negative by
        # roundoff cannot produce a negative step and amplify itself
        ratios[positive] = np.maximum(xB[positive], 0.0) / d[positive]
        theta = ratios.min()
        if degenerate_streak >= _BLAND_AFTER:
            # Bland: leave with the smallest basis variable index among ties
            tie = np.nonzero(np.isclose(ratios, theta, rtol=0, atol=tol))[0]
            leave = int(min(tie, key=lambda r: basis[r]))
        else:
            leave = int(np.argmin(ratios))
        degenerate_streak = degenerate_streak + 1 if theta <= tol else 0
        basis[leave] = enter
    raise LpError("simplex pivot limit exceeded")


def _phase_one(A, b, tol, feas_tol):
    """Find a feasible basis via artificial variables.

    Returns (status, basis, farkas) with status "feasible" or "infeasible".
    Artificial columns may remain in the basis at zero level; callers must
    treat columns >= A.shape[1] as forbidden in phase two.
    """
    m, n = A.shape
    A1 = np.hstack([A, np.eye(m)])
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    basis = list(range(n, n + m))
    status, basis, xB, y, _ = _simplex(A1, b, c1, basis, tol)
    if status != "optimal":                      # pragma: no cover - impossible
        raise LpError("phase one cannot be unbounded")
    if float(c1[basis] @ xB) > feas_tol * (1.0 + float(np.abs(b).max(initial=0.0))):
        return "infeasible", basis, y
    # pivot artificials out where a large POSITIVE pivot exists: the
    # artificial may sit at a tiny nonnegative level, and a negative or
    # small pivot would turn that level into an infeasible vertex that
    # phase two can then amplify arbitrarily
    for row, bi in enumerate(list(basis)):
        if bi < n:
            continue
        B = A1[:, basis]
        d_row = np.linalg.solve(B, A)[row]
        d_row[[j for j in range(n) if j in basis]] = 0.0
        j = int(np.argmax(d_row))
        if d_row[j] > np.sqrt(tol):
            basis[row] = j
        # else: the artificial stays basic at its (near-zero) level
    return "feasible", basis, None


def _to_original(std: StandardForm, z: np.ndarray, n_vars: int) -> np.ndarray:
    x = z[std.pos_part].copy()
    has_neg = std.neg_part >= 0
    x[has_neg] -= z[std.neg_part[has_neg]]
    return x[:n_vars]


def solve_lp(
    lp: LinearProgram, tol: float = OPT_TOL, feas_tol: float = FEAS_TOL
) -> LpResult:
    """Solve an LP, returning an optimum with duals, a ray, or a certificate.

    ``feas_tol`` sets the relative phase-one threshold between "feasible"
    and "infeasible"; callers needing a stricter split near the feasibility
    boundary may lower it.

    Constraint rows are equilibrated to unit infinity norm before the solve
    so that pivot and feasibility tolerances act relative to each row's own
    magnitude; badly scaled rows (coefficients far from 1) would otherwise
    slip through absolute tolerances. The scaling leaves ``x``, objective
    and bound duals untouched; row duals and Farkas multipliers are mapped
    back to the original rows.
    """
    row_norm = np.abs(lp.A).max(axis=1, initial=0.0)
    scale = np.where(row_norm > 0.0, 1.0 / np.maximum(row_norm, 1e-300), 1.0)
    scaled = LinearProgram(
        lp.sense,
        lp.c,
        lp.A * scale[:, None],
        lp.b * scale,
        list(lp.row_senses),
        lower=lp.lower.copy(),
        upper=lp.upper.copy(),
    )
    result = _solve_equilibrated(scaled, tol, feas_tol)
    if result.dual is not None:
        result.dual = result.dual * scale
    if result.farkas is not None:
        result.farkas = result.farkas * scale
    return result


def _solve_equilibrated(
    lp: LinearProgram, tol: float, feas_tol: float
) -> LpResult:
    std = standard_form(lp)
    A, b, c = std.A, std.b, std.c
    m, n = A.shape

    status, basis, farkas = _phase_one(A, b, max(tol, 1e-12), feas_tol)
    if status == "infeasible":
        # map the phase-one duals back to original rows: a dual ray with
        # y' A_col + y_upper[j] <= 0 per column and y' b + y_upper' u > 0
        y_full = farkas * std.row_sign
        fk = y_full[: std.n_user_rows]
        fk_upper = np.zeros(lp.num_vars)
        for j, r in std.upper_rows:
            fk_upper[j] = y_full[r]
        return LpResult(status="infeasible", farkas=fk, farkas_upper=fk_upper)

    # phase two: forbid artificial columns by pricing them out
    A2 = np.hstack([A, np.eye(m)])
    big = 1.0 + np.abs(c).sum()
    c2 = np.concatenate([c, np.full(m, big * 1e6)])
    status, basis, xB, y, ray = _simplex(A2, b, c2, basis, max(tol, 1e-12))

    z = np.zeros(n + m)
    for pos_i, bi in enumerate(basis):
        z[bi] = xB[pos_i]
    x = _to_original(std, z, lp.num_vars)

    if status == "unbounded":
        r = _to_original(std, ray, lp.num_vars)
        return LpResult(status="unbounded", x=x, ray=r)

    obj = std.obj_sign * float(std.c @ z[:n])
    # duals in original row space: undo b-sign flips; match the problem sense
    y_full = y * std.row_sign
    dual = std.obj_sign * y_full[: std.n_user_rows]
    ub_dual = np.zeros(lp.num_vars)
    for j, r in std.upper_rows:
        ub_dual[j] = std.obj_sign * y_full[r]
    return LpResult(
        status="optimal", x=x, objective=obj, dual=dual, upper_duals=ub_dual
    )


def solution_violation(lp: LinearProgram, x: np.ndarray) -> float:
    """Largest constraint or bound violation of ``x`` (0 if feasible).

    Row violations are measured relative to each row's infinity norm so
    the result is invariant under row rescaling; bound violations are
    absolute. Lets callers double-check a returned vertex: near the
    feasibility boundary a solver working at tolerance FEAS_TOL may declare
    optimal a point that misses some constraint by a just-detectable
    margin, and callers that need a strict feasible/infeasible split (e.g.
    enumeration oracles) can reject such points uniformly.
    """
    x = np.asarray(x, dtype=float)
    row_norm = np.maximum(np.abs(lp.A).max(axis=1, initial=0.0), 1e-300)
    rows = (lp.A @ x - lp.b) / row_norm
    worst = 0.0
    for r, sense in enumerate(lp.row_senses):
        if sense == GE:
            worst = max(worst, -rows[r])
        elif sense == LE:
            worst = max(worst, rows[r])
        else:
            worst = max(worst, abs(rows[r]))
    worst = max(worst, float((lp.lower - x).max(initial=0.0)))
    finite = np.isfinite(lp.upper)
    if finite.any():
        worst = max(worst, float((x[finite] - lp.upper[finite]).max(initial=0.0)))
    return worst


def duality_gap(lp: LinearProgram, result: LpResult) -> float:
    """|c @ x - (b @ dual + finite-upper-bound dual value)| for an optimum."""
    if result.status != "optimal":
        raise LpError("duality gap defined only for optimal results")
    dual_value = float(lp.b @ result.dual)
    finite = np.isfinite(lp.upper)
    dual_value += float(lp.upper[finite] @ result.upper_duals[finite])
    return abs(float(lp.c @ result.x) - dual_value)


def dump(lp: LinearProgram) -> str:
    """Plain-text fixed-order dump for external cross-checking."""
    lines = [f"sense {lp.sense}", "c " + " ".join(f"{v:.17g}" for v in lp.c)]
    for r in range(lp.num_rows):
        row = " ".join(f"{v:.17g}" for v in lp.A[r])
        lines.append(f"row {lp.row_senses[r]} {lp.b[r]:.17g} {row}")
    lines.append("lower " + " ".join(f"{v:.17g}" for v in lp.lower))
    lines.append("upper " + " ".join(f"{v:.17g}" for v in lp.upper))
    return "\n".join(lines) + "\n"
