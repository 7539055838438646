"""Dense two-phase simplex and the two LP shapes used for estimation and eta.

The pivoting loop lives in :mod:`popre._kernels`; this module handles the
conversion to standard form, the phase bookkeeping and periodic
reinversion of the tableau from the original data, which keeps the
basic solution backward stable even on badly conditioned channels.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation, localcontext

import numpy as np

from . import _kernels

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8
OPT_TOL = 1e-9
# extended precision kicks in above this basis condition number
COND_LIMIT = 1e6
EXTENDED_DIGITS = 60
# double-precision infeasible/unbounded verdicts are final only on data
# whose nonzero magnitudes span at most this many decades
TRUST_SPREAD = 6
# pivot budget of the decimal stage, per row plus column
EXTENDED_BUDGET = 4

LE, EQ, GE = "<=", "=", ">="
_RELATIONS = {"<=": LE, "le": LE, "=": EQ, "==": EQ, "eq": EQ, ">=": GE, "ge": GE}


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LpError(RuntimeError):
    pass


class IterationLimitError(LpError):
    """Raised when a pivot budget (double or extended) is exhausted."""


@dataclass(eq=False)
class LpProblem:
    """``min c.x`` subject to ``A x (<=|=|>=) b`` and ``lb <= x <= ub``.

    Bounds default to ``x >= 0``.
    """

    c: np.ndarray
    A: np.ndarray
    relations: list
    b: np.ndarray
    lb: np.ndarray | None = None
    ub: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        N = self.c.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, N)
        m = self.A.shape[0]
        self.b = np.asarray(self.b, dtype=float).ravel()
        if isinstance(self.relations, str):
            self.relations = [self.relations] * m
        try:
            self.relations = [_RELATIONS[r] for r in self.relations]
        except KeyError as exc:
            raise ValueError(f"unknown relation {exc.args[0]!r}") from None
        self.lb = np.zeros(N) if self.lb is None else np.asarray(self.lb, dtype=float).ravel()
        self.ub = np.full(N, np.inf) if self.ub is None else np.asarray(self.ub, dtype=float).ravel()
        if self.b.size != m or len(self.relations) != m:
            raise ValueError(f"{m} constraint rows but {self.b.size} rhs values and {len(self.relations)} relations")
        if self.lb.size != N or self.ub.size != N:
            raise ValueError("bound vectors must match the number of variables")
        for name in ("c", "A", "b"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} contains non-finite entries")
        if np.any(np.isnan(self.lb)) or np.any(np.isnan(self.ub)) or np.any(self.lb == np.inf) or np.any(self.ub == -np.inf):
            raise ValueError("invalid variable bounds")

    @property
    def shape(self):
        return self.A.shape


@dataclass
class LpSolution:
    status: LpStatus
    objective: float
    x: np.ndarray
    iterations: int = 0
    basis: np.ndarray | None = field(default=None, repr=False)
    precision: str = "double"

    @property
    def optimal(self):
        return self.status is LpStatus.OPTIMAL


def max_violation(problem, x):
    """Largest absolute violation of rows and bounds at ``x``."""
    r = problem.A @ x - problem.b
    worst = 0.0
    for rel, v in zip(problem.relations, r):
        if rel == LE:
            worst = max(worst, v)
        elif rel == GE:
            worst = max(worst, -v)
        else:
            worst = max(worst, abs(v))
    worst = max(worst, float(np.max(problem.lb - x, initial=0.0)))
    worst = max(worst, float(np.max(x - problem.ub, initial=0.0)))
    return worst


def _equilibrate(A, passes=4):
    """Power-of-two row and column scales bringing nonzeros toward magnitude 1."""
    m, n = A.shape
    r, s = np.ones(m), np.ones(n)
    nz = A != 0
    logs0 = np.log2(np.where(nz, np.abs(A), 1.0))
    for _ in range(passes):
        for axis in (1, 0):
            logs = logs0 + np.log2(r)[:, None] + np.log2(s)[None, :]
            hi = np.where(nz, logs, -np.inf).max(axis=axis, initial=-np.inf)
            lo = np.where(nz, logs, np.inf).min(axis=axis, initial=np.inf)
            empty = ~np.isfinite(hi)
            mid = np.where(empty, 0.0, (np.where(empty, 0.0, hi) + np.where(empty, 0.0, lo)) / 2)
            shift = np.exp2(-np.round(mid))
            if axis == 1:
                r *= shift
            else:
                s *= shift
    return r, s


class _StandardForm:
    """``min cs.y  s.t.  As y = bs, y >= 0`` with a recipe to map ``y`` back to ``x``."""

    def __init__(self, problem, scale=True):
        c, A, b = problem.c, problem.A, problem.b
        m, N = A.shape
        cols, costs, shift = [], [], np.zeros(N)
        self.recover = []  # per original variable: list of (column, sign)
        extra_rows = []
        for k in range(N):
            lo, hi = problem.lb[k], problem.ub[k]
            if np.isfinite(lo):
                shift[k] = lo
                self.recover.append([(len(cols), 1.0)])
                cols.append(A[:, k])
                costs.append(c[k])
                if np.isfinite(hi):
                    extra_rows.append((len(cols) - 1, hi - lo))
            elif np.isfinite(hi):
                shift[k] = hi
                self.recover.append([(len(cols), -1.0)])
                cols.append(-A[:, k])
                costs.append(-c[k])
            else:
                self.recover.append([(len(cols), 1.0), (len(cols) + 1, -1.0)])
                cols.append(A[:, k])
                cols.append(-A[:, k])
                costs.extend([c[k], -c[k]])
        ny = len(cols)
        Ay = np.column_stack(cols) if cols else np.zeros((m, 0))
        rhs = b - A @ shift
        rels = list(problem.relations)
        if extra_rows:
            box = np.zeros((len(extra_rows), ny))
            for r, (col, width) in enumerate(extra_rows):
                box[r, col] = 1.0
            Ay = np.vstack([Ay, box])
            rhs = np.concatenate([rhs, [w for _, w in extra_rows]])
            rels += [LE] * len(extra_rows)
        self.shift = shift
        self.offset = float(c @ shift)
        self.ny = ny
        # power-of-two equilibration: exact in binary, keeps pivots well scaled
        if scale:
            row_scale, self.col_scale = _equilibrate(Ay)
        else:
            row_scale, self.col_scale = np.ones(Ay.shape[0]), np.ones(Ay.shape[1])
        Ay = Ay * row_scale[:, None] * self.col_scale[None, :]
        rhs = rhs * row_scale
        costs = np.asarray(costs, dtype=float) * self.col_scale

        rows = Ay.shape[0]
        flip = rhs < 0
        Ay = np.where(flip[:, None], -Ay, Ay)
        rhs = np.abs(rhs)
        rels = [
            ({LE: GE, GE: LE, EQ: EQ}[r] if f else r) for r, f in zip(rels, flip)
        ]
        n_slack = sum(r != EQ for r in rels)
        n_art = sum(r != LE for r in rels)
        self.n_real = ny + n_slack
        total = self.n_real + n_art
        As = np.zeros((rows, total))
        As[:, :ny] = Ay
        basis = np.empty(rows, dtype=np.int64)
        s = ny
        a = self.n_real
        for i, r in enumerate(rels):
            if r == LE:
                As[i, s] = 1.0
                basis[i] = s
                s += 1
            elif r == GE:
                As[i, s] = -1.0
                s += 1
                As[i, a] = 1.0
                basis[i] = a
                a += 1
            else:
                As[i, a] = 1.0
                basis[i] = a
                a += 1
        self.A = As
        self.b = rhs
        self.cost = np.concatenate([np.asarray(costs, dtype=float), np.zeros(total - ny)])
        self.basis = basis
        self.n_art = n_art

    def to_x(self, y):
        y = np.asarray(y) * self.col_scale
        x = self.shift.copy()
        for k, parts in enumerate(self.recover):
            for col, sign in parts:
                x[k] += sign * y[col]
        return x


class _DoubleEngine:
    """Float tableau pivoted by the compiled (or numpy) kernels."""

    name = "double"

    def convert(self, arr):
        return np.asarray(arr, dtype=float)

    def tableau(self, A, b, cost, basis):
        """Tableau for ``basis`` rebuilt from the original data."""
        m = A.shape[0]
        T = np.zeros((m + 1, A.shape[1] + 1))
        if m:
            B = A[:, basis]
            try:
                body = np.linalg.solve(B, np.column_stack([A, b]))
            except np.linalg.LinAlgError:
                raise LpError("numerically singular basis") from None
            body[:, basis] = np.eye(m)
            T[:m] = body
            T[m, :-1] = cost - cost[basis] @ body[:, :-1]
            T[m, basis] = 0.0
            T[m, -1] = -(cost[basis] @ body[:, -1])
        else:
            T[0, :-1] = cost
        return T

    def pivots(self, T, basis, ncols, max_iter):
        return _kernels.simplex_pivots(T, basis, ncols, max_iter, PIVOT_TOL, OPT_TOL)

    def pivot(self, T, i, j):
        _kernels.pivot(T, i, j)

    @property
    def pivot_tol(self):
        return PIVOT_TOL

    def feasibility_gap(self, T, b):
        return -T[-1, -1] > FEAS_TOL * max(1.0, float(np.max(np.abs(b), initial=0.0)))


class _DecimalEngine:
    """Object-array tableau of :class:`decimal.Decimal` at ``digits`` precision.

    Conversions from float are exact, so the extended solve works on the very
    same problem data; only the arithmetic is wider.  Every method must run
    inside a ``decimal.localcontext`` carrying that precision.
    """

    name = "extended"

    def __init__(self, digits, spread=0):
        # noise can be amplified by up to the data's dynamic range, so the
        # zero tolerance sits that many digits above the working precision
        self.digits = digits
        self.tol = Decimal(10) ** -max(digits - spread - 10, digits // 3)
        self.rel = Decimal(10) ** -(digits // 3)
        self.zero = Decimal(0)
        self.one = Decimal(1)

    def _pivot_floor(self, vec):
        """Pivot candidates must exceed this magnitude (absolute and relative)."""
        big = max(abs(v) for v in vec) if len(vec) else self.zero
        return max(self.tol, self.rel * big)

    def convert(self, arr):
        arr = np.asarray(arr)
        if arr.dtype == object:
            return arr
        out = np.empty(arr.shape, dtype=object)
        out.reshape(-1)[:] = [Decimal(float(v)) for v in arr.reshape(-1)]
        return out

    def tableau(self, A, b, cost, basis):
        m = A.shape[0]
        T = np.empty((m + 1, A.shape[1] + 1), dtype=object)
        T[:] = self.zero
        if not m:
            T[0, :-1] = cost
            return T
        M = np.concatenate([A, b[:, None]], axis=1)
        for k in range(m):
            col = basis[k]
            p = k + int(np.argmax(np.abs(M[k:, col])))
            if M[p, col] == 0:
                raise LpError("singular basis in extended precision")
            if p != k:
                M[[k, p]] = M[[p, k]]
            M[k] = M[k] / M[k, col]
            f = M[:, col].copy()
            f[k] = self.zero
            M = M - np.outer(f, M[k])
        M[:, basis] = np.eye(m, dtype=int).astype(object) * self.one
        T[:m] = M
        T[m, :-1] = cost - cost[basis] @ M[:, :-1]
        T[m, basis] = self.zero
        T[m, -1] = -(cost[basis] @ M[:, -1])
        return T

    def pivot(self, T, i, j):
        row = T[i] / T[i, j]
        f = T[:, j].copy()
        f[i] = self.zero
        T -= np.outer(f, row)
        T[i] = row
        T[:, j] = self.zero
        T[i, j] = self.one

    def pivots(self, T, basis, ncols, max_iter):
        """Primal simplex: Dantzig pricing, Bland's rule while pivots are degenerate.

        A cycle consists of degenerate pivots only, and those all run under
        Bland's rule, so the loop cannot cycle.
        """
        m = T.shape[0] - 1
        it = 0
        bland = False
        while True:
            d = T[m, :ncols]
            cand = np.flatnonzero(d < -self.tol)
            if cand.size == 0:
                return _kernels.OPTIMAL, it
            if it >= max_iter:
                return _kernels.ITERATION_LIMIT, it
            j = cand[0] if bland else cand[np.argmin(d[cand])]
            col = T[:m, j]
            rows = np.flatnonzero(col > self._pivot_floor(col))
            if rows.size == 0:
                return _kernels.UNBOUNDED, it
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best]
            i = ties[np.argmin(basis[ties])]
            bland = best <= self.tol
            self.pivot(T, i, j)
            basis[i] = j
            it += 1

    def dual_pivots(self, T, basis, ncols, max_iter):
        """Dual simplex from a dual-feasible basis, Bland-style index rules.

        Returns ``OPTIMAL`` once the basis is primal feasible, ``UNBOUNDED``
        when a row proves the primal infeasible.
        """
        m = T.shape[0] - 1
        it = 0
        while True:
            bad = np.flatnonzero(T[:m, -1] < -self.tol)
            if bad.size == 0:
                return _kernels.OPTIMAL, it
            if it >= max_iter:
                return _kernels.ITERATION_LIMIT, it
            i = bad[np.argmin(basis[bad])]
            row = T[i, :ncols]
            cols = np.flatnonzero(row < -self._pivot_floor(row))
            if cols.size == 0:
                return _kernels.UNBOUNDED, it
            ratios = T[m, cols] / -row[cols]
            ties = cols[ratios <= ratios.min()]
            j = ties[np.argmax(np.abs(row[ties]))]
            self.pivot(T, i, j)
            basis[i] = j
            it += 1

    @property
    def pivot_tol(self):
        return self.tol

    def feasibility_gap(self, T, b):
        return -T[-1, -1] > self.tol * max(self.one, max(abs(v) for v in b))


def _run(engine, A, b, cost, basis, ncols, budget, refactor_every):
    """Pivot to optimality, reinverting periodically and once at the end."""
    T = engine.tableau(A, b, cost, basis)
    used = 0
    while True:
        chunk = min(refactor_every, budget - used)
        status, it = engine.pivots(T, basis, ncols, chunk)
        used += it
        if status == _kernels.UNBOUNDED:
            return T, status, used
        T = engine.tableau(A, b, cost, basis)
        if status == _kernels.OPTIMAL:
            status, it = engine.pivots(T, basis, ncols, 0)
            if status == _kernels.OPTIMAL:
                return T, status, used
        if used >= budget:
            raise IterationLimitError(f"simplex exceeded {budget} pivots")


@dataclass
class _Outcome:
    status: LpStatus
    T: np.ndarray | None = None
    A: np.ndarray | None = None
    b: np.ndarray | None = None
    cost: np.ndarray | None = None
    basis: np.ndarray | None = None
    iterations: int = 0


def _two_phase(engine, sf, budget, refactor_every):
    A = engine.convert(sf.A)
    b = engine.convert(sf.b)
    m, total = A.shape
    basis = sf.basis.copy()
    used = 0
    if sf.n_art:
        phase1 = np.zeros(total)
        phase1[sf.n_real:] = 1.0
        T, status, used = _run(engine, A, b, engine.convert(phase1), basis, sf.n_real,
                               budget, refactor_every)
        if engine.feasibility_gap(T, b):
            return _Outcome(LpStatus.INFEASIBLE, iterations=used)
        # drive remaining artificials out of the basis; drop redundant rows
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= sf.n_real:
                row = T[i, : sf.n_real]
                j = int(np.argmax(np.abs(row)))
                if abs(row[j]) > engine.pivot_tol:
                    engine.pivot(T, i, j)
                    basis[i] = j
                else:
                    keep[i] = False
        A = A[keep][:, : sf.n_real]
        b = b[keep]
        basis = np.ascontiguousarray(basis[keep])
    else:
        A = A[:, : sf.n_real]
    cost = engine.convert(sf.cost[: sf.n_real])
    T, status, it = _run(engine, A, b, cost, basis, sf.n_real, budget - used, refactor_every)
    used += it
    if status == _kernels.UNBOUNDED:
        return _Outcome(LpStatus.UNBOUNDED, iterations=used)
    return _Outcome(LpStatus.OPTIMAL, T, A, b, cost, basis, used)


def _polish(engine, warm, budget):
    """Re-solve from a double-precision optimal basis in extended precision.

    The basis is reinverted exactly enough to expose any primal infeasibility
    hidden by rounding; dual simplex (on shifted costs if the basis is not
    dual feasible either) restores feasibility, then primal simplex restores
    optimality.  Returns ``None`` when the warm basis is unusable.
    """
    A, b, cost = (engine.convert(v) for v in (warm.A, warm.b, warm.cost))
    basis = warm.basis.copy()
    try:
        T = engine.tableau(A, b, cost, basis)
    except LpError:
        return None
    ncols = A.shape[1]
    used = 0
    if np.any(T[:-1, -1] < -engine.tol):
        d = T[-1, :ncols]
        neg = d < -engine.tol
        work = cost
        if np.any(neg):
            # cost shifting: zero the negative reduced costs so the basis is
            # dual feasible, restore the true costs once primal feasible
            work = cost.copy()
            work[neg] = work[neg] - d[neg]
            T = engine.tableau(A, b, work, basis)
        status, used = engine.dual_pivots(T, basis, ncols, budget)
        if status != _kernels.OPTIMAL:
            return None
        if work is not cost:
            try:
                T = engine.tableau(A, b, cost, basis)
            except LpError:
                return None
    status, it = engine.pivots(T, basis, ncols, budget - used)
    used += it
    if status != _kernels.OPTIMAL:
        return None
    try:
        T = engine.tableau(A, b, cost, basis)
    except LpError:
        return None
    return _Outcome(LpStatus.OPTIMAL, T, A, b, cost, basis, used)


def _basis_condition(out):
    B = np.asarray(out.A, dtype=float)[:, out.basis]
    if B.size == 0:
        return 1.0
    return float(np.linalg.cond(B))


def _spread(A):
    """Decimal digits between the largest and smallest nonzero magnitude."""
    mag = np.abs(A[A != 0])
    if mag.size == 0:
        return 0
    return int(np.ceil(np.log10(mag.max() / mag.min())))


def solve_lp(problem, *, precision="auto", digits=None, refactor_every=None):
    """Two-phase dense simplex with Bland's entering rule.

    ``precision`` selects the arithmetic: ``"double"`` pivots with the hot
    kernels only; ``"extended"`` also re-solves the final basis in decimal
    arithmetic; ``"auto"`` (default) does so only when the double result is
    untrustworthy (a basis condition number above ``COND_LIMIT``, a violated
    constraint, a breakdown of the double pass, or an infeasible/unbounded
    verdict on data spanning more than ``TRUST_SPREAD`` decades).

    The double pass runs on the equilibrated problem and, if that breaks
    down, on the raw one.  The decimal precision defaults to
    ``EXTENDED_DIGITS`` plus twice the dynamic range of the data, in digits.

    Returns an optimal basic solution, or a solution flagged infeasible or
    unbounded.  Raises :class:`IterationLimitError` after ``50 * (rows +
    cols)`` double pivots or ``EXTENDED_BUDGET * (rows + cols)`` decimal ones.
    """
    if precision not in ("auto", "double", "extended"):
        raise ValueError(f"unknown precision {precision!r}")
    forms = [_StandardForm(problem), _StandardForm(problem, scale=False)]
    sf = forms[0]
    m, total = sf.A.shape
    budget = 50 * (m + total)
    if refactor_every is None:
        refactor_every = max(25, m)
    spread = max(_spread(f.A) for f in forms)
    if digits is None:
        digits = EXTENDED_DIGITS + 2 * spread

    warm = []
    error = None
    for form in forms:
        try:
            out = _two_phase(_DoubleEngine(), form, budget, refactor_every)
        except (LpError, np.linalg.LinAlgError) as exc:
            error = error or exc
            continue
        if out.status is not LpStatus.OPTIMAL:
            if precision == "double" or (precision == "auto" and spread <= TRUST_SPREAD):
                return _finish(problem, form, out, "double")
            continue
        x = _primal(form, out)
        trusted = max_violation(problem, x) <= FEAS_TOL and _basis_condition(out) <= COND_LIMIT
        if precision == "double" or (precision == "auto" and trusted):
            return _finish(problem, form, out, "double")
        warm.append((form, out))
    if precision == "double":
        raise error

    # decimal pivots are slow; a bounded budget turns hopeless cases into errors
    ext_budget = EXTENDED_BUDGET * (m + total)
    engine = _DecimalEngine(digits, spread)
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.traps[InvalidOperation] = True
        for form, out in warm:
            polished = _polish(engine, out, ext_budget)
            if polished is not None:
                return _finish(problem, form, polished, "extended")
        return _finish(problem, sf, _two_phase(engine, sf, ext_budget, ext_budget), "extended")


def _primal(sf, out):
    m = out.basis.size
    y = np.zeros(sf.n_real)
    y[out.basis] = np.maximum(np.asarray(out.T[:m, -1], dtype=float), 0.0)
    return sf.to_x(y[: sf.ny])


def _finish(problem, sf, out, precision):
    N = problem.c.size
    if out.status is LpStatus.INFEASIBLE:
        return LpSolution(LpStatus.INFEASIBLE, float("nan"), np.full(N, np.nan), out.iterations,
                          precision=precision)
    if out.status is LpStatus.UNBOUNDED:
        return LpSolution(LpStatus.UNBOUNDED, -np.inf, np.full(N, np.nan), out.iterations,
                          precision=precision)
    x = _primal(sf, out)
    return LpSolution(LpStatus.OPTIMAL, float(problem.c @ x), x, out.iterations,
                      out.basis.copy(), precision)


# ---------------------------------------------------------------------------
# LP shapes


def build_l1_fit_lp(channel, qhat):
    """``min_p ||qhat - p A||_1`` over probability vectors ``p``.

    Variables are ``p_0..p_n`` followed by slacks ``t_0..t_n``.
    """
    A = np.asarray(channel.a, dtype=float)
    qhat = np.asarray(qhat, dtype=float).ravel()
    k = A.shape[0]
    if qhat.size != k:
        raise ValueError(f"qhat has length {qhat.size}, channel needs {k}")
    I = np.eye(k)
    rows = np.vstack([
        np.concatenate([np.ones(k), np.zeros(k)])[None, :],
        np.hstack([A.T, -I]),
        np.hstack([-A.T, -I]),
    ])
    rhs = np.concatenate([[1.0], qhat, -qhat])
    rels = [EQ] + [LE] * (2 * k)
    c = np.concatenate([np.zeros(k), np.ones(k)])
    return LpProblem(c, rows, rels, rhs)


def build_eta_lp(channel, eps):
    """``min ||c A||_1`` over ``sum c = 0``, ``c_0 = 2 eps``, ``sum |c| <= 2``.

    Variables: ``c+`` (n+1), ``c-`` (n+1), ``t`` (n+1); ``c = c+ - c-``.
    """
    if not (0.0 < eps < 0.5):
        raise ValueError(f"eps must lie in (0, 1/2), got {eps!r}")
    A = np.asarray(channel.a, dtype=float)
    k = A.shape[0]
    I = np.eye(k)
    ones = np.ones(k)
    zeros = np.zeros(k)
    e0 = np.eye(1, k, 0).ravel()
    rows = np.vstack([
        np.concatenate([ones, -ones, zeros])[None, :],
        np.concatenate([e0, -e0, zeros])[None, :],
        np.concatenate([ones, ones, zeros])[None, :],
        np.hstack([A.T, -A.T, -I]),
        np.hstack([-A.T, A.T, -I]),
    ])
    rhs = np.concatenate([[0.0, 2.0 * eps, 2.0], np.zeros(2 * k)])
    rels = [EQ, EQ, LE] + [LE] * (2 * k)
    c = np.concatenate([zeros, zeros, ones])
    return LpProblem(c, rows, rels, rhs)


def eta_certificate(solution, size):
    """Signed vector ``c = c+ - c-`` from a :func:`build_eta_lp` solution."""
    x = solution.x
    return x[:size] - x[size:2 * size]
