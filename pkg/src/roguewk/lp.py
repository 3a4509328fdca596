"""Single-round allocation LP over the relaxed probability simplex.

Solves max g'pi subject to costs'pi <= rate per resource, pi >= 0, and
sum(pi) <= 1.  The slack 1 - sum(pi) is the null action's probability; with
sum(pi) = 1 the program can be infeasible when every arm is too expensive,
while the relaxed form always admits pi = 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

_TOL = 1e-10
_FEAS_TOL = 1e-9
_MAX_PIVOTS = 10_000


class LpError(RuntimeError):
    pass


@dataclass(eq=False)
class LpInstance:
    objective: np.ndarray  # (m,) per-arm objective values
    costs: np.ndarray      # (m, d) per-arm, per-resource mean costs
    rate: float            # per-round budget b

    def __post_init__(self):
        self.objective = np.atleast_1d(np.asarray(self.objective, dtype=float))
        self.costs = np.asarray(self.costs, dtype=float)
        if self.costs.ndim == 1:
            self.costs = self.costs.reshape(len(self.objective), -1)
        m, d = self.costs.shape
        if m != len(self.objective) or m < 1 or d < 1:
            raise LpError(f"inconsistent dimensions: objective {len(self.objective)}, costs {self.costs.shape}")
        if not (self.rate > 0):
            raise LpError(f"rate must be positive, got {self.rate}")
        if not (np.all(np.isfinite(self.objective)) and np.all(np.isfinite(self.costs))):
            raise LpError("non-finite LP inputs")


@dataclass(eq=False)
class LpSolution:
    pi: np.ndarray
    null_mass: float
    value: float


def _pivot(tab: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    for r in range(tab.shape[0]):
        if r != row and tab[r, col] != 0.0:
            tab[r] -= tab[r, col] * tab[row]


def _run_simplex(tab: np.ndarray, basis: list[int], ncols: int) -> None:
    """Bland's rule primal simplex on a tableau whose last row holds
    negated reduced costs (entering while any entry < -tol)."""
    for _ in range(_MAX_PIVOTS):
        enter = -1
        for j in range(ncols):
            if tab[-1, j] < -_TOL:
                enter = j
                break
        if enter < 0:
            return
        leave, best_ratio, best_var = -1, np.inf, None
        for r in range(tab.shape[0] - 1):
            a = tab[r, enter]
            if a > _TOL:
                ratio = tab[r, -1] / a
                if ratio < best_ratio - _TOL or (
                    abs(ratio - best_ratio) <= _TOL
                    and (best_var is None or basis[r] < best_var)
                ):
                    leave, best_ratio, best_var = r, ratio, basis[r]
        if leave < 0:
            raise LpError("LP is unbounded")
        _pivot(tab, leave, enter)
        basis[leave] = enter
    raise LpError("simplex iteration limit exceeded")


def _simplex_max(c: np.ndarray, A: np.ndarray, b: np.ndarray) -> tuple[float, np.ndarray, bool]:
    """max c'x s.t. Ax <= b, x >= 0 via a two-phase dense tableau.

    Returns (value, x, tied) where tied flags a zero reduced cost on some
    nonbasic column at the optimum (alternative optima may exist).
    Raises LpError when infeasible.
    """
    nrow, nvar = A.shape
    b = np.asarray(b, dtype=float).copy()
    A = np.asarray(A, dtype=float).copy()
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    art_rows = np.flatnonzero(neg)
    nart = len(art_rows)
    ncols = nvar + nrow + nart
    tab = np.zeros((nrow + 1, ncols + 1))
    tab[:nrow, :nvar] = A
    tab[:nrow, -1] = b
    basis: list[int] = []
    for r in range(nrow):
        slack = nvar + r
        tab[r, slack] = -1.0 if neg[r] else 1.0
        basis.append(slack)
    for i, r in enumerate(art_rows):
        col = nvar + nrow + i
        tab[r, col] = 1.0
        basis[r] = col

    if nart:
        # Phase 1: maximize -(sum of artificials).
        tab[-1, nvar + nrow:ncols] = 1.0
        for r in art_rows:
            tab[-1] -= tab[r]
        _run_simplex(tab, basis, ncols)
        if tab[-1, -1] < -1e-8:
            raise LpError("LP is infeasible")
        redundant = []
        for r in range(nrow):
            if basis[r] >= nvar + nrow:
                piv = next((j for j in range(nvar + nrow) if abs(tab[r, j]) > _TOL), None)
                if piv is None:
                    redundant.append(r)
                    continue
                _pivot(tab, r, piv)
                basis[r] = piv
        if redundant:
            tab = np.delete(tab, redundant, axis=0)
            basis = [v for r, v in enumerate(basis) if r not in redundant]
            nrow -= len(redundant)
        tab = np.delete(tab, np.s_[ncols - nart:ncols], axis=1)
        ncols -= nart

    tab[-1, :] = 0.0
    tab[-1, :nvar] = -np.asarray(c, dtype=float)
    for r in range(nrow):
        if abs(tab[-1, basis[r]]) > 0.0:
            tab[-1] -= tab[-1, basis[r]] * tab[r]
    _run_simplex(tab, basis, ncols)

    x = np.zeros(nvar)
    for r, col in enumerate(basis):
        if col < nvar:
            x[col] = tab[r, -1]
    tied = any(
        j not in basis and tab[-1, j] <= _TOL
        for j in range(ncols)
    )
    return float(tab[-1, -1]), x, tied


def _constraint_rows(inst: LpInstance) -> tuple[np.ndarray, np.ndarray]:
    m, d = inst.costs.shape
    A = np.vstack([inst.costs.T, np.ones((1, m))])
    b = np.concatenate([np.full(d, inst.rate), [1.0]])
    return A, b


def _finalize(inst: LpInstance, pi: np.ndarray) -> LpSolution:
    pi = np.where(np.abs(pi) < 1e-12, 0.0, pi)
    total = float(pi.sum())
    if total > 1.0:
        pi = pi / total
        total = 1.0
    sol = LpSolution(pi=pi, null_mass=1.0 - total, value=float(inst.objective @ pi))
    if __debug__:
        assert np.all(sol.pi >= 0.0), "negative allocation"
        assert np.all(inst.costs.T @ sol.pi <= inst.rate + _FEAS_TOL), "budget row violated"
        assert sol.pi.sum() + sol.null_mass <= 1.0 + 1e-12
    return sol


def solve(inst: LpInstance) -> LpSolution:
    """Global optimum of the allocation LP.

    Ties among optimal vertices are broken toward the lexicographically
    smallest pi by minimizing each coordinate in turn over the optimal face,
    so repeated runs produce identical traces.
    """
    A, b = _constraint_rows(inst)
    value, pi, tied = _simplex_max(inst.objective, A, b)
    if not tied:
        return _finalize(inst, pi)

    m = len(inst.objective)
    eps = 1e-11 * max(1.0, abs(value))
    face_A = np.vstack([A, -inst.objective])
    face_b = np.concatenate([b, [-(value - eps)]])
    fixed = np.zeros(m)
    remaining = list(range(m))
    for k in range(m):
        rhs = face_b - face_A[:, [j for j in range(m) if j not in remaining]] @ fixed[
            [j for j in range(m) if j not in remaining]
        ]
        sub_A = face_A[:, remaining]
        sub_c = np.zeros(len(remaining))
        sub_c[remaining.index(k)] = -1.0
        sub_val, sub_x, _ = _simplex_max(sub_c, sub_A, rhs)
        fixed[k] = max(0.0, -sub_val)
        remaining.remove(k)
    return _finalize(inst, fixed)


def solve_by_vertex_enumeration(inst: LpInstance) -> LpSolution:
    """Exact reference solver: enumerate basic feasible solutions of
    {pi >= 0, sum(pi) <= 1, costs'pi <= rate} and return the best vertex.
    Only usable at small dimensions (m <= 6, d <= 5)."""
    m, d = inst.costs.shape
    if m > 6 or d > 5:
        raise LpError(f"vertex enumeration limited to m <= 6, d <= 5, got m={m}, d={d}")

    rows = np.vstack([-np.eye(m), np.ones((1, m)), inst.costs.T])
    rhs = np.concatenate([np.zeros(m), [1.0], np.full(d, inst.rate)])

    best_pi = np.zeros(m)  # origin is always a vertex of the relaxed simplex
    best_val = 0.0
    for subset in itertools.combinations(range(len(rhs)), m):
        M = rows[list(subset)]
        try:
            v = np.linalg.solve(M, rhs[list(subset)])
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(v)):
            continue
        if np.any(rows @ v > rhs + _FEAS_TOL):
            continue
        val = float(inst.objective @ v)
        if val > best_val + 1e-12:
            best_pi, best_val = v, val
        elif abs(val - best_val) <= 1e-12 and _lex_less(v, best_pi):
            best_pi = v
    return _finalize(inst, np.maximum(best_pi, 0.0))


def _lex_less(a: np.ndarray, b: np.ndarray, tol: float = 1e-12) -> bool:
    for x, y in zip(a, b):
        if x < y - tol:
            return True
        if x > y + tol:
            return False
    return False
