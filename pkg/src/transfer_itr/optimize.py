"""Dense unconstrained solvers shared by the weighting and rule-fitting code.

Three small routines cover every solve in the package:

* :func:`minimize_lbfgs` — limited-memory quasi-Newton with a backtracking
  (sufficient-decrease) line search.  Monotone: an accepted step never
  increases the objective, which the outer d.c. loop relies on.
* :func:`minimize_newton` — damped Newton for objectives with a cheap dense
  Hessian; used to polish solutions to tight gradient tolerances.
* :func:`damped_newton_root` — Newton root finder with step halving on the
  residual norm, for estimating equations.

All routines work on plain float arrays and never mutate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class SolveResult:
    """Outcome of an iterative solve."""

    x: np.ndarray
    fun: float
    grad_norm: float
    n_iter: int
    converged: bool
    message: str = ""
    trace: list = field(default_factory=list)


def _finite(*values) -> bool:
    return all(np.all(np.isfinite(v)) for v in values)


def minimize_lbfgs(
    fun_grad,
    x0,
    gtol: float = 1e-8,
    max_iter: int = 500,
    history: int = 10,
    armijo_c: float = 1e-4,
    max_backtracks: int = 60,
    record_trace: bool = False,
) -> SolveResult:
    """Minimize a smooth function with L-BFGS and Armijo backtracking.

    Parameters
    ----------
    fun_grad : callable
        ``fun_grad(x) -> (f, g)`` with ``g`` the gradient at ``x``.
    x0 : array_like
        Starting point.
    gtol : float
        Convergence on the sup-norm of the gradient.
    history : int
        Number of (s, y) pairs kept for the two-loop recursion.

    Returns
    -------
    SolveResult
        ``converged`` is True iff the gradient tolerance was met.  The final
        iterate never has a larger objective than ``x0``.
    """
    x = np.asarray(x0, dtype=float).copy()
    f, g = fun_grad(x)
    if not _finite(f, g):
        raise ValueError("objective not finite at the starting point")

    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    rho_hist: list[float] = []
    trace = [f] if record_trace else []

    n_iter = 0
    message = "max iterations reached"
    converged = False
    while n_iter < max_iter:
        gnorm = float(np.max(np.abs(g))) if g.size else 0.0
        if gnorm <= gtol:
            converged = True
            message = "gradient tolerance reached"
            break

        d = _two_loop_direction(g, s_hist, y_hist, rho_hist)
        slope = float(d @ g)
        if slope >= 0.0:
            # Curvature information went stale; fall back to steepest descent.
            s_hist.clear(), y_hist.clear(), rho_hist.clear()
            d = -g
            slope = float(d @ g)

        step = 1.0
        accepted = False
        for _ in range(max_backtracks):
            x_new = x + step * d
            f_new, g_new = fun_grad(x_new)
            if _finite(f_new, g_new) and f_new <= f + armijo_c * step * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            message = "line search failed"
            break

        s = x_new - x
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-12 * float(np.linalg.norm(s)) * float(np.linalg.norm(y)):
            s_hist.append(s)
            y_hist.append(y)
            rho_hist.append(1.0 / sy)
            if len(s_hist) > history:
                s_hist.pop(0), y_hist.pop(0), rho_hist.pop(0)

        stalled = (f - f_new) <= 1e-16 * (1.0 + abs(f)) and float(
            np.max(np.abs(s))
        ) <= 1e-14 * (1.0 + float(np.max(np.abs(x))))
        x, f, g = x_new, f_new, g_new
        if record_trace:
            trace.append(f)
        n_iter += 1
        if stalled:
            converged = float(np.max(np.abs(g))) <= gtol
            message = "stalled"
            break
    else:
        pass

    if not converged and float(np.max(np.abs(g))) <= gtol:
        converged = True
        message = "gradient tolerance reached"
    return SolveResult(
        x=x,
        fun=float(f),
        grad_norm=float(np.max(np.abs(g))) if g.size else 0.0,
        n_iter=n_iter,
        converged=converged,
        message=message,
        trace=trace,
    )


def _two_loop_direction(g, s_hist, y_hist, rho_hist):
    """Standard L-BFGS two-loop recursion; returns the search direction."""
    q = -g.copy()
    if not s_hist:
        return q
    alphas = []
    for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
        a = rho * float(s @ q)
        alphas.append(a)
        q -= a * y
    gamma = float(s_hist[-1] @ y_hist[-1]) / float(y_hist[-1] @ y_hist[-1])
    q *= gamma
    for (s, y, rho), a in zip(zip(s_hist, y_hist, rho_hist), reversed(alphas)):
        b = rho * float(y @ q)
        q += (a - b) * s
    return q


def minimize_newton(
    fun_grad_hess,
    x0,
    gtol: float = 1e-10,
    max_iter: int = 50,
    max_halvings: int = 60,
) -> SolveResult:
    """Damped Newton descent for smooth convex objectives.

    ``fun_grad_hess(x) -> (f, g, H)``.  The Hessian is regularized with a
    small ridge when the factorization fails.  Monotone in the objective.
    """
    x = np.asarray(x0, dtype=float).copy()
    f, g, H = fun_grad_hess(x)
    n_iter = 0
    converged = float(np.max(np.abs(g))) <= gtol if g.size else True
    while not converged and n_iter < max_iter:
        d = _newton_direction(g, H)
        step = 1.0
        accepted = False
        for _ in range(max_halvings):
            x_new = x + step * d
            f_new, g_new, H_new = fun_grad_hess(x_new)
            if _finite(f_new, g_new) and f_new <= f + 1e-4 * step * float(d @ g):
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        x, f, g, H = x_new, f_new, g_new, H_new
        n_iter += 1
        converged = float(np.max(np.abs(g))) <= gtol
    return SolveResult(
        x=x,
        fun=float(f),
        grad_norm=float(np.max(np.abs(g))) if g.size else 0.0,
        n_iter=n_iter,
        converged=converged,
        message="gradient tolerance reached" if converged else "not converged",
    )


def _newton_direction(g, H):
    ridge = 0.0
    eye = np.eye(len(g))
    for _ in range(12):
        try:
            d = np.linalg.solve(H + ridge * eye, -g)
        except np.linalg.LinAlgError:
            ridge = max(10.0 * ridge, 1e-10)
            continue
        if np.all(np.isfinite(d)) and float(d @ g) < 0.0:
            return d
        ridge = max(10.0 * ridge, 1e-10)
    return -g


def damped_newton_root(
    fun_jac,
    x0,
    tol: float = 1e-8,
    max_iter: int = 100,
    max_halvings: int = 60,
) -> SolveResult:
    """Solve ``F(x) = 0`` by Newton steps damped on ``||F||_2``.

    ``fun_jac(x) -> (F, J)``.  ``converged`` is True iff the final residual
    norm is at most ``tol``; a singular Jacobian or an exhausted line search
    ends the iteration early with ``converged=False``.
    """
    x = np.asarray(x0, dtype=float).copy()
    F, J = fun_jac(x)
    fnorm = float(np.linalg.norm(F))
    n_iter = 0
    message = "residual tolerance reached"
    while fnorm > tol and n_iter < max_iter:
        try:
            d = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            message = "singular Jacobian"
            break
        if not np.all(np.isfinite(d)):
            message = "singular Jacobian"
            break
        step = 1.0
        accepted = False
        for _ in range(max_halvings):
            x_new = x + step * d
            F_new, J_new = fun_jac(x_new)
            new_norm = float(np.linalg.norm(F_new))
            if np.isfinite(new_norm) and new_norm < fnorm:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            message = "step halving exhausted"
            break
        x, F, J, fnorm = x_new, F_new, J_new, new_norm
        n_iter += 1
    else:
        if fnorm > tol:
            message = "max iterations reached"

    return SolveResult(
        x=x,
        fun=fnorm,
        grad_norm=fnorm,
        n_iter=n_iter,
        converged=fnorm <= tol,
        message=message,
    )
