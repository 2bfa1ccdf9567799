"""Reconstruction solvers.

The compressed-sensing estimate minimizes tr(chi) over PSD matrices inside
the data-fit ball ||A(chi) - Y||_2^2 <= eps.  The solve uses consensus ADMM
on the splitting (chi) vs (w, z) with w = chi constrained to the PSD cone
(plus the trace objective) and z = A(chi) constrained to the eps-ball:
the chi-update is a cached linear solve, the w-update an eigenvalue
shift-and-clip, the z-update an exact ball projection.

Feasibility is probed separately by accelerated projected gradient descent
on ||A(chi) - Y||_2^2 over the PSD cone, and an infeasible problem is
reported as such rather than as a solver failure.

A maximum-likelihood baseline (iterative R*rho*R with step dilution) is
included for cross-checks.
"""

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from .exceptions import (
    DegenerateSolutionError,
    FeasibilityUndeterminedError,
    InvalidArgumentError,
)
from .states import DensityMatrix
from .pauli import SettingsPlan, herm_to_vec, sensing_matrix, vec_to_herm

__all__ = [
    "SolverConfig",
    "ReconstructionResult",
    "reconstruct",
    "check_feasible",
    "mle_estimate",
]

# relative slack turning the strict inequality of the data-fit ball into
# a numerically meaningful closed constraint
_STRICT_SLACK = 1e-9


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 5000
    primal_tolerance: float = 1e-9
    constraint_tolerance: float = None  # defaults to 1e-6 * epsilon
    penalty_parameter: float = 1.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InvalidArgumentError("max_iterations must be positive")
        if self.primal_tolerance <= 0 or self.penalty_parameter <= 0:
            raise InvalidArgumentError("tolerances and penalty must be positive")
        if self.constraint_tolerance is not None and self.constraint_tolerance <= 0:
            raise InvalidArgumentError("constraint_tolerance must be positive")

    def resolved_constraint_tolerance(self, epsilon):
        if self.constraint_tolerance is not None:
            return self.constraint_tolerance
        return 1e-6 * epsilon


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True)
class ReconstructionResult:
    estimate: DensityMatrix  # None when status == "infeasible"
    raw_trace: float
    epsilon: float
    status: str  # converged | infeasible | iteration_limit
    iterations: int
    residual: float

    def to_json_dict(self):
        return {
            "status": self.status,
            "iterations": self.iterations,
            "residual": self.residual,
            "raw_trace": self.raw_trace,
            "epsilon": self.epsilon,
            "estimate": None if self.estimate is None else self.estimate.to_json_dict(),
        }


@lru_cache(maxsize=64)
def _workspace(plan):
    """Per-plan dense operator data: A, its Gram factorization, and norms.

    The Cholesky factor is for I + (A/sigma_max)^T (A/sigma_max): the ADMM
    below works with the spectrally normalized operator so that both
    splitting blocks live on comparable scales.
    """
    A = sensing_matrix(plan)
    D = A.shape[1]
    gram = A.T @ A
    sigma_max_sq = float(
        scipy.linalg.eigh(gram, eigvals_only=True, subset_by_index=(D - 1, D - 1))[0]
    )
    cho = scipy.linalg.cho_factor(np.eye(D) + gram / sigma_max_sq, lower=True)
    return A, cho, sigma_max_sq


def _prepare(data):
    plan = SettingsPlan(data.words, data.shots)
    y = data.counts_matrix().ravel()
    d = data.dim
    return plan, y, d


def _project_psd_vec(vec, d, shift=0.0):
    """PSD projection in coordinates, with optional eigenvalue shift (trace prox)."""
    vals, vecs = np.linalg.eigh(vec_to_herm(vec, d))
    vals = np.clip(vals - shift, 0.0, None)
    return herm_to_vec((vecs * vals) @ vecs.conj().T)


def _project_ball(v, center, radius):
    dv = v - center
    nrm = np.linalg.norm(dv)
    if nrm <= radius:
        return v
    return center + dv * (radius / nrm)


def check_feasible(data, epsilon, config=None):
    """Minimize ||A(chi) - Y||_2^2 over PSD chi; feasible iff min < epsilon.

    Accelerated projected gradient descent with adaptive restarts; exits
    early once any PSD point inside the ball is found.
    """
    if epsilon <= 0 and epsilon != 0.0:
        raise InvalidArgumentError("epsilon must be positive")
    config = config or DEFAULT_CONFIG
    plan, y, d = _prepare(data)
    A, _, sigma_max_sq = _workspace(plan)
    eps_eff = epsilon * (1.0 - _STRICT_SLACK)

    step = 1.0 / (2.0 * sigma_max_sq)
    x = _project_psd_vec(A.T @ y / max(sigma_max_sq, 1e-300), d)
    v = x.copy()
    t = 1.0
    history = []
    obj = None
    for iteration in range(config.max_iterations):
        grad = 2.0 * (A.T @ (A @ v - y))
        x_new = _project_psd_vec(v - step * grad, d)
        r_new = A @ x_new - y
        obj_new = float(r_new @ r_new)
        if obj is None or obj_new <= obj * (1.0 + 1e-12) + 1e-15:
            t_new = (1.0 + np.sqrt(1.0 + 4.0 * t * t)) / 2.0
            v = x_new + ((t - 1.0) / t_new) * (x_new - x)
            x, t = x_new, t_new
            obj = obj_new if obj is None else min(obj, obj_new)
        else:
            # momentum overshot: restart from the best iterate
            t = 1.0
            v = x.copy()
        history.append(obj)
        if obj < eps_eff:
            return True, obj
        if len(history) > 50:
            window = history[-50:]
            tol = max(1e-12, 1e-10 * obj)
            # far from the decision boundary the verdict is settled long
            # before the objective converges to full precision
            gap = obj - eps_eff
            if gap > 0:
                tol = max(tol, 1e-4 * gap)
            if window[0] - window[-1] <= tol:
                return obj < eps_eff, obj
    raise FeasibilityUndeterminedError(
        f"feasibility probe did not stabilize in {config.max_iterations} iterations "
        f"(last residual {obj:.6g}, epsilon {epsilon:.6g})"
    )


def reconstruct(data, epsilon, config=None):
    """Trace minimization inside the eps-ball, then renormalization.

    Returns a ReconstructionResult; status is "infeasible" when no PSD
    matrix fits the data within epsilon.
    """
    if epsilon <= 0:
        raise InvalidArgumentError("epsilon must be positive")
    config = config or DEFAULT_CONFIG
    plan, y, d = _prepare(data)
    A, cho, sigma_max_sq = _workspace(plan)
    eps_eff = epsilon * (1.0 - _STRICT_SLACK)
    radius = np.sqrt(eps_eff)
    ctol = config.resolved_constraint_tolerance(epsilon)

    if float(y @ y) <= eps_eff:
        raise DegenerateSolutionError(
            "epsilon is so large that chi = 0 fits the data; no meaningful state"
        )

    feasible, min_residual = check_feasible(data, epsilon, config)
    if not feasible:
        return ReconstructionResult(
            estimate=None,
            raw_trace=0.0,
            epsilon=epsilon,
            status="infeasible",
            iterations=0,
            residual=min_residual,
        )

    # spectrally normalized operator: both splitting blocks at O(1) scale
    sigma = np.sqrt(sigma_max_sq)
    An = A / sigma
    yn = y / sigma
    radius_n = radius / sigma

    mu = config.penalty_parameter
    relax = 1.7  # over-relaxation
    x = np.zeros(d * d)
    x[:d] = 1.0 / d  # start from the maximally mixed state
    w = x.copy()
    z = _project_ball(An @ x, yn, radius_n)
    u1 = np.zeros_like(x)
    u2 = np.zeros_like(z)

    status = "iteration_limit"
    iteration = 0
    for iteration in range(1, config.max_iterations + 1):
        x_prev = x
        rhs = (w - u1) + An.T @ (z - u2)
        x = scipy.linalg.cho_solve(cho, rhs)
        ax = An @ x
        xh = relax * x + (1.0 - relax) * w
        axh = relax * ax + (1.0 - relax) * z
        w_prev, z_prev = w, z
        w = _project_psd_vec(xh + u1, d, shift=1.0 / mu)
        z = _project_ball(axh + u2, yn, radius_n)
        u1 = u1 + xh - w
        u2 = u2 + axh - z

        if iteration % 10 == 0 or iteration == config.max_iterations:
            r_norm = np.sqrt(
                np.linalg.norm(x - w) ** 2 + np.linalg.norm(ax - z) ** 2
            )
            s_norm = mu * np.linalg.norm((w - w_prev) + An.T @ (z - z_prev))
            step_change = np.linalg.norm(x - x_prev)
            scale = max(1.0, np.linalg.norm(x))
            rw = A @ w - y
            residual = float(rw @ rw)
            small_change = step_change <= config.primal_tolerance * scale
            residuals_tight = max(r_norm, s_norm) <= 1e-9 * scale
            if (small_change or residuals_tight) and residual <= eps_eff + ctol:
                status = "converged"
                break
            # residual balancing keeps primal and dual progress comparable
            if iteration % 50 == 0:
                if r_norm > 10.0 * s_norm:
                    mu *= 2.0
                    u1 /= 2.0
                    u2 /= 2.0
                elif s_norm > 10.0 * r_norm:
                    mu /= 2.0
                    u1 *= 2.0
                    u2 *= 2.0

    chi = vec_to_herm(w, d)  # w is PSD by construction
    raw_trace = float(chi.trace().real)
    rw = A @ w - y
    residual = float(rw @ rw)
    if raw_trace < 1e-6:
        raise DegenerateSolutionError(
            f"solution trace {raw_trace:.3e} is degenerate; epsilon is too large"
        )
    vals, vecs = np.linalg.eigh(chi / raw_trace)
    vals = np.clip(vals, 0.0, None)
    vals /= vals.sum()
    estimate = DensityMatrix((vecs * vals) @ vecs.conj().T)
    return ReconstructionResult(
        estimate=estimate,
        raw_trace=raw_trace,
        epsilon=epsilon,
        status=status,
        iterations=iteration,
        residual=residual,
    )


def _log_likelihood(counts, probs):
    mask = counts > 0
    return float(np.sum(counts[mask] * np.log(probs[mask])))


def mle_estimate(data, max_iterations=2000, tolerance=1e-10):
    """Iterative R*rho*R maximum-likelihood estimate with step dilution.

    Accepted iterations never decrease the log-likelihood; on a decrease
    the step is diluted by 0.5 via R_a = (1 + a R)/(1 + a).
    """
    plan, _, d = _prepare(data)
    unit_plan = SettingsPlan(plan.words, (1,) * plan.n_settings)
    P = sensing_matrix(unit_plan)  # probabilities, not counts
    counts = data.counts_matrix().ravel()

    rho = np.eye(d, dtype=complex) / d
    identity = np.eye(d, dtype=complex)
    ll = None
    limit_hit = True
    for _ in range(max_iterations):
        probs = np.clip(P @ herm_to_vec(rho), 1e-15, None)
        if ll is None:
            ll = _log_likelihood(counts, probs)
        r_op = vec_to_herm(P.T @ (counts / probs), d)
        r_op /= counts.sum()  # scale-free; normalization restored below

        alpha = 1.0
        accepted = None
        for _ in range(60):
            r_step = (identity + alpha * r_op) / (1.0 + alpha)
            cand = r_step @ rho @ r_step
            cand = (cand + cand.conj().T) / 2.0
            cand /= cand.trace().real
            cand_probs = np.clip(P @ herm_to_vec(cand), 1e-15, None)
            cand_ll = _log_likelihood(counts, cand_probs)
            if cand_ll >= ll - 1e-12:
                accepted = (cand, cand_ll)
                break
            alpha *= 0.5
        if accepted is None:
            limit_hit = False
            break
        cand, cand_ll = accepted
        change = np.linalg.norm(cand - rho)
        rho, ll = cand, cand_ll
        if change < tolerance:
            limit_hit = False
            break
    if limit_hit:
        warnings.warn(
            "MLE hit its iteration limit; returning the best iterate", RuntimeWarning
        )
    vals, vecs = np.linalg.eigh(rho)
    vals = np.clip(vals, 0.0, None)
    vals /= vals.sum()
    return DensityMatrix((vecs * vals) @ vecs.conj().T)
