"""Quadratic zero-curvature pair and its graded conditions.

``L = lambda^2 a + lambda mu - gamma`` and ``M = lambda^2 b - lambda pi - xi``
with ``b = r a``, ``xi = -phi_{a,c}(mu) + r gamma`` and ``pi = -r mu - c``.
Expanding ``L_t - M_s + [L, M]`` in powers of lambda gives

    P(lambda) = -R0 + lambda R1 - lambda^2 R2 - lambda^3 R3 + lambda^4 R4

where R0..R4 are the rows

    R0 = gamma_t - xi_s + [xi, gamma]
    R1 = mu_t + pi_s + [xi, mu] + [gamma, pi]
    R2 = [a, xi] + [mu, pi] + [gamma, b]
    R3 = [a, pi] + [b, mu]
    R4 = [a, b]
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynamics import ModelSpec, Trajectory, pi_field, spatial_derivative, xi_field

DEFAULT_LAMBDAS = (-2.0, -1.0, 0.5, 1.0, 2.0)
ROW_SIGNS = (-1.0, 1.0, -1.0, -1.0, 1.0)


class ZcrNotApplicable(ValueError):
    pass


def _hamiltonian(model: ModelSpec) -> None:
    if model.system == "chiral":
        raise ZcrNotApplicable("quadratic ZCR not applicable to the chiral model")


@dataclass
class ZcrPair:
    """Coefficients of L and M in ascending powers of lambda (index 0 = lambda^0)."""

    L_coeffs: tuple[np.ndarray, np.ndarray, np.ndarray]
    M_coeffs: tuple[np.ndarray, np.ndarray, np.ndarray]
    lambda_samples: tuple[float, ...] = DEFAULT_LAMBDAS

    def L(self, lam: float) -> np.ndarray:
        return self.L_coeffs[0] + lam * self.L_coeffs[1] + lam**2 * self.L_coeffs[2]

    def M(self, lam: float) -> np.ndarray:
        return self.M_coeffs[0] + lam * self.M_coeffs[1] + lam**2 * self.M_coeffs[2]


def build_lm(mu, gamma, model: ModelSpec, lambda_samples: Sequence[float] = DEFAULT_LAMBDAS,
             b: np.ndarray | None = None) -> ZcrPair:
    """Assemble L and M from the fields.  ``b`` overrides ``r a`` (fault injection)."""
    _hamiltonian(model)
    mu = np.asarray(mu, float)
    gamma = np.asarray(gamma, float)
    xi = xi_field(model, mu, gamma)
    pi = pi_field(model, mu)
    a = np.broadcast_to(model.a, mu.shape)
    bb = np.broadcast_to(model.b if b is None else b, mu.shape)
    return ZcrPair((-gamma, mu, a), (-xi, -pi, bb), tuple(lambda_samples))


def static_rows(mu, gamma, model: ModelSpec, b: np.ndarray | None = None) -> dict[int, np.ndarray]:
    """Pointwise R2, R3, R4 arrays."""
    _hamiltonian(model)
    tbl = model.table
    mu = np.asarray(mu, float)
    gamma = np.asarray(gamma, float)
    a = model.a
    b = model.b if b is None else b
    xi = xi_field(model, mu, gamma)
    pi = pi_field(model, mu)
    br = tbl.bracket_array
    r2 = br(a, xi) + br(mu, pi) + br(gamma, b)
    r3 = br(a, pi) + br(b, mu)
    r4 = np.broadcast_to(br(a, b), mu.shape)
    return {2: r2, 3: r3, 4: r4}


def _norm(x: np.ndarray) -> float:
    x = np.asarray(x)
    return float(np.max(np.linalg.norm(x, axis=-1))) if x.size else 0.0


def check_static_conditions(mu, gamma, model: ModelSpec, b: np.ndarray | None = None) -> dict[int, float]:
    """Grid-max Euclidean norms of the lambda^2, lambda^3, lambda^4 rows."""
    return {p: _norm(v) for p, v in static_rows(mu, gamma, model, b).items()}


def input_scale(mu, gamma, model: ModelSpec) -> float:
    """Scale used for relative static tolerances: products of field and parameter sizes."""
    fields = max(_norm(mu), _norm(gamma), 1.0)
    params = max(float(np.linalg.norm(model.a)), float(np.linalg.norm(model.c)), abs(model.r), 1.0)
    phi = max(model.phi_max, 1.0)
    return fields * fields * params * params * phi


def dynamic_rows(mu_prev, mu_next, gamma_prev, gamma_next, mu, gamma, dt2: float, ds: float,
                 model: ModelSpec) -> dict[int, np.ndarray]:
    """R0 and R1 with time derivatives ``(f_next - f_prev) / dt2``."""
    tbl = model.table
    xi = xi_field(model, mu, gamma)
    pi = pi_field(model, mu)
    gamma_t = (gamma_next - gamma_prev) / dt2
    mu_t = (mu_next - mu_prev) / dt2
    br = tbl.bracket_array
    r0 = gamma_t - spatial_derivative(xi, ds) + br(xi, gamma)
    r1 = mu_t + spatial_derivative(pi, ds) + br(xi, mu) + br(gamma, pi)
    return {0: r0, 1: r1}


def polynomial_residual(pair: ZcrPair, mu_t, gamma_t, ds: float, model: ModelSpec, lam: float) -> np.ndarray:
    """``L_t - M_s + [L, M]`` at one lambda; ``a`` and ``b`` are constant."""
    L_t = lam * np.asarray(mu_t) - np.asarray(gamma_t)
    M_s = spatial_derivative(pair.M(lam), ds)
    return L_t - M_s + model.table.bracket_array(pair.L(lam), pair.M(lam))


def rows_to_polynomial(rows: dict[int, np.ndarray], lam: float) -> np.ndarray:
    return sum(ROW_SIGNS[p] * lam**p * rows[p] for p in range(5))


def curvature_residual(traj: Trajectory, model: ModelSpec,
                       lambda_samples: Sequence[float] = DEFAULT_LAMBDAS) -> np.ndarray:
    """Grid-max ``||L_t - M_s + [L, M]||`` at every interior snapshot.

    Returns an array of shape ``(len(lambda_samples), len(traj) - 2)``; time
    derivatives are second-order centered differences of the snapshots.
    """
    _hamiltonian(model)
    if len(traj) < 3:
        raise ValueError("need at least 3 snapshots for centered time differences")
    dts = np.diff(traj.times)
    if not np.allclose(dts, dts[0], rtol=1e-9, atol=0.0):
        raise ValueError("snapshots must be equally spaced in time")
    dt2 = 2.0 * float(dts[0])
    out = np.zeros((len(lambda_samples), len(traj) - 2))
    for n in range(1, len(traj) - 1):
        mu, gamma = traj.mu[n], traj.gamma[n]
        pair = build_lm(mu, gamma, model, lambda_samples)
        mu_t = (traj.mu[n + 1] - traj.mu[n - 1]) / dt2
        gamma_t = (traj.gamma[n + 1] - traj.gamma[n - 1]) / dt2
        for i, lam in enumerate(lambda_samples):
            out[i, n - 1] = _norm(polynomial_residual(pair, mu_t, gamma_t, traj.ds, model, lam))
    return out


def residual_from_window(states, dt: float, model: ModelSpec, lambda_samples: Sequence[float],
                         where: str = "center") -> list[float]:
    """Residual at one snapshot of a three-state window ``(s0, s1, s2)``.

    ``where`` selects the snapshot: ``"first"`` and ``"last"`` use one-sided
    second-order differences, ``"center"`` the centered one.
    """
    s0, s1, s2 = states
    if where == "center":
        cur = s1
        mu_t = (s2.mu - s0.mu) / (2 * dt)
        g_t = (s2.gamma - s0.gamma) / (2 * dt)
    elif where == "first":
        cur = s0
        mu_t = (-3 * s0.mu + 4 * s1.mu - s2.mu) / (2 * dt)
        g_t = (-3 * s0.gamma + 4 * s1.gamma - s2.gamma) / (2 * dt)
    elif where == "last":
        cur = s2
        mu_t = (3 * s2.mu - 4 * s1.mu + s0.mu) / (2 * dt)
        g_t = (3 * s2.gamma - 4 * s1.gamma + s0.gamma) / (2 * dt)
    else:
        raise ValueError(where)
    pair = build_lm(cur.mu, cur.gamma, model, lambda_samples)
    return [_norm(polynomial_residual(pair, mu_t, g_t, cur.ds, model, lam)) for lam in lambda_samples]
