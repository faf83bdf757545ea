"""Conserved quantities, energies and characteristic relations."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraError
from .dynamics import ModelSpec, StrandState, Trajectory, spatial_derivative

SO3_FAMILY = ("so3", "so4")


@dataclass
class DiagnosticsRecord:
    t: float
    C1: float = float("nan")
    C2: float = float("nan")
    C3: float = float("nan")
    energy_h: float = float("nan")
    mu_par_advect_err: float = float("nan")
    zcr_residuals: list[float] = field(default_factory=list)

    def row(self) -> list[float]:
        return [self.t, self.C1, self.C2, self.C3, self.energy_h, self.mu_par_advect_err,
                *self.zcr_residuals]


def integrate(f: np.ndarray, ds: float) -> float:
    """Periodic rectangle rule (equal to the trapezoid rule on a periodic grid)."""
    return float(np.sum(f) * ds)


def _so3_blocks(model: ModelSpec, mu: np.ndarray, gamma: np.ndarray):
    """Yield ``(mu, gamma, a, c, A)`` for each so(3) block of an so(3)-family model."""
    if model.algebra_id == "so3":
        a, c = model.so3_scalars
        yield mu, gamma, a, c, np.asarray(model.axis, float)
    elif model.algebra_id == "so4":
        e3 = np.array([0.0, 0.0, 1.0])
        for blk in (0, 1):
            sl = slice(3 * blk, 3 * blk + 3)
            yield mu[:, sl], gamma[:, sl], float(model.a_cartan[blk]), float(model.c_cartan[blk]), e3
    else:
        raise AlgebraError(f"conserved quantities need an so(3)-family model, got {model.algebra_id}")


def _perp(x: np.ndarray, A: np.ndarray) -> np.ndarray:
    Ahat = A / np.linalg.norm(A)
    return x - (x @ Ahat)[:, None] * Ahat


def conserved_so3(state: StrandState, model: ModelSpec) -> tuple[float, float, float]:
    """``C1 = int (c/a)|mu_perp|^2 - 2c A.gamma``, ``C2 = int mu.gamma``, ``C3 = int mu.A``.

    For so(4) the values are summed over the two so(3) blocks.
    """
    if model.system != "compact":
        raise AlgebraError("conserved quantities are defined for the compact system")
    C1 = C2 = C3 = 0.0
    for mu, gamma, a, c, A in _so3_blocks(model, state.mu, state.gamma):
        perp = _perp(mu, A)
        C1 += integrate((c / a) * np.sum(perp * perp, axis=1) - 2.0 * c * (gamma @ A), state.ds)
        C2 += integrate(np.sum(mu * gamma, axis=1), state.ds)
        C3 += integrate(mu @ A, state.ds)
    return C1, C2, C3


def energy_density(state: StrandState, model: ModelSpec) -> np.ndarray:
    """``-1/2 K(phi_{a,c}(mu), mu) + K(r mu + c, gamma)`` at every grid point."""
    if model.system == "chiral":
        raise NotImplementedError("energy of the chiral system is not implemented")
    tbl = model.table
    mu, gamma = state.mu, state.gamma
    return (-0.5 * tbl.pairing_array(model.phi(mu), mu)
            + tbl.pairing_array(model.r * mu + model.c, gamma))


def energy(state: StrandState, model: ModelSpec) -> float:
    return integrate(energy_density(state, model), state.ds)


def energy_density_so3(state: StrandState, model: ModelSpec) -> np.ndarray:
    """Closed form ``(c/a)|mu_perp|^2 - 2r mu.gamma - 2c A.gamma``."""
    (mu, gamma, a, c, A), = _so3_blocks(model, state.mu, state.gamma)
    perp = _perp(mu, A)
    return ((c / a) * np.sum(perp * perp, axis=1) - 2.0 * model.r * np.sum(mu * gamma, axis=1)
            - 2.0 * c * (gamma @ A))


# ---------------------------------------------------------------------------
# characteristic relations


def periodic_interp(values: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Four-point cubic Lagrange interpolation at fractional grid indices ``x``."""
    values = np.asarray(values, float)
    N = values.shape[0]
    x = np.asarray(x, float)
    j = np.floor(x).astype(int)
    f = x - j
    w = (
        -f * (f - 1.0) * (f - 2.0) / 6.0,
        (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0,
        -(f + 1.0) * f * (f - 2.0) / 2.0,
        (f + 1.0) * f * (f - 1.0) / 6.0,
    )
    out = np.zeros(x.shape + values.shape[1:])
    for off, wk in zip((-1, 0, 1, 2), w):
        wk = wk.reshape(wk.shape + (1,) * (values.ndim - 1))
        out = out + wk * values[(j + off) % N]
    return out


def cartan_part(model: ModelSpec, mu: np.ndarray) -> np.ndarray:
    """Cartan coordinates of ``mu`` (the component along ``A`` for so(3))."""
    if model.algebra_id == "so3" and model.axis is not None:
        A = np.asarray(model.axis, float)
        return (mu @ (A / np.linalg.norm(A)))[:, None]
    return mu[:, list(model.table.cartan_indices)]


def advection_error(initial: StrandState, state: StrandState, model: ModelSpec) -> float:
    """Max deviation of the Cartan part of ``mu`` from pure transport at speed ``-r``.

    The Cartan part obeys ``(d_t - r d_s) mu_c = 0`` so ``mu_c(t, s) = mu_c(0, s + r t)``.
    """
    q0 = cartan_part(model, initial.mu)
    q = cartan_part(model, state.mu)
    shift = model.r * (state.t - initial.t) / state.ds
    ref = periodic_interp(q0, np.arange(state.N) + shift)
    return float(np.max(np.abs(q - ref)))


@dataclass
class CharacteristicReport:
    transport_q1: float  # (c/a)|mu_perp|^2 - 2c A.gamma along characteristics
    balance_mu_gamma: float  # (d_t - r d_s)(mu.gamma) + (c/2a) d_s |mu_perp|^2
    transport_mu_par: float  # mu.A along characteristics
    gamma_par_lhs: float
    gamma_par_rhs: float
    gamma_par_mismatch: float
    gamma_sq_lhs: float
    gamma_sq_rhs: float
    gamma_sq_mismatch: float

    def conservation_residuals(self) -> dict[str, float]:
        return {"q1": self.transport_q1, "mu.gamma": self.balance_mu_gamma,
                "mu.A": self.transport_mu_par}


def characteristic_checks(traj: Trajectory, model: ModelSpec) -> CharacteristicReport:
    """Evaluate the five characteristic-derivative relations along a so(3) trajectory."""
    if model.algebra_id != "so3":
        raise AlgebraError("characteristic checks are implemented for so(3)")
    if len(traj) < 3:
        raise ValueError("need at least 3 snapshots")
    a, c = model.so3_scalars
    p = c / a
    r = model.r
    A = np.asarray(model.axis, float)
    Ahat = A / np.linalg.norm(A)
    ds = traj.ds
    N = traj.mu.shape[1]

    def q1(mu, gamma):
        perp = _perp(mu, A)
        return p * np.sum(perp * perp, axis=1) - 2.0 * c * (gamma @ A)

    # transported scalars: q(t, s_j) against q(0, s_j + r t)
    base1 = q1(traj.mu[0], traj.gamma[0])
    base3 = traj.mu[0] @ A
    t1 = t3 = 0.0
    for n in range(1, len(traj)):
        x = np.arange(N) + r * (traj.times[n] - traj.times[0]) / ds
        t1 = max(t1, float(np.max(np.abs(q1(traj.mu[n], traj.gamma[n]) - periodic_interp(base1, x)))))
        t3 = max(t3, float(np.max(np.abs(traj.mu[n] @ A - periodic_interp(base3, x)))))

    dt2 = 2.0 * traj.dt
    bal = gp_l = gp_r = gp_m = gs_l = gs_r = gs_m = 0.0
    for n in range(1, len(traj) - 1):
        mu, gamma = traj.mu[n], traj.gamma[n]
        perp = _perp(mu, A)

        def char(f_prev, f_cur, f_next):
            return (f_next - f_prev) / dt2 - r * spatial_derivative(f_cur, ds)

        def dot_series(fun):
            return [fun(traj.mu[k], traj.gamma[k]) for k in (n - 1, n, n + 1)]

        mg = char(*dot_series(lambda m_, g_: np.sum(m_ * g_, axis=1)))
        bal = max(bal, float(np.max(np.abs(
            mg + 0.5 * p * spatial_derivative(np.sum(perp * perp, axis=1), ds)))))

        lhs4 = char(*dot_series(lambda m_, g_: g_ @ A))
        rhs4 = p * (np.cross(perp, gamma) @ A)
        gp_l, gp_r = max(gp_l, float(np.max(np.abs(lhs4)))), max(gp_r, float(np.max(np.abs(rhs4))))
        gp_m = max(gp_m, float(np.max(np.abs(lhs4 - rhs4))))

        lhs5 = char(*dot_series(lambda m_, g_: np.sum(g_ * g_, axis=1)))
        g_perp = gamma - (gamma @ Ahat)[:, None] * Ahat
        rhs5 = -2.0 * p * np.sum(g_perp * spatial_derivative(perp, ds), axis=1)
        gs_l, gs_r = max(gs_l, float(np.max(np.abs(lhs5)))), max(gs_r, float(np.max(np.abs(rhs5))))
        gs_m = max(gs_m, float(np.max(np.abs(lhs5 - rhs5))))

    return CharacteristicReport(t1, bal, t3, gp_l, gp_r, gp_m, gs_l, gs_r, gs_m)


# ---------------------------------------------------------------------------
# flows of C3 and C2


def rotate_about_axis(state: StrandState, axis, theta: float) -> StrandState:
    """Rigid rotation of every ``mu_j`` and ``gamma_j`` about ``axis`` (so(3))."""
    k = np.asarray(axis, float)
    k = k / np.linalg.norm(k)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    R = np.eye(3) + np.sin(theta) * K + (1 - np.cos(theta)) * K @ K
    out = state.copy()
    out.mu = state.mu @ R.T
    out.gamma = state.gamma @ R.T
    return out


def translate(state: StrandState, cells: int) -> StrandState:
    out = state.copy()
    out.mu = np.roll(state.mu, cells, axis=0)
    out.gamma = np.roll(state.gamma, cells, axis=0)
    return out
