"""Method-of-lines evolution of G-Strand fields on a periodic grid.

The dynamical variables are ``(mu, gamma)`` for the Hamiltonian systems and
``(xi, gamma)`` for the chiral model.  Fields are stored as ``(N, dim)``
coefficient arrays; the spatial derivative is the periodic fourth-order
central difference and time stepping is classical RK4.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Sequence

import numpy as np

from .algebra import AlgebraError, AlgebraTable, build_algebra
from .sectional import SectionalSpec, make_sectional, sectional_so3

SYSTEMS = ("normal", "compact", "chiral")
BLOWUP_NORM = 1e100


class BlowUpError(RuntimeError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, t: float, max_norm: float):
        super().__init__(f"blow-up at t = {t:.17g} (max norm before failure {max_norm:.6g})")
        self.t = t
        self.max_norm = max_norm


@dataclass
class StrandState:
    """Fields on a periodic uniform grid; ``mu`` holds ``xi`` for the chiral model."""

    algebra_id: str
    ds: float
    mu: np.ndarray
    gamma: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.mu = np.array(self.mu, dtype=float)
        self.gamma = np.array(self.gamma, dtype=float)
        if self.mu.shape != self.gamma.shape or self.mu.ndim != 2:
            raise ValueError(f"mu {self.mu.shape} and gamma {self.gamma.shape} must be equal (N, dim)")
        if self.N < 8:
            raise ValueError(f"need at least 8 grid points, got {self.N}")
        if not self.ds > 0:
            raise ValueError("grid spacing must be positive")

    @property
    def N(self) -> int:
        return self.mu.shape[0]

    @property
    def Ls(self) -> float:
        return self.N * self.ds

    @property
    def s(self) -> np.ndarray:
        return np.arange(self.N) * self.ds

    def copy(self) -> "StrandState":
        return StrandState(self.algebra_id, self.ds, self.mu.copy(), self.gamma.copy(), self.t)

    def max_norm(self) -> float:
        return float(max(np.max(np.linalg.norm(self.mu, axis=1)), np.max(np.linalg.norm(self.gamma, axis=1))))


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Which right-hand side to evolve and its constant parameters.

    ``a`` and ``c`` are coefficient vectors of the (realized) Cartan elements;
    ``sectional`` is ``phi_{a,c} = ad_a^{-1} ad_c`` used by the Hamiltonian
    systems.  ``b = r a`` is implied and never stored.  For so(3) models with
    an axis that is not along the catalog Cartan direction ``e3``,
    ``sectional`` is None and the closed-form projection is used instead.
    """

    algebra_id: str
    system: str
    r: float = 0.0
    a: np.ndarray | None = None
    c: np.ndarray | None = None
    sectional: SectionalSpec | None = None
    a_cartan: tuple = ()
    c_cartan: tuple = ()
    axis: np.ndarray | None = None
    so3_scalars: tuple[float, float] | None = None  # (a, c) for so3 models

    @property
    def table(self) -> AlgebraTable:
        return build_algebra(self.algebra_id)

    @property
    def b(self) -> np.ndarray:
        return self.r * self.a

    def phi(self, x: np.ndarray) -> np.ndarray:
        """``phi_{a,c}`` applied to coefficient arrays."""
        if self.sectional is not None:
            return self.sectional.apply_array(x)
        if self.so3_scalars is not None:
            a, c = self.so3_scalars
            return sectional_so3(a, c, self.axis, x)
        raise AlgebraError(f"model for {self.system} system has no sectional operator")

    @property
    def phi_max(self) -> float:
        if self.sectional is not None:
            return self.sectional.max_ratio
        if self.so3_scalars is not None:
            a, c = self.so3_scalars
            return abs(c / a)
        return 0.0


def make_model(algebra_id: str, system: str, r: float = 0.0,
               a_cartan: Sequence = (), c_cartan: Sequence = ()) -> ModelSpec:
    """Model with Cartan coordinates for ``a`` (must be regular) and ``c``."""
    if system not in SYSTEMS:
        raise ValueError(f"unknown system {system!r}; expected one of {SYSTEMS}")
    tbl = build_algebra(algebra_id)
    if system == "chiral":
        return ModelSpec(algebra_id, "chiral", float(r))
    if not tbl.has_root_data:
        raise AlgebraError(f"{algebra_id} has no root data; only the chiral system applies")
    # phi_{a,c} = ad_a^{-1} ad_c: ratios <alpha, c>/<alpha, a>, requires a regular
    sect = make_sectional(tbl, system, a_cartan=tuple(c_cartan), c_cartan=tuple(a_cartan))
    a = tbl.cartan_element([float(v) for v in a_cartan])
    c = tbl.cartan_element([float(v) for v in c_cartan])
    axis = None
    scalars = None
    if algebra_id == "so3":
        axis = np.array([0.0, 0.0, 1.0])
        scalars = (float(a_cartan[0]), float(c_cartan[0]))
    return ModelSpec(algebra_id, system, float(r), a, c, sect,
                     tuple(a_cartan), tuple(c_cartan), axis, scalars)


def so3_model(a_scalar: float, c_scalar: float, r: float = 0.0, axis=(0.0, 0.0, 1.0)) -> ModelSpec:
    """Compact so(3) model with ``a = a_scalar A`` and ``c = c_scalar A``."""
    A = np.array(axis, dtype=float)
    norm = np.linalg.norm(A)
    if norm == 0:
        raise ValueError("axis must be nonzero")
    if a_scalar == 0:
        raise AlgebraError("a must be regular (a_scalar != 0)")
    if np.allclose(A[:2], 0.0, atol=0.0):
        base = make_model("so3", "compact", r, (a_scalar * A[2],), (c_scalar * A[2],))
        return replace(base, axis=A, so3_scalars=(float(a_scalar), float(c_scalar)))
    return ModelSpec("so3", "compact", float(r), a_scalar * A, c_scalar * A, None,
                     (), (), A, (float(a_scalar), float(c_scalar)))


# ---------------------------------------------------------------------------
# spatial operator


def spatial_derivative(f: np.ndarray, ds: float) -> np.ndarray:
    """Periodic fourth-order central difference along axis 0."""
    f = np.asarray(f, dtype=float)
    if f.shape[0] < 5:
        raise ValueError(f"stencil needs at least 5 grid points, got {f.shape[0]}")
    fp1, fm1 = np.roll(f, -1, axis=0), np.roll(f, 1, axis=0)
    fp2, fm2 = np.roll(f, -2, axis=0), np.roll(f, 2, axis=0)
    # differences first: exact zero on constants
    return (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * ds)


def effective_wavenumber(k: float, ds: float) -> float:
    """Wavenumber seen by :func:`spatial_derivative` for ``exp(i k s)``."""
    return (8.0 * math.sin(k * ds) - math.sin(2.0 * k * ds)) / (6.0 * ds)


# ---------------------------------------------------------------------------
# right-hand sides


def _threads() -> int:
    raw = os.environ.get("GSTRAND_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def _brackets(tbl: AlgebraTable, pairs, threads: int):
    """Brackets of several ``(x, y)`` array pairs, optionally split over grid rows.

    Each row is computed independently, so the result does not depend on the
    number of threads.
    """
    if threads <= 1:
        return [tbl.bracket_array(x, y) for x, y in pairs]
    n = pairs[0][0].shape[0]
    bounds = np.linspace(0, n, min(threads, n) + 1).astype(int)
    chunks = list(zip(bounds[:-1], bounds[1:]))
    outs = [np.empty(np.broadcast_shapes(x.shape, y.shape)) for x, y in pairs]

    def work(lo_hi):
        lo, hi = lo_hi
        for out, (x, y) in zip(outs, pairs):
            xs = x[lo:hi] if x.ndim == 2 else x
            ys = y[lo:hi] if y.ndim == 2 else y
            out[lo:hi] = tbl.bracket_array(xs, ys)

    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        list(pool.map(work, chunks))
    return outs


def _rhs_hamiltonian(state: StrandState, model: ModelSpec, threads: int):
    tbl = model.table
    mu, gamma = state.mu, state.gamma
    phi = model.phi(mu)
    b1, b2, b3 = _brackets(tbl, [(phi, mu), (gamma, model.c), (phi, gamma)], threads)
    d = state.ds
    dmu = model.r * spatial_derivative(mu, d) + b1 + b2
    dgamma = model.r * spatial_derivative(gamma, d) - spatial_derivative(phi, d) + b3
    return dmu, dgamma


def _require(state: StrandState, model: ModelSpec, system: str):
    if model.system != system:
        raise ValueError(f"model system is {model.system!r}, expected {system!r}")
    if state.algebra_id != model.algebra_id:
        raise AlgebraError(f"state on {state.algebra_id} with model on {model.algebra_id}")


def rhs_normal(state: StrandState, model: ModelSpec, threads: int | None = None):
    """``mu_t = r mu_s + [phi(mu), mu] + [gamma, c]``,
    ``gamma_t = r gamma_s - phi(mu)_s + [phi(mu), gamma]``."""
    _require(state, model, "normal")
    if model.sectional is None:
        raise ValueError("normal model has no sectional operator")
    return _rhs_hamiltonian(state, model, threads or _threads())


def rhs_compact(state: StrandState, model: ModelSpec, threads: int | None = None):
    """Same form as :func:`rhs_normal` with ``c`` standing for the realized ``i c``."""
    _require(state, model, "compact")
    return _rhs_hamiltonian(state, model, threads or _threads())


def rhs_chiral(state: StrandState, model: ModelSpec, threads: int | None = None):
    """``xi_t = gamma_s``, ``gamma_t = xi_s - [xi, gamma]``."""
    _require(state, model, "chiral")
    xi, gamma = state.mu, state.gamma
    (br,) = _brackets(model.table, [(xi, gamma)], threads or _threads())
    dxi = spatial_derivative(gamma, state.ds)
    dgamma = spatial_derivative(xi, state.ds) - br
    return dxi, dgamma


_RHS = {"normal": rhs_normal, "compact": rhs_compact, "chiral": rhs_chiral}


def rhs(state: StrandState, model: ModelSpec, threads: int | None = None):
    return _RHS[model.system](state, model, threads)


def rhs_so3_closed(mu, gamma, ds, a_scalar, c_scalar, r, axis=(0.0, 0.0, 1.0)):
    """so(3) affine Lie-Poisson equations written with cross products."""
    A = np.asarray(axis, dtype=float)
    p = c_scalar / a_scalar
    perp = sectional_so3(1.0, 1.0, A, mu)
    dmu = r * spatial_derivative(mu, ds) + p * np.cross(perp, mu) + c_scalar * np.cross(gamma, A)
    dgamma = (r * spatial_derivative(gamma, ds) - p * spatial_derivative(perp, ds)
              + p * np.cross(perp, gamma))
    return dmu, dgamma


# ---------------------------------------------------------------------------
# time stepping


def stable_dt(state: StrandState, model: ModelSpec, cfl: float = 0.4) -> float:
    """Heuristic step ``cfl * ds / (advection + bracket stiffness)``."""
    mu_max = float(np.max(np.linalg.norm(state.mu, axis=1)))
    g_max = float(np.max(np.linalg.norm(state.gamma, axis=1)))
    if model.system == "chiral":
        speed = 1.0 + mu_max + g_max
    else:
        axis_norm = float(np.linalg.norm(model.axis)) if model.axis is not None else 1.0
        speed = abs(model.r) + model.phi_max * (mu_max + g_max + axis_norm)
    return cfl * state.ds / (speed + 1e-12)


def step_rk4(state: StrandState, model: ModelSpec, dt: float, threads: int | None = None) -> StrandState:
    """One classical RK4 step; raises BlowUpError on non-finite values."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    f = _RHS[model.system]

    def at(mu, gamma, t):
        return StrandState(state.algebra_id, state.ds, mu, gamma, t)

    with np.errstate(over="ignore", invalid="ignore"):
        k1m, k1g = f(state, model, threads)
        s2 = at(state.mu + 0.5 * dt * k1m, state.gamma + 0.5 * dt * k1g, state.t + 0.5 * dt)
        k2m, k2g = f(s2, model, threads)
        s3 = at(state.mu + 0.5 * dt * k2m, state.gamma + 0.5 * dt * k2g, state.t + 0.5 * dt)
        k3m, k3g = f(s3, model, threads)
        s4 = at(state.mu + dt * k3m, state.gamma + dt * k3g, state.t + dt)
        k4m, k4g = f(s4, model, threads)
        mu = state.mu + (dt / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)
        gamma = state.gamma + (dt / 6.0) * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
    finite = np.all(np.isfinite(mu)) and np.all(np.isfinite(gamma))
    # quadratic brackets overflow long before the fields do
    if not finite or max(np.max(np.abs(mu)), np.max(np.abs(gamma))) > BLOWUP_NORM:
        raise BlowUpError(state.t + dt, state.max_norm())
    return at(mu, gamma, state.t + dt)


def time_grid(t_end: float, dt: float) -> tuple[int, float]:
    """Number of steps and the adjusted step that lands exactly on ``t_end``."""
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    n = max(1, math.ceil(t_end / dt - 1e-9))
    return n, t_end / n


@dataclass
class Trajectory:
    """Snapshots at equally spaced times."""

    algebra_id: str
    ds: float
    times: np.ndarray
    mu: np.ndarray  # (T, N, dim)
    gamma: np.ndarray

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0

    def state(self, n: int) -> StrandState:
        return StrandState(self.algebra_id, self.ds, self.mu[n], self.gamma[n], float(self.times[n]))

    def __len__(self) -> int:
        return len(self.times)


def iterate(state: StrandState, model: ModelSpec, dt: float, n_steps: int,
            threads: int | None = None) -> Iterator[StrandState]:
    """Yield the initial state and every subsequent RK4 step."""
    yield state
    t0 = state.t
    for i in range(1, n_steps + 1):
        state = step_rk4(state, model, dt, threads)
        state.t = t0 + i * dt  # no accumulated rounding in t
        yield state


def run(state: StrandState, model: ModelSpec, t_end: float, dt: float | None = None,
        cfl: float = 0.4, every: int = 1, threads: int | None = None,
        stop: Callable[[StrandState], bool] | None = None) -> Trajectory:
    """Integrate to ``state.t + t_end`` recording every ``every`` steps."""
    if dt is None:
        dt = stable_dt(state, model, cfl)
    n, dt = time_grid(t_end, dt)
    times, mus, gammas = [], [], []
    for i, s in enumerate(iterate(state, model, dt, n, threads)):
        if i % every == 0:
            times.append(s.t)
            mus.append(s.mu)
            gammas.append(s.gamma)
            if stop is not None and stop(s):
                break
    return Trajectory(state.algebra_id, state.ds, np.array(times), np.array(mus), np.array(gammas))


# ---------------------------------------------------------------------------
# initial data


def grid(N: int, Ls: float = 2.0 * math.pi) -> tuple[np.ndarray, float]:
    ds = Ls / N
    return np.arange(N) * ds, ds


def constant_state(algebra_id: str, mu0, gamma0, N: int, Ls: float = 2.0 * math.pi) -> StrandState:
    _, ds = grid(N, Ls)
    mu = np.tile(np.asarray(mu0, dtype=float), (N, 1))
    gamma = np.tile(np.asarray(gamma0, dtype=float), (N, 1))
    return StrandState(algebra_id, ds, mu, gamma)


def equilibrium_state(m: float, n: float, A_axis=(0.0, 0.0, 1.0), N: int = 64,
                      Ls: float = 2.0 * math.pi) -> StrandState:
    """so(3) equilibrium ``mu = m A``, ``gamma = n A``."""
    A = np.asarray(A_axis, dtype=float)
    if A.shape != (3,):
        raise ValueError("A_axis must be a 3-vector")
    return constant_state("so3", m * A, n * A, N, Ls)


def perturb(state: StrandState, k_mode: int, amplitude: float, direction,
            field: str = "mu") -> StrandState:
    """Add ``amplitude cos(2 pi k s / Ls) direction`` to ``mu``, ``gamma`` or both."""
    if int(k_mode) != k_mode or not 0 <= k_mode <= state.N // 2:
        raise ValueError(f"k_mode must be an integer grid mode in [0, {state.N // 2}], got {k_mode}")
    if field not in ("mu", "gamma", "both"):
        raise ValueError("field must be 'mu', 'gamma' or 'both'")
    direction = np.asarray(direction, dtype=float)
    wave = amplitude * np.cos(2.0 * math.pi * int(k_mode) * state.s / state.Ls)
    add = wave[:, None] * direction[None, :]
    out = state.copy()
    if field in ("mu", "both"):
        out.mu = out.mu + add
    if field in ("gamma", "both"):
        out.gamma = out.gamma + add
    return out


# ---------------------------------------------------------------------------
# derived fields


def xi_field(model: ModelSpec, mu: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """``xi = dh/dmu = -phi_{a,c}(mu) + r gamma``."""
    return -model.phi(mu) + model.r * gamma


def pi_field(model: ModelSpec, mu: np.ndarray) -> np.ndarray:
    """``pi = -r mu - c`` (``c`` realizes ``i c`` in the compact form)."""
    return -model.r * mu - model.c
