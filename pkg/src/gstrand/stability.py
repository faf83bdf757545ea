"""Linear stability of constant equilibria.

Sign convention: perturbations ``exp(i(k s - omega t))``, so a root with
``Im omega > 0`` grows.  A Jacobian eigenvalue ``sigma`` corresponds to
``omega = i sigma`` and grows at rate ``Re sigma``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ModelSpec, StrandState, Trajectory, constant_state, perturb, run

STABLE_TOL = 1e-10


@dataclass
class DispersionResult:
    k: float
    omega_roots: tuple[complex, ...]
    max_growth: float
    stable: bool


def _result(k: float, omegas) -> DispersionResult:
    omegas = tuple(complex(w) for w in omegas)
    growth = max(w.imag for w in omegas)
    return DispersionResult(k, omegas, growth, growth <= STABLE_TOL)


def _quadratic_roots(b: complex, c: complex) -> tuple[complex, complex]:
    """Roots of ``z^2 + b z + c`` avoiding cancellation."""
    disc = cmath.sqrt(b * b - 4 * c)
    # pick the sign that adds magnitudes
    if (b.conjugate() * disc).real < 0:
        disc = -disc
    q = -0.5 * (b + disc)
    if q == 0:
        return 0j, 0j
    return q, c / q


def _biquadratic(B: float, C: float) -> list[complex]:
    """The four roots of ``W^4 - B W^2 - C = 0``."""
    z1, z2 = _quadratic_roots(complex(-B), complex(-C))
    out = []
    for z in (z1, z2):
        w = cmath.sqrt(z)
        out += [w, -w]
    return out


def dispersion_polynomial_so3(m: float, n: float, a: float, r: float, k: float) -> np.ndarray:
    """Coefficients (highest power first) in omega of
    ``W^2 (W^4 - (m^2 - 2an) W^2 - a^2 (k^2 - n^2))`` with ``W = omega + r k``."""
    B = m * m - 2 * a * n
    C = a * a * (k * k - n * n)
    in_w = np.poly1d([1.0, 0.0, -B, 0.0, -C, 0.0, 0.0])
    return np.array(in_w(np.poly1d([1.0, r * k])).coeffs)


def dispersion_roots_so3(m: float, n: float, a: float, r: float, k: float) -> DispersionResult:
    """Closed-form roots of the so(3) dispersion relation about ``(m A, n A)``."""
    B = m * m - 2 * a * n
    C = a * a * (k * k - n * n)
    shifted = [0j, 0j] + _biquadratic(B, C)
    return _result(k, [w - r * k for w in shifted])


def dispersion_roots_sl2r(a: float, r: float, k: float) -> DispersionResult:
    """Roots of ``W^2 (W^4 + a^2 k^2) = 0`` (equilibrium ``m = n = 0``)."""
    rad = math.sqrt(abs(a * k))
    quartic = [rad * cmath.exp(1j * math.pi * (2 * j + 1) / 4) for j in range(4)]
    return _result(k, [w - r * k for w in [0j, 0j] + quartic])


def root_residual(poly: np.ndarray, roots) -> float:
    """Max ``|p(omega)|`` over the roots, scaled by the coefficient size."""
    scale = float(np.max(np.abs(poly)))
    return max(abs(np.polyval(poly, w)) for w in roots) / scale


def band_edges_so3(m: float, n: float, a: float) -> tuple[float | None, float]:
    """``(k_low^2, k_high^2)``: stable iff ``k_low^2 <= k^2 <= n^2`` when ``m^2 - 2an >= 0``."""
    B = m * m - 2 * a * n
    low = n * n - B * B / (4 * a * a)
    return (low if B >= 0 else None), n * n


# ---------------------------------------------------------------------------
# exact linearization


def _right_mult(tbl, y: np.ndarray) -> np.ndarray:
    """Matrix of ``x -> [x, y]``."""
    return np.einsum("ijk,j->ki", tbl.c_float, y)


def _left_mult(tbl, x: np.ndarray) -> np.ndarray:
    """Matrix of ``y -> [x, y]``."""
    return np.einsum("ijk,i->kj", tbl.c_float, x)


def linearization_matrix(mu_eq, gamma_eq, model: ModelSpec, k: float) -> tuple[np.ndarray, np.ndarray]:
    """Fourier-space Jacobian about constant ``(mu_eq, gamma_eq)`` and its eigenvalues.

    The right-hand side is bilinear in the fields, so the Jacobian is exact;
    ``d/ds`` becomes ``i k``.  Returns ``(J, sigma)`` with ``J`` of size
    ``2 dim``; growth rates are ``Re sigma``.
    """
    if model.system == "chiral":
        raise ValueError("linearization is implemented for the Hamiltonian systems")
    tbl = model.table
    d = tbl.dim
    mu_eq = np.asarray(mu_eq, float)
    gamma_eq = np.asarray(gamma_eq, float)
    Phi = np.column_stack([model.phi(np.eye(d)[i]) for i in range(d)])
    phi_mu = model.phi(mu_eq)
    ik = 1j * k
    eye = np.eye(d)
    J = np.zeros((2 * d, 2 * d), dtype=complex)
    J[:d, :d] = model.r * ik * eye + _right_mult(tbl, mu_eq) @ Phi + _left_mult(tbl, phi_mu)
    J[:d, d:] = _right_mult(tbl, model.c)
    J[d:, :d] = -ik * Phi + _right_mult(tbl, gamma_eq) @ Phi
    J[d:, d:] = model.r * ik * eye + _left_mult(tbl, phi_mu)
    return J, np.linalg.eigvals(J)


def linearization_so3(m: float, n: float, model: ModelSpec, k: float) -> tuple[np.ndarray, np.ndarray]:
    """Linearization about ``mu = m A``, ``gamma = n A`` (``A`` normalized)."""
    A = np.asarray(model.axis, float)
    A = A / np.linalg.norm(A)
    return linearization_matrix(m * A, n * A, model, k)


def jacobian_dispersion(m: float, n: float, model: ModelSpec, k: float) -> DispersionResult:
    """Dispersion roots ``omega = i sigma`` from the exact Jacobian."""
    _, sigma = linearization_so3(m, n, model, k)
    return _result(k, [1j * s for s in sigma])


def max_growth_rate(mu_eq, gamma_eq, model: ModelSpec, k: float) -> float:
    _, sigma = linearization_matrix(mu_eq, gamma_eq, model, k)
    return float(np.max(sigma.real))


@dataclass
class DispersionComparison:
    k: float
    formula_roots: tuple[complex, ...]
    jacobian_roots: tuple[complex, ...]
    max_root_distance: float  # after optimal matching
    formula_growth: float
    jacobian_growth: float


def compare_dispersion_so3(m: float, n: float, model: ModelSpec, k: float) -> DispersionComparison:
    """Closed-form dispersion relation against the exact Jacobian at one ``k``."""
    a, _ = model.so3_scalars
    f = dispersion_roots_so3(m, n, a, model.r, k)
    j = jacobian_dispersion(m, n, model, k)
    remaining = list(j.omega_roots)
    worst = 0.0
    for w in sorted(f.omega_roots, key=lambda z: (z.real, z.imag)):
        idx = int(np.argmin([abs(w - z) for z in remaining]))
        worst = max(worst, abs(w - remaining.pop(idx)))
    return DispersionComparison(k, f.omega_roots, j.omega_roots, worst, f.max_growth, j.max_growth)


# ---------------------------------------------------------------------------
# growth measured from simulations


@dataclass
class GrowthFit:
    rate: float
    oscillating: bool
    window: tuple[float, float] | None
    points: int


def transverse_part(model: ModelSpec, mu: np.ndarray) -> np.ndarray:
    """Root-space (non-Cartan) coordinates of ``mu``; for so(3) the part normal to A."""
    if model.algebra_id == "so3" and model.axis is not None:
        A = np.asarray(model.axis, float)
        Ahat = A / np.linalg.norm(A)
        return mu - (mu @ Ahat)[..., None] * Ahat
    keep = [i for i in range(mu.shape[-1]) if i not in model.table.cartan_indices]
    return mu[..., keep]


def mode_amplitude(model: ModelSpec, mu: np.ndarray, k_mode: int) -> float:
    """Amplitude of the transverse part of ``mu`` in grid Fourier mode ``k_mode``."""
    x = transverse_part(model, mu)
    F = np.fft.fft(x, axis=0)[k_mode] / x.shape[0]
    factor = 1.0 if k_mode in (0, x.shape[0] // 2) else 2.0
    return float(factor * np.sqrt(np.sum(np.abs(F) ** 2)))


def measured_growth_rate(traj: Trajectory, k_mode: int, model: ModelSpec, seed_amplitude: float,
                         background_norm: float = 0.0) -> GrowthFit:
    """Least-squares slope of ``log |a_k(t)|`` over the exponential window.

    The window is the first contiguous stretch where the mode amplitude lies in
    ``[10 eps, 1e-3 max(background, 1)]``.  Without such a stretch spanning at
    least one decade, the mode is reported as oscillating with rate 0.
    """
    amps = np.array([mode_amplitude(model, mu, k_mode) for mu in traj.mu])
    lo = 10.0 * seed_amplitude
    hi = 1e-3 * max(background_norm, 1.0)
    inside = (amps >= lo) & (amps <= hi)
    idx = np.flatnonzero(inside)
    if idx.size == 0:
        return GrowthFit(0.0, True, None, 0)
    start = idx[0]
    stop = start
    while stop + 1 < len(amps) and inside[stop + 1]:
        stop += 1
    sel = slice(start, stop + 1)
    t, y = traj.times[sel], np.log(amps[sel])
    if stop - start + 1 < 5 or y[-1] - y[0] < math.log(10.0):
        return GrowthFit(0.0, True, None, stop - start + 1)
    slope = float(np.polyfit(t, y, 1)[0])
    return GrowthFit(slope, False, (float(t[0]), float(t[-1])), stop - start + 1)


def growth_experiment(model: ModelSpec, mu_eq, gamma_eq, k_mode: int, seed_amplitude: float,
                      direction, N: int = 64, Ls: float = 2.0 * math.pi, t_max: float = 200.0,
                      cfl: float = 0.4) -> tuple[GrowthFit, Trajectory]:
    """Seed mode ``k_mode`` of ``mu`` about a constant equilibrium and fit the growth."""
    state: StrandState = constant_state(model.algebra_id, mu_eq, gamma_eq, N, Ls)
    state = perturb(state, k_mode, seed_amplitude, direction, "mu")
    background = max(float(np.linalg.norm(mu_eq)), float(np.linalg.norm(gamma_eq)))
    hi = 1e-3 * max(background, 1.0)

    def past_window(s: StrandState) -> bool:
        return mode_amplitude(model, s.mu, k_mode) > 3.0 * hi

    traj = run(state, model, t_max, cfl=cfl, stop=past_window)
    return measured_growth_rate(traj, k_mode, model, seed_amplitude, background), traj


# ---------------------------------------------------------------------------
# k scans


@dataclass
class StabilityRow:
    result: DispersionResult
    band_edge: bool  # classification differs from the previous row


def k_scan(k_min: float, k_max: float, k_steps: int) -> np.ndarray:
    if k_steps < 1 or not (math.isfinite(k_min) and math.isfinite(k_max)) or k_max < k_min:
        raise ValueError(f"invalid k range [{k_min}, {k_max}] with {k_steps} steps")
    if k_steps == 1:
        return np.array([float(k_min)])
    return np.linspace(k_min, k_max, k_steps)


def stability_map(algebra: str, m: float, n: float, a: float, r: float,
                  ks) -> list[StabilityRow]:
    """Dispersion roots over ``ks`` with band-edge markers."""
    if algebra == "so3":
        results = [dispersion_roots_so3(m, n, a, r, float(k)) for k in ks]
    elif algebra == "sl2r":
        if m != 0 or n != 0:
            raise ValueError("the sl2r dispersion relation is for the m = n = 0 equilibrium")
        results = [dispersion_roots_sl2r(a, r, float(k)) for k in ks]
    else:
        raise ValueError(f"no dispersion relation for {algebra!r}")
    rows = []
    for i, res in enumerate(results):
        rows.append(StabilityRow(res, i > 0 and res.stable != results[i - 1].stable))
    return rows


def transition_points(rows: list[StabilityRow]) -> list[tuple[float, float]]:
    """Consecutive ``(k_prev, k)`` pairs bracketing each classification change."""
    return [(rows[i - 1].result.k, rows[i].result.k) for i in range(1, len(rows)) if rows[i].band_edge]


STABILITY_HEADER = (["k"] + [f"{part}_omega{j}" for j in range(6) for part in ("re", "im")]
                    + ["max_growth", "stable", "band_edge"])


def _g(x: float) -> str:
    return f"{x + 0.0:.17g}"  # + 0.0 turns -0.0 into 0.0


def stability_rows_text(rows: list[StabilityRow]) -> list[list[str]]:
    out = []
    for row in rows:
        res = row.result
        cells = [_g(res.k)]
        for w in res.omega_roots:
            cells += [_g(w.real), _g(w.imag)]
        cells += [_g(res.max_growth), str(int(res.stable)), str(int(row.band_edge))]
        out.append(cells)
    return out
