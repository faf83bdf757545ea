"""Sectional operators ``ad_c^{-1} ad_a`` on root spaces.

For Cartan elements a, c with c regular, the operator acts on the root space
of every positive root alpha by the scalar ``<alpha, a> / <alpha, c>`` and
kills the Cartan subalgebra.  In a compact form the same ratio scales the
``(u_alpha, v_alpha)`` pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import AlgebraElement, AlgebraError, AlgebraTable

REGULARITY_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class SectionalSpec:
    """Precomputed diagonal of ``phi_{c,a} = ad_c^{-1} ad_a``."""

    algebra_id: str
    form: str
    a_cartan: tuple
    c_cartan: tuple
    diag: np.ndarray
    ratios: tuple  # one per positive root, exact when the inputs are rational

    def apply_array(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float) * self.diag

    @property
    def max_ratio(self) -> float:
        return float(np.max(np.abs(self.diag))) if self.diag.size else 0.0


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def make_sectional(
    tbl: AlgebraTable, form: str, a_cartan: Sequence, c_cartan: Sequence
) -> SectionalSpec:
    """Build ``phi_{c,a}`` for Cartan coordinates ``a_cartan`` and ``c_cartan``.

    Raises AlgebraError for algebras without root data, a form that does not
    match the table, or a non-regular ``c``.
    """
    if not tbl.has_root_data:
        raise AlgebraError(f"{tbl.id} has no root data; sectional operators are undefined")
    if form != tbl.form:
        raise AlgebraError(f"{tbl.id} is a {tbl.form} real form, not {form}")
    a_cartan, c_cartan = tuple(a_cartan), tuple(c_cartan)
    if len(a_cartan) != tbl.rank or len(c_cartan) != tbl.rank:
        raise AlgebraError(f"{tbl.id} has rank {tbl.rank}")

    exact = all(_is_exact(v) for v in a_cartan + c_cartan)
    if exact:
        a_cartan = tuple(Fraction(v) for v in a_cartan)
        c_cartan = tuple(Fraction(v) for v in c_cartan)
    alpha_a = tbl.root_values(a_cartan)
    alpha_c = tbl.root_values(c_cartan)
    cnorm = float(np.linalg.norm([float(v) for v in c_cartan]))
    ratios = []
    for n, (num, den) in enumerate(zip(alpha_a, alpha_c)):
        vanishing = den == 0 if exact else abs(float(den)) <= REGULARITY_RTOL * cnorm
        if vanishing:
            root = tuple(str(f) for f in tbl.roots[n])
            raise AlgebraError(
                f"c = {c_cartan} is not regular: root #{n} {root} vanishes on it"
            )
        ratios.append(num / den if exact else float(num) / float(den))

    diag = np.zeros(tbl.dim)
    for ratio, (p, q) in zip(ratios, tbl.root_spaces):
        diag[p] = diag[q] = float(ratio)
    diag.setflags(write=False)
    return SectionalSpec(tbl.id, form, a_cartan, c_cartan, diag, tuple(ratios))


def apply_sectional(spec: SectionalSpec, x: AlgebraElement) -> AlgebraElement:
    if x.algebra_id != spec.algebra_id:
        raise AlgebraError(f"sectional for {spec.algebra_id} applied to {x.algebra_id}")
    return AlgebraElement(spec.algebra_id, spec.apply_array(x.coeffs))


def sectional_so3(a_scalar: float, c_scalar: float, A_axis, zeta) -> np.ndarray:
    """Closed form ``(c/a) zeta_perp`` with ``zeta_perp`` orthogonal to the axis.

    Broadcasts over leading axes of ``zeta``.
    """
    if a_scalar == 0:
        raise ValueError("a_scalar must be nonzero")
    A = np.asarray(A_axis, dtype=float)
    norm = np.linalg.norm(A)
    if norm == 0:
        raise ValueError("axis must be nonzero")
    Ahat = A / norm
    zeta = np.asarray(zeta, dtype=float)
    perp = zeta - (zeta @ Ahat)[..., None] * Ahat
    return (c_scalar / a_scalar) * perp


def check_intertwining(spec: SectionalSpec, tbl: AlgebraTable, x) -> float:
    """Norm of ``[c, phi_{c,a}(x)] - [a, x - x_cartan]``; zero for an exact operator.

    ``x`` may be an AlgebraElement or a coefficient array (leading axes allowed,
    the maximum over them is returned).
    """
    coeffs = x.coeffs if isinstance(x, AlgebraElement) else np.asarray(x, float)
    a = tbl.cartan_element([float(v) for v in spec.a_cartan])
    c = tbl.cartan_element([float(v) for v in spec.c_cartan])
    root_part = coeffs.copy()
    root_part[..., list(tbl.cartan_indices)] = 0.0
    lhs = tbl.bracket_array(c, spec.apply_array(coeffs))
    rhs = tbl.bracket_array(a, root_part)
    return float(np.max(np.linalg.norm(lhs - rhs, axis=-1)))
