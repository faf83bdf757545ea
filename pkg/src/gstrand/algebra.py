"""Basis-indexed Lie algebra engine and the catalog of concrete algebras.

Structure constants and pairings are stored as exact rationals so that the
structural axioms can be checked with zero residual; element arithmetic at
run time is done in double precision on coefficient vectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

CATALOG = ("so3", "sl2r", "so4", "se3", "g2r")

Rational = Fraction
Tensor3 = tuple[tuple[tuple[Fraction, ...], ...], ...]
Matrix = tuple[tuple[Fraction, ...], ...]


class AlgebraError(ValueError):
    """Raised for unknown algebras and mismatched operands."""


@dataclass(frozen=True, eq=False)
class AlgebraTable:
    """Structure constants, invariant pairing and root data of one algebra.

    ``structure_constants[i][j][k]`` is the coefficient of ``e_k`` in
    ``[e_i, e_j]``.  ``roots[p]`` is the positive root ``p`` as a linear
    functional on the Cartan coefficients (ordered like ``cartan_indices``),
    and ``root_spaces[p]`` the pair of basis indices spanning the associated
    two-dimensional real root space: ``(e_alpha, e_-alpha)`` for a normal
    form, ``(u_alpha, v_alpha)`` for a compact form.
    """

    id: str
    dim: int
    basis_labels: tuple[str, ...]
    structure_constants: Tensor3
    pairing_matrix: Matrix
    cartan_indices: tuple[int, ...] = ()
    roots: tuple[tuple[Fraction, ...], ...] = ()
    root_spaces: tuple[tuple[int, int], ...] = ()
    form: str | None = None  # "normal", "compact" or None (no root data)
    notes: str = field(default="", compare=False)

    @property
    def rank(self) -> int:
        return len(self.cartan_indices)

    @property
    def has_root_data(self) -> bool:
        return bool(self.roots)

    @cached_property
    def c_float(self) -> np.ndarray:
        return np.array(
            [[[float(v) for v in row] for row in plane] for plane in self.structure_constants]
        )

    @cached_property
    def K(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.pairing_matrix])

    @cached_property
    def _terms(self) -> tuple[tuple[int, int, tuple[tuple[int, float], ...]], ...]:
        # nonzero (i, j) -> [(k, c_ijk)], fixed order so results never depend on array shape
        out = []
        for i in range(self.dim):
            for j in range(self.dim):
                ks = tuple(
                    (k, float(v)) for k, v in enumerate(self.structure_constants[i][j]) if v != 0
                )
                if ks:
                    out.append((i, j, ks))
        return tuple(out)

    @cached_property
    def ad_matrices(self) -> np.ndarray:
        """``ad[i]`` is the matrix of ``ad_{e_i}`` acting on coefficient columns."""
        # (ad_{e_i})_{k j} = c[i][j][k]
        return np.transpose(self.c_float, (0, 2, 1)).copy()

    def bracket_array(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Bracket of coefficient arrays, vectorized over leading axes."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        shape = np.broadcast_shapes(x.shape, y.shape)
        out = np.zeros(shape)
        for i, j, ks in self._terms:
            p = x[..., i] * y[..., j]
            for k, v in ks:
                out[..., k] += v * p
        return out

    def pairing_array(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("...i,ij,...j->...", np.asarray(x, float), self.K, np.asarray(y, float))

    def element(self, coeffs: Sequence[float]) -> "AlgebraElement":
        return AlgebraElement(self.id, coeffs)

    def basis_element(self, i: int) -> "AlgebraElement":
        e = np.zeros(self.dim)
        e[i] = 1.0
        return AlgebraElement(self.id, e)

    def cartan_element(self, cartan_coeffs: Sequence[float]) -> np.ndarray:
        """Coefficient vector of the Cartan element with the given coordinates."""
        if len(cartan_coeffs) != self.rank:
            raise AlgebraError(
                f"{self.id}: expected {self.rank} Cartan coefficients, got {len(cartan_coeffs)}"
            )
        v = np.zeros(self.dim)
        for idx, val in zip(self.cartan_indices, cartan_coeffs):
            v[idx] = float(val)
        return v

    def root_values(self, cartan_coeffs: Sequence) -> list:
        """``<alpha, h>`` for every positive root; exact if the input is rational."""
        return [sum(f * x for f, x in zip(root, cartan_coeffs)) for root in self.roots]


class AlgebraElement:
    """A real coefficient vector over the fixed basis of one catalog algebra."""

    __slots__ = ("algebra_id", "coeffs")

    def __init__(self, algebra_id: str, coeffs):
        self.algebra_id = algebra_id
        self.coeffs = np.array(coeffs, dtype=float)
        if self.coeffs.ndim != 1:
            raise AlgebraError("coefficients must be a flat vector")
        expected = _DIMS.get(algebra_id)
        if expected is None:
            raise AlgebraError(_unknown(algebra_id))
        if self.coeffs.shape[0] != expected:
            raise AlgebraError(
                f"{algebra_id} elements have {expected} coefficients, got {self.coeffs.shape[0]}"
            )

    def __repr__(self) -> str:
        return f"AlgebraElement({self.algebra_id!r}, {self.coeffs.tolist()})"

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        _same(self, other)
        return AlgebraElement(self.algebra_id, self.coeffs + other.coeffs)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        _same(self, other)
        return AlgebraElement(self.algebra_id, self.coeffs - other.coeffs)

    def __mul__(self, s: float) -> "AlgebraElement":
        return AlgebraElement(self.algebra_id, self.coeffs * float(s))

    __rmul__ = __mul__

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra_id, -self.coeffs)


_DIMS = {"so3": 3, "sl2r": 3, "so4": 6, "se3": 6, "g2r": 14}


def _unknown(tag) -> str:
    return f"unknown algebra {tag!r}; valid tags: {', '.join(CATALOG)}"


def _same(x: AlgebraElement, y: AlgebraElement) -> None:
    if x.algebra_id != y.algebra_id:
        raise AlgebraError(f"algebra mismatch: {x.algebra_id} vs {y.algebra_id}")


def _check(tbl: AlgebraTable, *xs: AlgebraElement) -> None:
    for x in xs:
        if x.algebra_id != tbl.id:
            raise AlgebraError(f"element of {x.algebra_id} used with table {tbl.id}")


def bracket(x: AlgebraElement, y: AlgebraElement, tbl: AlgebraTable) -> AlgebraElement:
    """``[x, y]`` by structure-constant contraction."""
    _check(tbl, x, y)
    return AlgebraElement(tbl.id, tbl.bracket_array(x.coeffs, y.coeffs))


def pairing(x: AlgebraElement, y: AlgebraElement, tbl: AlgebraTable) -> float:
    _check(tbl, x, y)
    return float(x.coeffs @ tbl.K @ y.coeffs)


# ---------------------------------------------------------------------------
# catalog construction

F0, F1 = Fraction(0), Fraction(1)


def _table_from_bracket(
    dim: int, basis_bracket: Callable[[int, int], Sequence[Fraction]]
) -> Tensor3:
    return tuple(
        tuple(tuple(Fraction(v) for v in basis_bracket(i, j)) for j in range(dim))
        for i in range(dim)
    )


def _mat(rows) -> Matrix:
    return tuple(tuple(Fraction(v) for v in row) for row in rows)


def _levi_civita(i: int, j: int, k: int) -> int:
    return (i - j) * (j - k) * (k - i) // 2


def _cross(u, v):
    return [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]


def _build_so3() -> AlgebraTable:
    c = _table_from_bracket(3, lambda i, j: [_levi_civita(i, j, k) for k in range(3)])
    return AlgebraTable(
        id="so3",
        dim=3,
        basis_labels=("e1", "e2", "e3"),
        structure_constants=c,
        pairing_matrix=_mat(-2 * np.eye(3, dtype=int)),
        cartan_indices=(2,),
        roots=((F1,),),
        root_spaces=((0, 1),),
        form="compact",
        notes="compact form; Cartan axis A = e3, u = e1, v = e2; K(x, y) = -2 x.y",
    )


def _build_sl2r() -> AlgebraTable:
    # basis (h, e_alpha, e_-alpha) with h = diag(1, -1)
    table = {(0, 1): (0, 2, 0), (0, 2): (0, 0, -2), (1, 2): (1, 0, 0)}

    def br(i, j):
        if (i, j) in table:
            return table[(i, j)]
        if (j, i) in table:
            return tuple(-v for v in table[(j, i)])
        return (0, 0, 0)

    # kappa = 4 Tr: Tr(h h) = 2, Tr(e f) = 1
    return AlgebraTable(
        id="sl2r",
        dim=3,
        basis_labels=("h", "e_alpha", "e_-alpha"),
        structure_constants=_table_from_bracket(3, br),
        pairing_matrix=_mat([[8, 0, 0], [0, 0, 4], [0, 4, 0]]),
        cartan_indices=(0,),
        roots=((Fraction(2),),),
        root_spaces=((1, 2),),
        form="normal",
        notes="normal form, Chevalley basis; kappa = 4 Tr",
    )


def so4_matrix(x: Sequence, y: Sequence) -> list[list]:
    """The 4x4 skew matrix ``1/2 [[x^ + y^, x - y], [-(x - y)^T, 0]]``."""
    half = Fraction(1, 2) if isinstance(x[0], (int, Fraction)) else 0.5

    def hat(w):
        return [[0, -w[2], w[1]], [w[2], 0, -w[0]], [-w[1], w[0], 0]]

    hx, hy = hat(x), hat(y)
    m = [[half * (hx[i][j] + hy[i][j]) for j in range(3)] + [half * (x[i] - y[i])] for i in range(3)]
    m.append([-half * (x[j] - y[j]) for j in range(3)] + [0 * half])
    return m


def so4_from_matrix(m) -> tuple[list, list]:
    """Inverse of :func:`so4_matrix`."""
    s = [m[2][1] - m[1][2], m[0][2] - m[2][0], m[1][0] - m[0][1]]  # x + y
    d = [2 * m[i][3] for i in range(3)]  # x - y
    x = [(s[i] + d[i]) / 2 for i in range(3)]
    y = [(s[i] - d[i]) / 2 for i in range(3)]
    return x, y


def _matmul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    return [[sum(a[i][k] * b[k][j] for k in range(m)) for j in range(p)] for i in range(n)]


def _build_so4() -> AlgebraTable:
    def unit(i):
        v = [F0] * 6
        v[i] = F1
        return so4_matrix(v[:3], v[3:])

    mats = [unit(i) for i in range(6)]

    def br(i, j):
        p, q = _matmul(mats[i], mats[j]), _matmul(mats[j], mats[i])
        comm = [[p[r][s] - q[r][s] for s in range(4)] for r in range(4)]
        x, y = so4_from_matrix(comm)
        if so4_matrix(x, y) != comm:
            raise AssertionError("so(4) commutator left the image of the isomorphism")
        return x + y

    return AlgebraTable(
        id="so4",
        dim=6,
        basis_labels=("x1", "x2", "x3", "y1", "y2", "y3"),
        structure_constants=_table_from_bracket(6, br),
        pairing_matrix=_mat(-2 * np.eye(6, dtype=int)),
        cartan_indices=(2, 5),
        roots=((F1, F0), (F0, F1)),
        root_spaces=((0, 1), (3, 4)),
        form="compact",
        notes="basis = images of the R^3 x R^3 unit vectors; K = so(3) (+) so(3) = 2 Tr",
    )


def _build_se3() -> AlgebraTable:
    def br(i, j):
        # [(W1, G1), (W2, G2)] = (W1 x W2, W1 x G2 + G1 x W2)
        a = [F0] * 6
        b = [F0] * 6
        a[i] = F1
        b[j] = F1
        w = _cross(a[:3], b[:3])
        g = [p + q for p, q in zip(_cross(a[:3], b[3:]), _cross(a[3:], b[:3]))]
        return w + g

    k = [[0] * 6 for _ in range(6)]
    for i in range(3):
        k[i][i + 3] = k[i + 3][i] = 1
    return AlgebraTable(
        id="se3",
        dim=6,
        basis_labels=("Omega1", "Omega2", "Omega3", "Gamma1", "Gamma2", "Gamma3"),
        structure_constants=_table_from_bracket(6, br),
        pairing_matrix=_mat(k),
        form=None,
        notes="not semisimple: no Cartan or root data; chiral dynamics only",
    )


# --- g2(R): coordinates (a11, a22, a12, a13, a21, a23, a31, a32, u1, u2, u3, v1, v2, v3)

G2_OFFDIAG = ((0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1))


def g2_unpack(coeffs: Sequence) -> tuple[list[list], list, list]:
    """Coordinates -> (A, u, v) with ``a33 = -a11 - a22``."""
    a11, a22 = coeffs[0], coeffs[1]
    zero = coeffs[0] * 0
    A = [[zero] * 3 for _ in range(3)]
    A[0][0], A[1][1], A[2][2] = a11, a22, -a11 - a22
    for n, (i, j) in enumerate(G2_OFFDIAG):
        A[i][j] = coeffs[2 + n]
    return A, list(coeffs[8:11]), list(coeffs[11:14])


def g2_pack(A, u, v) -> list:
    tr = A[0][0] + A[1][1] + A[2][2]
    if tr != 0 and not (isinstance(tr, float) and abs(tr) < 1e-9):
        raise AlgebraError(f"g2 A-block must be trace-free, trace = {tr}")
    return [A[0][0], A[1][1]] + [A[i][j] for i, j in G2_OFFDIAG] + list(u) + list(v)


def _hat(w):
    return [[0 * w[0], -w[2], w[1]], [w[2], 0 * w[0], -w[0]], [-w[1], w[0], 0 * w[0]]]


def g2_bracket_blocks(A1, u1, v1, A2, u2, v2):
    """Bracket in (A, u, v) block form; works on Fractions or floats."""
    def sym(A):
        return [[(A[i][j] + A[j][i]) / 2 for j in range(3)] for i in range(3)]

    def skew(A):
        return [[(A[i][j] - A[j][i]) / 2 for j in range(3)] for i in range(3)]

    def mv(A, w):
        return [sum(A[i][k] * w[k] for k in range(3)) for i in range(3)]

    def outer(p, q):
        return [[p[i] * q[j] for j in range(3)] for i in range(3)]

    def dot(p, q):
        return sum(p[i] * q[i] for i in range(3))

    q = Fraction(3, 4) if isinstance(u1[0], Fraction) else 0.75
    h = Fraction(1, 2) if isinstance(u1[0], Fraction) else 0.5
    p12, p21 = _matmul(A1, A2), _matmul(A2, A1)
    o = [outer(u2, v1), outer(v1, u2), outer(v2, u1), outer(u1, v2)]
    hu, hv = _hat(_cross(u1, u2)), _hat(_cross(v1, v2))
    tr = h * (dot(v2, u1) - dot(v1, u2))
    A = [
        [
            p12[i][j] - p21[i][j]
            + q * (o[0][i][j] + o[1][i][j] - o[2][i][j] - o[3][i][j])
            + q * hu[i][j] - q * hv[i][j]
            + (tr if i == j else 0)
            for j in range(3)
        ]
        for i in range(3)
    ]
    s1, k1, s2, k2 = sym(A1), skew(A1), sym(A2), skew(A2)
    uu, vv = _cross(u1, u2), _cross(v1, v2)
    t1, t2, t3, t4 = mv(s1, v2), mv(k1, u2), mv(s2, v1), mv(k2, u1)
    u = [uu[i] + vv[i] - t1[i] + t2[i] + t3[i] - t4[i] for i in range(3)]
    c1, c2 = _cross(u2, v1), _cross(v2, u1)
    w1, w2, w3, w4 = mv(k1, v2), mv(s1, u2), mv(k2, v1), mv(s2, u1)
    v = [c1[i] + c2[i] + w1[i] - w2[i] - w3[i] + w4[i] for i in range(3)]
    return A, u, v


def g2_trace_form(A1, u1, v1, A2, u2, v2):
    """``-3 u1.u2 + 3 v1.v2 + 2 Tr(A1 A2)``."""
    tr = sum(A1[i][k] * A2[k][i] for i in range(3) for k in range(3))
    return -3 * sum(a * b for a, b in zip(u1, u2)) + 3 * sum(a * b for a, b in zip(v1, v2)) + 2 * tr


def _build_g2r() -> AlgebraTable:
    def unit(i):
        e = [F0] * 14
        e[i] = F1
        return g2_unpack(e)

    blocks = [unit(i) for i in range(14)]

    def br(i, j):
        return g2_pack(*g2_bracket_blocks(*blocks[i], *blocks[j]))

    K = [[g2_trace_form(*blocks[i], *blocks[j]) for j in range(14)] for i in range(14)]
    labels = ("a11", "a22", "a12", "a13", "a21", "a23", "a31", "a32",
              "u1", "u2", "u3", "v1", "v2", "v3")
    # Cartan A = diag(a1, a2 - a1, -a2), i.e. a11 = a1, a22 = a2 - a1.
    # Roots in (a11, a22): 2a1 - a2, a1 + a2, 2a2 - a1 on the A-block; a1, a2 - a1, a2 on u, v.
    roots = (
        (F1, -F1), (Fraction(2), F1), (F1, Fraction(2)),
        (F1, F0), (F0, F1), (F1, F1),
    )
    spaces = ((2, 4), (3, 6), (5, 7), (8, 11), (9, 12), (10, 13))
    return AlgebraTable(
        id="g2r",
        dim=14,
        basis_labels=labels,
        structure_constants=_table_from_bracket(14, br),
        pairing_matrix=_mat(K),
        cartan_indices=(0, 1),
        roots=roots,
        root_spaces=spaces,
        form="normal",
        notes="real normal form of g2 inside so(7, C); pairing = trace form with coefficient one",
    )


def g2_cartan(a1, a2) -> tuple:
    """Cartan coordinates (a11, a22) of ``diag(a1, a2 - a1, -a2)``."""
    return (a1, a2 - a1)


_BUILDERS = {
    "so3": _build_so3,
    "sl2r": _build_sl2r,
    "so4": _build_so4,
    "se3": _build_se3,
    "g2r": _build_g2r,
}
_CACHE: dict[str, AlgebraTable] = {}


def build_algebra(tag: str) -> AlgebraTable:
    """Return the catalog table for ``tag`` (cached; tables are immutable)."""
    if tag not in _BUILDERS:
        raise AlgebraError(_unknown(tag))
    if tag not in _CACHE:
        _CACHE[tag] = _BUILDERS[tag]()
    return _CACHE[tag]


# ---------------------------------------------------------------------------
# so(4) = so(3) + so(3)


def so4_split(x: AlgebraElement) -> tuple[AlgebraElement, AlgebraElement]:
    if x.algebra_id != "so4":
        raise AlgebraError(f"so4_split needs an so4 element, got {x.algebra_id}")
    return AlgebraElement("so3", x.coeffs[:3]), AlgebraElement("so3", x.coeffs[3:])


def so4_join(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    if x.algebra_id != "so3" or y.algebra_id != "so3":
        raise AlgebraError("so4_join needs two so3 elements")
    return AlgebraElement("so4", np.concatenate([x.coeffs, y.coeffs]))


# ---------------------------------------------------------------------------
# structural validation


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_residual: float
    witness: tuple | None = None  # first failing basis tuple

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        w = "" if self.witness is None else f" at {self.witness}"
        return f"{status} {self.name:<22s} max residual {self.max_residual:.3g}{w}"


@dataclass
class ValidationReport:
    algebra_id: str
    dim: int
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def __str__(self) -> str:
        head = f"{self.algebra_id}: dim {self.dim}, " + ("all checks pass" if self.passed else "FAILED")
        return "\n".join([head] + ["  " + str(c) for c in self.checks])


def _sparse(tbl: AlgebraTable) -> dict[tuple[int, int], dict[int, Fraction]]:
    out = {}
    for i in range(tbl.dim):
        for j in range(tbl.dim):
            row = {k: v for k, v in enumerate(tbl.structure_constants[i][j]) if v != 0}
            if row:
                out[(i, j)] = row
    return out


def _exact_det(rows: Matrix) -> Fraction:
    m = [list(r) for r in rows]
    n = len(m)
    det = F1
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return F0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return det


def _record(name, residuals):
    worst, witness = F0, None
    for key, val in residuals:
        if abs(val) > worst:
            worst = abs(val)
            witness = key
    return CheckResult(name, worst == 0, float(worst), witness)


def validate_algebra(tbl: AlgebraTable) -> ValidationReport:
    """Check the Lie algebra axioms and pairing properties in exact arithmetic."""
    d = tbl.dim
    c = tbl.structure_constants
    K = tbl.pairing_matrix
    sp = _sparse(tbl)

    def br_basis_vec(vec: dict[int, Fraction], k: int) -> dict[int, Fraction]:
        # [sum_m vec_m e_m, e_k]
        out: dict[int, Fraction] = {}
        for m, a in vec.items():
            for n, b in sp.get((m, k), {}).items():
                out[n] = out.get(n, F0) + a * b
        return out

    def anti():
        for i, j, k in itertools.product(range(d), repeat=3):
            yield (i, j, k), c[i][j][k] + c[j][i][k]

    def jacobi():
        for i, j, k in itertools.product(range(d), repeat=3):
            if not (i < j < k):
                continue
            total: dict[int, Fraction] = {}
            for p, q, r in ((i, j, k), (j, k, i), (k, i, j)):
                for n, v in br_basis_vec(sp.get((p, q), {}), r).items():
                    total[n] = total.get(n, F0) + v
            yield (i, j, k), max((abs(v) for v in total.values()), default=F0)

    def sym():
        for i in range(d):
            for j in range(d):
                yield (i, j), K[i][j] - K[j][i]

    def invariance():
        # K([e_x, e_y], e_z) + K(e_y, [e_x, e_z])
        for x, y, z in itertools.product(range(d), repeat=3):
            s = sum(v * K[n][z] for n, v in sp.get((x, y), {}).items())
            s += sum(v * K[y][n] for n, v in sp.get((x, z), {}).items())
            yield (x, y, z), s

    def cartan():
        for p, q in itertools.combinations(tbl.cartan_indices, 2):
            yield (p, q), max((abs(v) for v in c[p][q]), default=F0)

    def root_data():
        # ad_h must preserve each root space span{p, q} and square to +a^2 (normal form,
        # eigenvalues +-a) or -a^2 (compact form, a rotation), a = <alpha, h>
        sign = 1 if tbl.form == "normal" else -1
        for n, (root, (p, q)) in enumerate(zip(tbl.roots, tbl.root_spaces)):
            for ci, h in enumerate(tbl.cartan_indices):
                val = root[ci]
                leak = max(abs(c[h][s][k]) for s in (p, q) for k in range(d) if k not in (p, q))
                m = [[c[h][p][p], c[h][q][p]], [c[h][p][q], c[h][q][q]]]
                sq = _matmul(m, m)
                want = sign * val * val
                res = max(leak, abs(sq[0][0] - want), abs(sq[1][1] - want),
                          abs(sq[0][1]), abs(sq[1][0]))
                yield (n, h), res

    checks = [
        _record("antisymmetry", anti()),
        _record("jacobi", jacobi()),
        _record("pairing symmetry", sym()),
        _record("pairing invariance", invariance()),
        _record("cartan commutativity", cartan()),
    ]
    det = _exact_det(K)
    checks.append(CheckResult("pairing nondegenerate", det != 0, float(det == 0), None))
    if tbl.has_root_data:
        checks.append(_record("root data", root_data()))
    return ValidationReport(tbl.id, d, checks)
