"""Exact invariant geometry on SU(3) and its full flag quotient.

The homogeneous twistor fibration of the projective plane is modelled here
with structure constants instead of finite differences: left-invariant
1-forms are formal exterior generators, their derivatives come from the
matrix identity d(g^-1 dg) = -(g^-1 dg) ^ (g^-1 dg), and every metric,
derivative and second-derivative identity of the invariant family is an
exact polynomial statement in the scale parameters.  Finite differences
along actual group curves appear only as an independent oracle.

Generator dictionary (fixed ordering, entry (l, m) of the left-invariant
form; indices are 1-based rows/columns of the 3x3 matrix):

    0: w12   1: w13   2: w23      (strictly upper entries)
    3: w21   4: w31   5: w32      (strictly lower entries)
    6: w11   7: w22               (imaginary diagonal; w33 = -w11 - w22)

Conjugation acts by skew-Hermitian symmetry: conj(w12) = -w21 and so on,
with the diagonal generators mapped to their own negatives.
"""

import functools
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exterior import ComplexForm, substitute, wedge, wedge_all

__all__ = [
    "SU3_BASIS", "GENERATOR_NAMES", "SU3Element", "MaurerCartanEval",
    "maurer_cartan", "maurer_cartan_eval", "structure_equation_residual",
    "generator_form", "flag_conj", "flag_d", "flag_bidegree_part",
    "flag_acs", "integrability_obstruction", "flag_K", "flag_dK",
    "flag_balanced", "flag_ddbar", "structural_ddbar", "nearly_kahler_check",
    "normalization_crosscheck", "appendix_table",
]

GENERATOR_NAMES = ("w12", "w13", "w23", "w21", "w31", "w32", "w11", "w22")

# placement of each generator in the 3x3 matrix of 1-forms
_GEN_POS = ((0, 1), (0, 2), (1, 2), (1, 0), (2, 0), (2, 1), (0, 0), (1, 1))


def _basis_su3() -> Tuple[np.ndarray, ...]:
    """Real basis of su(3): off-diagonal rotations/boosts pairwise, then the
    two imaginary diagonal directions.  Order is part of the public contract."""
    out = []
    for l, m in ((0, 1), (0, 2), (1, 2)):
        E = np.zeros((3, 3), dtype=complex)
        E[l, m] = 1.0
        out.append(E - E.T)
        out.append(1j * (E + E.T))
    out.append(1j * np.diag([1.0, -1.0, 0.0]))
    out.append(1j * np.diag([0.0, 1.0, -1.0]))
    return tuple(out)


SU3_BASIS: Tuple[np.ndarray, ...] = _basis_su3()


def _check_su3_algebra(X: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if X.shape != (3, 3) or np.max(np.abs(X + np.conj(X.T))) > tol \
            or abs(np.trace(X)) > tol:
        raise ValueError("direction must be a skew-Hermitian traceless 3x3 matrix")
    return X


def _expm_su3(X: np.ndarray) -> np.ndarray:
    # X skew-Hermitian, so 1j*X is Hermitian and eigh gives the exact
    # unitary exponential without any series truncation
    vals, vecs = np.linalg.eigh(1j * X)
    return (vecs * np.exp(-1j * vals)) @ np.conj(vecs.T)


# ======================================================================
# the group, its left-invariant form, and the FD oracle
# ======================================================================

@dataclass(frozen=True)
class SU3Element:
    """A special unitary 3x3 matrix (validated on construction)."""

    g: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=complex)
        if g.shape != (3, 3):
            raise ValueError("group element must be a 3x3 matrix")
        if np.max(np.abs(np.conj(g.T) @ g - np.eye(3))) > 1e-12 \
                or abs(np.linalg.det(g) - 1.0) > 1e-12:
            raise ValueError("matrix is not special unitary")
        object.__setattr__(self, "g", g)

    @classmethod
    def identity(cls) -> "SU3Element":
        return cls(np.eye(3, dtype=complex))

    @classmethod
    def random(cls, seed: int) -> "SU3Element":
        rng = np.random.default_rng(seed)
        zmat = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        q, r = np.linalg.qr(zmat)
        q = q * (np.diag(r) / np.abs(np.diag(r)))
        det = np.linalg.det(q)
        return cls(q / det ** (1.0 / 3.0))

    def translate(self, X: np.ndarray, t: float) -> "SU3Element":
        """The point g exp(t X) on the left-translated one-parameter curve."""
        return SU3Element(self.g @ _expm_su3(t * _check_su3_algebra(X)))


def maurer_cartan(g: Union[SU3Element, np.ndarray],
                  direction: Union[int, np.ndarray]) -> np.ndarray:
    """Evaluate g^-1 dg on the velocity of t -> g exp(t X) at t = 0.

    Left translation makes the answer the algebra element X itself; the
    value is still computed from the honest product g^-1 (g X).
    """
    if not isinstance(g, SU3Element):
        g = SU3Element(g)
    X = SU3_BASIS[direction] if isinstance(direction, int) else _check_su3_algebra(direction)
    velocity = g.g @ X
    return np.conj(g.g.T) @ velocity


@dataclass(frozen=True)
class MaurerCartanEval:
    """The 3x3 matrix of left-invariant 1-forms paired with the eight
    algebra directions: values[l, m, k] = w_entry(l, m) on direction k."""

    g: SU3Element
    values: np.ndarray            # (3, 3, 8) complex

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        assert v.shape == (3, 3, 8)
        for k in range(8):
            slab = v[:, :, k]
            if np.max(np.abs(slab + np.conj(slab.T))) > 1e-12 \
                    or abs(np.trace(slab)) > 1e-12:
                raise ValueError("form values are not su(3)-valued")
        object.__setattr__(self, "values", v)

    def covector(self, l: int, m: int) -> np.ndarray:
        return self.values[l, m, :]


def maurer_cartan_eval(g: Union[SU3Element, np.ndarray]) -> MaurerCartanEval:
    if not isinstance(g, SU3Element):
        g = SU3Element(g)
    vals = np.stack([maurer_cartan(g, k) for k in range(8)], axis=-1)
    return MaurerCartanEval(g=g, values=vals)


def structure_equation_residual(g: Union[SU3Element, np.ndarray],
                                X: np.ndarray, Y: np.ndarray,
                                step: float = 1e-4) -> float:
    """Finite-difference check of d w = -w ^ w on the surface
    (s, t) -> g exp(s X) exp(t Y); returns max |dw + w ^ w| entrywise.

    Everything is differenced numerically (no structure constants), so this
    is an independent oracle for the exact algebra used elsewhere.
    """
    if not isinstance(g, SU3Element):
        g = SU3Element(g)
    X = _check_su3_algebra(X)
    Y = _check_su3_algebra(Y)
    h = step

    def sigma(s: float, t: float) -> np.ndarray:
        return g.g @ _expm_su3(s * X) @ _expm_su3(t * Y)

    def w_ds(s: float, t: float) -> np.ndarray:
        d = (sigma(s + h, t) - sigma(s - h, t)) / (2.0 * h)
        return np.conj(sigma(s, t).T) @ d

    def w_dt(s: float, t: float) -> np.ndarray:
        d = (sigma(s, t + h) - sigma(s, t - h)) / (2.0 * h)
        return np.conj(sigma(s, t).T) @ d

    dw = (w_dt(h, 0.0) - w_dt(-h, 0.0)) / (2.0 * h) \
        - (w_ds(0.0, h) - w_ds(0.0, -h)) / (2.0 * h)
    ws, wt = w_ds(0.0, 0.0), w_dt(0.0, 0.0)
    return float(np.max(np.abs(dw + (ws @ wt - wt @ ws))))


# ======================================================================
# the exterior algebra of the left-invariant coframe
# ======================================================================

def generator_form(k: int) -> ComplexForm:
    """The k-th left-invariant 1-form as a formal exterior generator."""
    return ComplexForm(8, 1, {(k,): 1.0})


def _w_matrix() -> List[List[ComplexForm]]:
    W = [[None] * 3 for _ in range(3)]
    for k, (l, m) in enumerate(_GEN_POS):
        W[l][m] = generator_form(k)
    W[2][2] = generator_form(6) * (-1.0) + generator_form(7) * (-1.0)
    return W


# signed pairing of conjugation: upper <-> minus lower, diagonal <-> minus itself
_CONJ_ROWS = np.zeros((8, 8))
for _a, _b in ((0, 3), (1, 4), (2, 5)):
    _CONJ_ROWS[_a, _b] = -1.0
    _CONJ_ROWS[_b, _a] = -1.0
_CONJ_ROWS[6, 6] = -1.0
_CONJ_ROWS[7, 7] = -1.0


def flag_conj(form: ComplexForm) -> ComplexForm:
    """Complex conjugation of an invariant form: conjugate coefficients and
    swap each generator with minus its transpose partner."""
    return substitute(form.conj(), _CONJ_ROWS)


@functools.lru_cache(maxsize=1)
def _d_table() -> Tuple[ComplexForm, ...]:
    """d of each generator from d w = -w ^ w (exact structure constants)."""
    W = _w_matrix()
    out = []
    for l, m in _GEN_POS:
        acc = ComplexForm(8, 2, {})
        for k in range(3):
            acc = acc + wedge(W[l][k], W[k][m])
        out.append(acc * (-1.0))
    return tuple(out)


def flag_d(form: ComplexForm) -> ComplexForm:
    """Exterior derivative of an invariant form by Leibniz over the
    generator derivatives; exact, no differencing."""
    assert form.dim == 8
    table = _d_table()
    out = ComplexForm(8, form.degree + 1, {})
    for key, coeff in form.terms.items():
        for pos, gidx in enumerate(key):
            factors = [table[g] if j == pos else generator_form(g)
                       for j, g in enumerate(key)]
            out = out + wedge_all(*factors) * (coeff * (-1.0) ** pos)
    return out


# (1,0)-generator sets of the four distinguished structures; the conjugate
# structures 5..8 swap holomorphic and antiholomorphic roles
_HOLO_SET = {1: (0, 4, 5), 2: (0, 4, 2), 3: (0, 1, 5), 4: (0, 1, 2)}


def _holo_antiholo(i: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    if i not in range(1, 9):
        raise ValueError("structure index must lie in 1..8")
    base = _HOLO_SET[(i - 1) % 4 + 1]
    anti = tuple(k for k in range(6) if k not in base)
    return (base, anti) if i <= 4 else (anti, base)


def flag_bidegree_part(form: ComplexForm, i: int, p_holo: int) -> ComplexForm:
    """Keep the monomials with exactly `p_holo` holomorphic generators with
    respect to structure i.  The diagonal generators carry no bidegree, so
    forms that do not descend to the quotient are rejected."""
    holo, _ = _holo_antiholo(i)
    kept = {}
    for key, coeff in form.terms.items():
        if any(g >= 6 for g in key):
            raise ValueError("form has diagonal components; no quotient bidegree")
        if sum(1 for g in key if g in holo) == p_holo:
            kept[key] = coeff
    return ComplexForm(8, form.degree, kept)


_SIGMA = np.array([[0.0, -1.0], [1.0, 0.0]])


def flag_acs(i: int) -> np.ndarray:
    """The invariant almost complex structure on the six quotient directions
    (real/imaginary parts of the three complex coframe entries)."""
    holo, _ = _holo_antiholo(i)
    blocks = []
    for pair_lead in (0, 1, 2):            # w12, w13, w23 in order
        sign = 1.0 if pair_lead in holo else -1.0
        blocks.append(sign * _SIGMA)
    out = np.zeros((6, 6))
    for b, blk in enumerate(blocks):
        out[2 * b: 2 * b + 2, 2 * b: 2 * b + 2] = blk
    return out


def integrability_obstruction(i: int) -> float:
    """Norm of the (0,2)-components of the derivatives of the (1,0)-coframe.

    Zero exactly when the (0,1)-distribution is closed under bracket; the
    value is assembled from structure constants, so the six integrable
    structures give literal zero.
    """
    holo, anti = _holo_antiholo(i)
    table = _d_table()
    worst = 0.0
    for gidx in holo:
        bad = {key: c for key, c in table[gidx].terms.items()
               if all(g in anti for g in key)}
        worst = max(worst, ComplexForm(8, 2, bad).norm())
    return worst


# ======================================================================
# the invariant metric family
# ======================================================================

def _params(lam: Union[float, Sequence[float]]) -> Tuple[float, float, float]:
    if np.isscalar(lam):
        lams = (1.0, 1.0, float(lam))
    else:
        lams = tuple(float(v) for v in lam)
        assert len(lams) == 3, "expected one scale parameter or three"
    if any(v <= 0.0 for v in lams):
        raise ValueError("scale parameters must be positive")
    return lams  # type: ignore[return-value]


def _coframe_forms() -> Tuple[ComplexForm, ...]:
    a, b, c = generator_form(0), generator_form(1), generator_form(2)
    return a, b, c, flag_conj(a), flag_conj(b), flag_conj(c)


def flag_K(i: int, lam: Union[float, Sequence[float]]) -> ComplexForm:
    """The fundamental 2-form of structure i at scales (l1, l2, l3)."""
    l1, l2, l3 = _params(lam)
    a, b, c, ab, bb, cb = _coframe_forms()
    second = wedge(bb, b) if i in (1, 2) else wedge(b, bb)
    if i in (1, 3):
        third = wedge(cb, c)
    elif i in (2, 4):
        third = wedge(c, cb)
    else:
        raise ValueError("structure index must lie in 1..4")
    return (wedge(a, ab) * l1 ** 2 + second * l2 ** 2 + third * l3 ** 2) * 1j


_DK_SIGNS = {1: (1.0, 1.0, -1.0), 2: (1.0, 1.0, 1.0),
             3: (1.0, -1.0, -1.0), 4: (1.0, -1.0, 1.0)}


def _dK_coefficient(i: int, lams: Tuple[float, float, float]) -> float:
    s1, s2, s3 = _DK_SIGNS[i]
    return s1 * lams[0] ** 2 + s2 * lams[1] ** 2 + s3 * lams[2] ** 2


def flag_dK(i: int, lam: Union[float, Sequence[float]]) -> ComplexForm:
    """First derivative of the fundamental form: a single cubic coefficient
    times the invariant 3-form; vanishes exactly on the displayed parameter
    quadrics (i = 2 has a positive coefficient and never closes)."""
    lams = _params(lam)
    if i not in (1, 2, 3, 4):
        raise ValueError("structure index must lie in 1..4")
    a, b, c, ab, bb, cb = _coframe_forms()
    cubic = wedge_all(ab, b, cb) - wedge_all(a, bb, c)
    return cubic * (1j * _dK_coefficient(i, lams))


def flag_balanced(i: int, lam: Union[float, Sequence[float]]) -> ComplexForm:
    """K ^ dK, assembled by wedge; the product cancels exactly for every
    structure and every parameter choice."""
    return wedge(flag_K(i, lam), flag_dK(i, lam))


_DDBAR_SIGNS = {1: ((1.0, 1.0, -1.0), (-1.0, 1.0, 1.0)),
                3: ((-1.0, 1.0, 1.0), (1.0, -1.0, 1.0)),
                4: ((1.0, -1.0, 1.0), (1.0, 1.0, -1.0))}


def flag_ddbar(i: int, lam: Union[float, Sequence[float]]) -> ComplexForm:
    """The displayed second-derivative 4-forms for i in {1, 3, 4}."""
    lams = _params(lam)
    if i == 2:
        raise ValueError("no second-derivative display for i = 2")
    if i not in (1, 3, 4):
        raise ValueError("structure index must lie in 1..4")
    (c1, c2, c3), (t1, t2, t3) = _DDBAR_SIGNS[i]
    coeff = c1 * lams[0] ** 2 + c2 * lams[1] ** 2 + c3 * lams[2] ** 2
    a, b, c, ab, bb, cb = _coframe_forms()
    if i == 1:
        terms = (wedge_all(a, ab, bb, b) * t1
                 + wedge_all(bb, b, cb, c) * t2
                 + wedge_all(cb, c, a, ab) * t3)
    elif i == 3:
        terms = (wedge_all(a, ab, b, bb) * t1
                 + wedge_all(b, bb, cb, c) * t2
                 + wedge_all(cb, c, a, ab) * t3)
    else:
        terms = (wedge_all(a, ab, b, bb) * t1
                 + wedge_all(b, bb, c, cb) * t2
                 + wedge_all(c, cb, a, ab) * t3)
    return terms * ((1j) ** 2 * coeff)


def structural_ddbar(i: int, lam: Union[float, Sequence[float]]) -> ComplexForm:
    """i * (2,2)-part of d applied to the (1,2)-part of dK, all from
    structure constants; the independent cross-check of `flag_ddbar`."""
    dk = flag_d(flag_K(i, lam))
    return flag_bidegree_part(flag_d(flag_bidegree_part(dk, i, 1)), i, 2) * 1j


def nearly_kahler_check() -> Tuple[float, float]:
    """Residuals of the two distinguished identities at scales
    (1/sqrt2, 1/sqrt2, 1/sqrt2): the derivative of the second fundamental
    form against three times the real part of the invariant (3,0)-form, and
    the derivative of its imaginary part against minus twice K ^ K."""
    s = 1.0 / math.sqrt(2.0)
    K = flag_K(2, (s, s, s))
    a, b, c, ab, bb, cb = _coframe_forms()
    rho = wedge_all(a, bb, c) * (1j) ** 3
    re_rho = (rho + flag_conj(rho)) * 0.5
    im_rho = (rho - flag_conj(rho)) * (1.0 / 2j)
    r1 = (flag_d(K) - re_rho * 3.0).norm()
    r2 = (flag_d(im_rho) + wedge(K, K) * 2.0).norm()
    return r1, r2


# ======================================================================
# cross-checks against the curved-space machinery
# ======================================================================

def normalization_crosscheck(c: float = 2.0, conn: str = "lichnerowicz",
                             seed: int = 0) -> Tuple[float, float]:
    """Critical squared scale of the first structure from both models.

    The numeric side scans the projective-plane twistor family built from
    the curvature of the Fubini-Study metric with holomorphic sectional
    curvature `c` (root lambda^2 = 4/c); the algebraic side reports the
    exact root 2 of the invariant coefficient l1^2 + l2^2 - l3^2 at
    (1, 1, lambda), which corresponds to the c = 2 normalization.
    """
    from .manifold import builtin
    from .twistor import lambda_zero_crossing, sample_twistor_points

    M = builtin("cp2_fs", c=c)
    z = sample_twistor_points(M, 1, seed=seed)[0]
    root, _resid = lambda_zero_crossing(1, M, conn, z)
    assert root is not None
    flag_root = 2.0
    assert abs(_dK_coefficient(1, (1.0, 1.0, math.sqrt(flag_root)))) < 1e-12
    return float(root), flag_root


# the displayed right-hand sides of the three coframe structure equations,
# transcribed independently of the -w^w matrix product
def _displayed_structure_equations() -> Dict[int, ComplexForm]:
    g = generator_form
    return {
        0: wedge(g(6) - g(7), g(0)) * (-1.0) + wedge(g(5), g(1)),
        1: wedge(g(6) * 2.0 + g(7), g(1)) * (-1.0) + wedge(g(2), g(0)),
        2: wedge(g(6) + g(7) * 2.0, g(2)) * (-1.0) - wedge(g(3), g(1)),
    }


def appendix_table(lam: Union[float, Sequence[float]] = (1.0, 1.0, 1.0)) -> Dict[str, object]:
    """Everything the exact model asserts, as one JSON-friendly table:
    structure-equation residuals, per-structure derivative data, the
    integrability census, and the nearly-Kahler residuals."""
    lams = _params(lam)
    table = _d_table()
    displayed = _displayed_structure_equations()
    structure_res = max((table[k] - displayed[k]).norm() for k in displayed)

    rows = []
    for i in (1, 2, 3, 4):
        K = flag_K(i, lams)
        dk_display = flag_dK(i, lams)
        row: Dict[str, object] = {
            "i": i,
            "dK_coefficient": _dK_coefficient(i, lams),
            "dK_residual": (flag_d(K) - dk_display).norm(),
            "d_closed": dk_display.norm() < 1e-12,
            "balanced_norm": flag_balanced(i, lams).norm(),
            "dd_residual": flag_d(dk_display).norm(),
            "obstruction": integrability_obstruction(i),
            "integrable": integrability_obstruction(i) == 0.0,
        }
        if i == 2:
            row["ddbar_residual"] = None
            row["one_two_part_norm"] = flag_bidegree_part(dk_display, 2, 1).norm()
        else:
            row["ddbar_residual"] = (flag_ddbar(i, lams) - structural_ddbar(i, lams)).norm()
        rows.append(row)

    nk1, nk2 = nearly_kahler_check()
    return {
        "lambda": list(lams),
        "generators": list(GENERATOR_NAMES),
        "structure_equation_residual": structure_res,
        "rows": rows,
        "integrable_count": sum(1 for i in range(1, 9)
                                if integrability_obstruction(i) == 0.0),
        "nearly_kahler_residuals": [nk1, nk2],
    }
