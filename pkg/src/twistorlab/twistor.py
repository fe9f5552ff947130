"""Fiberwise complex-structure bundle over a Hermitian surface.

Over an oriented four-dimensional Hermitian surface, the unit sphere of
orthogonal complex structures compatible with the orientation forms a
2-sphere bundle.  This module charts that bundle with six real coordinates
(x^1..x^4, Re zeta, Im zeta), where zeta parametrises the fiber through the
line [u_1 + zeta u_2] of (1,0)-vectors of a Gram-Schmidt frame.

On the chart we build a complex coframe (phi^1, phi^2, phi^3): the first
two rows pull back the rotated (1,0)-coframe of the base, and phi^3 is the
off-diagonal entry of a canonical Hermitian connection along the rotated
frame section (Levi-Civita u(2)-projection at t = 0, Chern at t = 1).  Out
of the coframe come

  * four almost complex structures J_1..J_4 (conjugating phi^2 and/or
    phi^3 in the (1,0)-span),
  * a family of compatible metrics with fundamental forms K_i(lambda),
  * closed-form expressions for dK_i, K_i ^ dK_i and i del dbar K_i in
    terms of base curvature and torsion data, and
  * independent finite-difference oracles for the same quantities, plus a
    Nijenhuis-tensor oracle for integrability.

Everything is evaluated pointwise; no symbolic algebra is involved.  The
formula paths and the oracle paths share only the coframe itself, so their
agreement is a genuine cross-check of the structure data.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exterior import ComplexForm, wedge, wedge_all, substitute
from .manifold import (DiffBackend, HermitianSurface, UnitaryFrame,
                       _compile_expr, adapted_frame,
                       coordinate_fundamental_matrix, dF_form)
from .connection import (CONNECTION_T, complex_connection_matrix, direct_curvature,
                         gauduchon, levi_civita, mu_from_omega, omega_tilde_coord)
from .curvature_analysis import (ConditionFlags, condition_flags,
                                 curvature_operator, decompose)

__all__ = [
    "LAMBDA_MIN", "TwistorPoint", "TwistorChart", "TwistorCoframe",
    "TwistorMetricEval", "MetricConditionRow", "TwistorConditionReport",
    "normalize_connection", "coframe_rows", "twistor_coframe",
    "acs_endomorphism", "h_lambda_matrix", "K_form", "dK_formula",
    "balanced_defect_formula", "ddbar_formula", "CoframeSweep", "dK_oracle",
    "balanced_defect_oracle", "nijenhuis_oracle", "ddbar_oracle",
    "conformal_rescale", "conformal_compare", "principal_angles",
    "fiber_coordinate_on_bundle", "projective_bundle_form",
    "bundle_chart_compare", "lambda_zero_crossing", "evaluate_metric",
    "condition_report", "sample_twistor_points",
]

# smallest admissible fiber-metric parameter; below this the metrics are
# numerically degenerate and every downstream solve loses accuracy
LAMBDA_MIN = 1e-3

_DEFAULT_ZETA_MAX = 4.0

# rows of the full complex coframe that are (1,0) for each structure:
# indices 0..2 are phi^1..phi^3, indices 3..5 their conjugates
_J_ROWS = {1: (0, 4, 2), 2: (0, 4, 5), 3: (0, 1, 2), 4: (0, 1, 5)}

# sign of the phi^2-type term (+ for i in {1,2}) and of the fiber term
# (+ for i in {1,3}) in K_i = i(l1^2 W1 + e2 l2^2 W2 + e3 l3^2 W3)
_EPS2 = {1: 1.0, 2: 1.0, 3: -1.0, 4: -1.0}
_EPS3 = {1: 1.0, 2: -1.0, 3: 1.0, 4: -1.0}


# ======================================================================
# points and charts
# ======================================================================

@dataclass(frozen=True)
class TwistorPoint:
    """A base point together with a fiber line of (1,0)-vectors.

    The line is stored projectively normalised: unit length, first
    non-vanishing component positive real.
    """

    x: np.ndarray          # (4,) real
    line: np.ndarray       # (2,) complex, normalised

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        line = np.asarray(self.line, dtype=complex)
        assert x.shape == (4,) and line.shape == (2,)
        n = np.linalg.norm(line)
        if n < 1e-14:
            raise ValueError("twistor line must be nonzero")
        line = line / n
        for c in line:
            if abs(c) > 1e-14:
                line = line * (np.conj(c) / abs(c))
                break
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "line", line)

    @classmethod
    def from_zeta(cls, x: np.ndarray, zeta: complex) -> "TwistorPoint":
        return cls(np.asarray(x, dtype=float), np.array([1.0, zeta], dtype=complex))

    @property
    def zeta(self) -> complex:
        if abs(self.line[0]) < 1e-12:
            raise ValueError("fiber coordinate out of chart")
        return complex(self.line[1] / self.line[0])

    def chart_coordinates(self) -> np.ndarray:
        z = self.zeta
        return np.concatenate([self.x, [z.real, z.imag]])


@dataclass(frozen=True)
class TwistorChart:
    """The product chart (base box) x (|zeta| < zeta_max) of the bundle."""

    surface: HermitianSurface
    zeta_max: float = _DEFAULT_ZETA_MAX

    @property
    def coords(self) -> Tuple[str, ...]:
        return ("x1", "x2", "x3", "x4", "zeta_re", "zeta_im")

    def contains(self, z: TwistorPoint) -> bool:
        box = self.surface.chart.box
        if np.any(z.x < box[:, 0]) or np.any(z.x > box[:, 1]):
            return False
        try:
            zeta = z.zeta
        except ValueError:
            return False
        return abs(zeta) < self.zeta_max

    def sample_points(self, n: int, seed: int, zeta_scale: float = 0.7) -> List[TwistorPoint]:
        """Deterministic interior sample: Latin-hypercube base points with
        fiber coordinates in the disc of radius zeta_scale."""
        xs = self.surface.chart.interior_points(n, seed=seed)
        rng = np.random.default_rng(seed + 7)
        out = []
        for k in range(n):
            r = zeta_scale * math.sqrt(rng.uniform(0.05, 1.0))
            a = rng.uniform(0.0, 2.0 * math.pi)
            out.append(TwistorPoint.from_zeta(xs[k], r * complex(math.cos(a), math.sin(a))))
        return out


def sample_twistor_points(M: HermitianSurface, n: int, seed: int,
                          zeta_scale: float = 0.7) -> List[TwistorPoint]:
    return TwistorChart(M).sample_points(n, seed, zeta_scale)


def normalize_connection(conn: Union[str, float]) -> Tuple[float, str]:
    """Resolve a connection choice (name or family parameter) to (t, label)."""
    if isinstance(conn, str):
        key = conn.lower()
        if key not in CONNECTION_T:
            raise ValueError(f"unknown connection {conn!r}; choose from {sorted(CONNECTION_T)} or a numeric parameter")
        t = CONNECTION_T[key]
        return t, key
    t = float(conn)
    for name, tv in CONNECTION_T.items():
        if abs(t - tv) < 1e-12:
            return tv, name
    return t, f"gauduchon({t:g})"


def _lambdas(lam: Union[float, Sequence[float]]) -> Tuple[float, float, float]:
    if np.isscalar(lam):
        lams = (1.0, 1.0, float(lam))
    else:
        lams = tuple(float(v) for v in lam)
        assert len(lams) == 3, "expected one fiber parameter or three scale parameters"
    for v in lams:
        if v < LAMBDA_MIN:
            raise ValueError(f"metric parameter {v:g} below the positivity floor {LAMBDA_MIN:g}")
    return lams  # type: ignore[return-value]


# ======================================================================
# the pulled-back coframe
# ======================================================================

def _su2(zeta: complex) -> np.ndarray:
    """Columns are the coefficients of the rotated (1,0)-frame (v_1, v_2)
    over (u_1, u_2):  v_1 = (u_1 + zeta u_2)/N,  v_2 = (-conj(zeta) u_1 + u_2)/N."""
    N = math.sqrt(1.0 + abs(zeta) ** 2)
    return np.array([[1.0, -np.conj(zeta)], [zeta, 1.0]], dtype=complex) / N


def _mobius12(P: np.ndarray, zeta: complex) -> np.ndarray:
    """(A* P A)[0, 1] for A = _su2(zeta): the rotated off-diagonal entry of a
    2x2 matrix of components (trailing axes carried along)."""
    zb = np.conj(zeta)
    N2 = 1.0 + abs(zeta) ** 2
    return (P[0, 1] + zb * (P[1, 1] - P[0, 0]) - zb * zb * P[1, 0]) / N2


def coframe_rows(M: HermitianSurface, t: float, y: np.ndarray, seeds=None) -> np.ndarray:
    """The complex coframe matrix B at chart point y = (x, Re zeta, Im zeta).

    Rows hold the coordinate components of phi^1, phi^2, phi^3 over
    (dx^1..dx^4, d zeta_re, d zeta_im).  phi^1 and phi^2 are the rotated
    (1,0)-coframe pulled back from the base; phi^3 is the off-diagonal
    connection entry along the rotated frame section, whose pure fiber part
    is -d conj(zeta) / (1 + |zeta|^2).
    """
    y = np.asarray(y, dtype=float)
    x = y[:4]
    zeta = complex(y[4], y[5])
    N2 = 1.0 + abs(zeta) ** 2
    N = math.sqrt(N2)
    om_t, _, fr = omega_tilde_coord(M, x, t, seeds=seeds)
    psi = complex_connection_matrix(om_t)          # (2, 2, 4)
    B = np.zeros((3, 6), dtype=complex)
    B[0, :4] = (fr.eta[0] + np.conj(zeta) * fr.eta[1]) / N
    B[1, :4] = (-zeta * fr.eta[0] + fr.eta[1]) / N
    B[2, :4] = _mobius12(psi, zeta)
    B[2, 4] = -1.0 / N2
    B[2, 5] = 1j / N2
    return B


def _row_form(row: np.ndarray) -> ComplexForm:
    return ComplexForm(6, 1, {(m,): row[m] for m in range(6) if row[m] != 0.0})


def _lift(form4: ComplexForm) -> ComplexForm:
    """Reinterpret a base form (over dx) on the six-coordinate chart."""
    assert form4.dim == 4
    return ComplexForm(6, form4.degree, dict(form4.terms))


def _matrix_two_form(mat: np.ndarray, dim: int = 6) -> ComplexForm:
    terms = {}
    for p in range(mat.shape[0]):
        for q in range(p + 1, mat.shape[1]):
            if mat[p, q] != 0.0:
                terms[(p, q)] = mat[p, q]
    return ComplexForm(dim, 2, terms)


def _complexify_rows(R: np.ndarray, rows: np.ndarray, pattern: Sequence[Tuple[int, bool]]) -> complex:
    """Contract a frame 4-tensor with (1,0)-frame vectors given by `rows`
    (rows[a] = frame components of the a-th vector), conjugating per slot."""
    vecs = []
    for idx, conj in pattern:
        v = rows[idx]
        vecs.append(np.conj(v) if conj else v)
    return complex(np.einsum("ijkl,i,j,k,l->", R, *vecs))


@dataclass(frozen=True)
class TwistorCoframe:
    """The coframe and structure data of one connection at one bundle point.

    `B` rows are phi^1..phi^3 over the chart coordinates.  The curvature and
    torsion entries are stored already rotated into the fiber frame
    (v_1, v_2), which is the frame the derivative formulas are written in;
    `mu` needs no rotation (the fiber rotation acts trivially on that part
    of the connection and contributes no fiber components).
    """

    surface: HermitianSurface
    label: str
    t: float
    y: np.ndarray                      # (6,)
    zeta: complex
    B: np.ndarray                      # (3, 6) complex
    frame: UnitaryFrame
    mu: ComplexForm                    # dim-6 1-form
    s: float
    sstar: float
    tau3: Optional[ComplexForm] = None           # dim-6 2-form (Levi-Civita data)
    omega_diff: Optional[ComplexForm] = None     # i(Om^1_2 - Om^3_4), rotated, dim-6
    R_hat: Optional[Dict[str, complex]] = None   # rotated curvature components
    Psi_hat: Optional[List[List[ComplexForm]]] = None   # rotated Chern curvature
    T_hat: Optional[List[ComplexForm]] = None           # rotated torsion 2-forms
    T_components: Optional[np.ndarray] = None           # (2,) complex: T^a(v_1, v_2)

    # ------------------------------------------------------------------

    def phi_form(self, a: int) -> ComplexForm:
        """phi^a as a 1-form over the chart coordinates (a = 1..3)."""
        return _row_form(self.B[a - 1])

    def full_rows(self) -> np.ndarray:
        """The 6x6 matrix with rows phi^1..phi^3, conj(phi^1)..conj(phi^3)."""
        return np.vstack([self.B, np.conj(self.B)])

    def gram_determinant(self) -> complex:
        return complex(np.linalg.det(self.full_rows()))

    def h_matrix(self, lam: Union[float, Sequence[float]]) -> np.ndarray:
        return h_lambda_matrix(self, lam)


def twistor_coframe(M: HermitianSurface, conn: Union[str, float], z: TwistorPoint,
                    seeds=None, chart: Optional[TwistorChart] = None,
                    with_structure: bool = True) -> TwistorCoframe:
    """Build the pulled-back coframe and its formula inputs at a bundle point.

    Args:
        M: the base surface.
        conn: connection choice (name or family parameter t).
        z: the twistor point; its fiber coordinate must satisfy
           |zeta| < chart.zeta_max (the section degenerates as the line
           approaches the antipode of the frame's own structure).
        seeds: optional Gram-Schmidt seeds, forwarded to the frame.
        chart: optional chart whose zeta_max bound is enforced.
        with_structure: also assemble curvature/torsion data for the
           closed-form derivative expressions.

    Raises:
        ValueError: for a fiber coordinate outside the chart.
    """
    t, label = normalize_connection(conn)
    chart = chart or TwistorChart(M)
    zeta = z.zeta
    if abs(zeta) >= chart.zeta_max:
        raise ValueError("fiber coordinate out of chart")
    x = z.x
    y = z.chart_coordinates()

    lc = levi_civita(M, x, seeds=seeds)
    fr = lc.frame
    om_t, om_lc, _ = omega_tilde_coord(M, x, t, seeds=seeds, lc=lc)
    psi = complex_connection_matrix(om_t)
    N2 = 1.0 + abs(zeta) ** 2
    B = np.zeros((3, 6), dtype=complex)
    B[0, :4] = (fr.eta[0] + np.conj(zeta) * fr.eta[1]) / math.sqrt(N2)
    B[1, :4] = (-zeta * fr.eta[0] + fr.eta[1]) / math.sqrt(N2)
    B[2, :4] = _mobius12(psi, zeta)
    B[2, 4] = -1.0 / N2
    B[2, 5] = 1j / N2

    det = np.linalg.det(np.vstack([B, np.conj(B)]))
    assert abs(det) > 1e-8, "coframe degenerated (Gram determinant ~ 0)"

    mu_coord = mu_from_omega(om_lc)
    mu6 = ComplexForm(6, 1, {(m,): mu_coord[m] for m in range(4) if mu_coord[m] != 0.0})

    dec = decompose(curvature_operator(lc))

    tau3 = omega_diff = R_hat = Psi_hat = T_hat = T_comp = None
    if with_structure:
        # Levi-Civita curvature forms in coordinates, then their u(2)-matrix
        # entries, rotated into the fiber frame
        Om = np.einsum("ijkl,km,ln->ijmn", lc.R, fr.theta, fr.theta)
        P = complex_connection_matrix(Om.reshape(4, 4, 16)).reshape(2, 2, 4, 4)
        tau3 = _matrix_two_form(_mobius12(P, zeta))

        A = _su2(zeta)
        # real rotation of the adapted frame induced by A
        Vrows = A.T @ np.array([[1.0, -1j, 0.0, 0.0], [0.0, 0.0, 1.0, -1j]]) / math.sqrt(2.0)
        Q = np.column_stack([
            math.sqrt(2.0) * np.real(Vrows[0]), -math.sqrt(2.0) * np.imag(Vrows[0]),
            math.sqrt(2.0) * np.real(Vrows[1]), -math.sqrt(2.0) * np.imag(Vrows[1]),
        ])
        Om_rot = np.einsum("mi,nj,mnpq->ijpq", Q, Q, Om)
        omega_diff = _matrix_two_form(1j * (Om_rot[0, 1] - Om_rot[2, 3]))

        R_hat = {
            "1*222*": _complexify_rows(lc.R, Vrows, [(0, True), (1, False), (1, False), (1, True)]),
            "1*211*": _complexify_rows(lc.R, Vrows, [(0, True), (1, False), (0, False), (0, True)]),
        }

        if abs(t) > 1e-12:
            hd = gauduchon(M, x, t, seeds=seeds, lc=lc)
            Tm = np.einsum("am,mnr->anr", B[:2, :4], hd.torsion_coord)
            T_hat = [_matrix_two_form(Tm[a]) for a in range(2)]
            V = fr.U @ A      # coordinate components of v_1, v_2
            T_comp = np.array([np.einsum("nr,n,r->", Tm[a], V[:, 0], V[:, 1]) for a in range(2)])
        if abs(t - 1.0) < 1e-12:
            dc = direct_curvature(M, x, 1.0, seeds=seeds)
            Psi_hat = [[None, None], [None, None]]
            for a in range(2):
                for b in range(2):
                    acc = ComplexForm.zero(6, 2)
                    for c in range(2):
                        for d in range(2):
                            w = np.conj(A[c, a]) * A[d, b]
                            if w != 0.0:
                                acc = acc + _lift(dc.Psi[c][d]) * w
                    Psi_hat[a][b] = acc

    return TwistorCoframe(surface=M, label=label, t=t, y=y, zeta=zeta, B=B,
                          frame=fr, mu=mu6, s=dec.s, sstar=dec.sstar,
                          tau3=tau3, omega_diff=omega_diff, R_hat=R_hat,
                          Psi_hat=Psi_hat, T_hat=T_hat, T_components=T_comp)


# ======================================================================
# almost complex structures and metrics
# ======================================================================

def _adapted_rows(i: int, B: np.ndarray) -> np.ndarray:
    """6x6 complex matrix whose first three rows are the J_i-(1,0) coframe."""
    full = np.vstack([B, np.conj(B)])
    idx = _J_ROWS[i]
    top = full[list(idx)]
    return np.vstack([top, np.conj(top)])


def acs_endomorphism(i: int, coframe: Union[TwistorCoframe, np.ndarray]) -> np.ndarray:
    """The endomorphism J_i of the chart tangent space (6x6 real).

    J_i multiplies the selected (1,0)-rows by +i; J_3 uses (phi^1, phi^2,
    phi^3), J_1 conjugates phi^2, J_4 conjugates phi^3, J_2 conjugates both.
    """
    B = coframe.B if isinstance(coframe, TwistorCoframe) else coframe
    C = _adapted_rows(i, B)
    D = np.diag([1j, 1j, 1j, -1j, -1j, -1j])
    J = np.linalg.solve(C, D @ C)
    assert np.max(np.abs(np.imag(J))) < 1e-9, "complex residue in an almost complex structure"
    return np.real(J)


def h_lambda_matrix(coframe: TwistorCoframe, lam: Union[float, Sequence[float]]) -> np.ndarray:
    """Chart components of the bundle metric sum_a w_a phi^a (x) conj(phi^a)."""
    l1, l2, l3 = _lambdas(lam)
    w = np.array([l1 ** 2, l2 ** 2, l3 ** 2])
    B = coframe.B
    G = 2.0 * np.real(np.einsum("a,am,an->mn", w, np.conj(B), B))
    return G


def _W_forms(B: np.ndarray) -> Tuple[ComplexForm, ComplexForm, ComplexForm]:
    p1, p2, p3 = (_row_form(B[a]) for a in range(3))
    W1 = wedge(p1, p1.conj())
    W2 = wedge(p2.conj(), p2)
    W3 = wedge(p3, p3.conj())
    return W1, W2, W3


def K_form(i: int, lam: Union[float, Sequence[float]], coframe: TwistorCoframe) -> ComplexForm:
    """The fundamental 2-form K_i(lambda) over the chart coordinates."""
    l1, l2, l3 = _lambdas(lam)
    W1, W2, W3 = _W_forms(coframe.B)
    return (W1 * (l1 ** 2) + W2 * (_EPS2[i] * l2 ** 2) + W3 * (_EPS3[i] * l3 ** 2)) * 1j


# ======================================================================
# closed-form derivative expressions
# ======================================================================

def _structure_dW(coframe: TwistorCoframe) -> Tuple[ComplexForm, ComplexForm, ComplexForm]:
    """d of the three building blocks W_1 = phi^1^conj(phi^1),
    W_2 = conj(phi^2)^phi^2, W_3 = phi^3^conj(phi^3), from structure data.

    The cubic part is common to both connection routes; the torsion part (mu
    for the Levi-Civita projection, the (2,0)-torsion for Chern) splits
    between dW_1 and dW_2, and dW_3 carries the curvature entry.
    """
    p1 = coframe.phi_form(1)
    p2 = coframe.phi_form(2)
    p3 = coframe.phi_form(3)
    b1, b2, b3 = p1.conj(), p2.conj(), p3.conj()
    cubic = wedge_all(b1, p2, p3) - wedge_all(p1, b2, b3)
    if abs(coframe.t) < 1e-12:
        mu, mub = coframe.mu, coframe.mu.conj()
        torsion1 = wedge_all(mub, p1, p2) - wedge_all(mu, b1, b2)
        torsion2 = torsion1 * (-1.0)
        assert coframe.tau3 is not None, "coframe was built without structure data"
        dW3 = wedge(coframe.tau3, b3) - wedge(coframe.tau3.conj(), p3)
    elif abs(coframe.t - 1.0) < 1e-12:
        assert coframe.T_hat is not None and coframe.Psi_hat is not None, \
            "coframe was built without structure data"
        T1, T2 = coframe.T_hat
        torsion1 = wedge(T1, b1) - wedge(T1.conj(), p1)
        torsion2 = wedge(T2.conj(), p2) - wedge(T2, b2)
        P12 = coframe.Psi_hat[0][1]
        dW3 = wedge(P12, b3) - wedge(P12.conj(), p3)
    else:
        raise ValueError("no closed-form derivative display for the general "
                         "canonical-family connection; use the finite-difference oracle")
    return cubic + torsion1, cubic + torsion2, dW3


def dK_formula(i: int, lam: Union[float, Sequence[float]], coframe: TwistorCoframe) -> ComplexForm:
    """dK_i(lambda) assembled from base curvature/torsion data (no FD).

    Only available for the t = 0 and t = 1 connections; the general family
    member has no displayed closed form and is served by `dK_oracle`.
    """
    l1, l2, l3 = _lambdas(lam)
    dW1, dW2, dW3 = _structure_dW(coframe)
    return (dW1 * (l1 ** 2) + dW2 * (_EPS2[i] * l2 ** 2) + dW3 * (_EPS3[i] * l3 ** 2)) * 1j


def balanced_defect_formula(i: int, lam: float, coframe: TwistorCoframe) -> ComplexForm:
    """K_i ^ dK_i from the closed-form displays (a 5-form; zero iff balanced)."""
    (l1, l2, l3) = _lambdas(lam)
    assert l1 == 1.0 and l2 == 1.0, "the product displays are stated for the one-parameter family"
    lam2 = l3 ** 2
    p1 = coframe.phi_form(1)
    p2 = coframe.phi_form(2)
    p3 = coframe.phi_form(3)
    b1, b2, b3 = p1.conj(), p2.conj(), p3.conj()
    if abs(coframe.t) < 1e-12:
        assert coframe.R_hat is not None, "coframe was built without structure data"
        r22 = coframe.R_hat["1*222*"]
        r11 = coframe.R_hat["1*211*"]
        if i in (1, 2):
            base = wedge_all(p1, b1, b2, p2)
            c = r22 - r11
            out = (wedge(base, b3) * c + wedge(base, p3) * np.conj(c)) * (lam2)
            return out if i == 1 else out * (-1.0)
        base = wedge_all(p1, b1, p2, b2)
        c = r22 + r11
        mu, mub = coframe.mu, coframe.mu.conj()
        mu_term = wedge_all(wedge(mub, p1) , p2, p3, b3) - wedge_all(wedge(mu, b1), b2, p3, b3)
        out = (wedge(base, b3) * c + wedge(base, p3) * np.conj(c) + mu_term * 2.0) * (-lam2)
        return out if i == 3 else out * (-1.0)
    if abs(coframe.t - 1.0) < 1e-12:
        assert coframe.T_hat is not None and coframe.Psi_hat is not None, \
            "coframe was built without structure data"
        T1, T2 = coframe.T_hat
        P12 = coframe.Psi_hat[0][1]
        psi_pair = wedge(P12, b3) - wedge(P12.conj(), p3)
        W3 = wedge(p3, b3)
        if i in (1, 2):
            front = wedge(p1, b1) + wedge(b2, p2)
            tor = wedge(T1, b1) - wedge(T1.conj(), p1) + wedge(T2.conj(), p2) - wedge(T2, b2)
            bracket = wedge(front, psi_pair) + wedge(tor, W3)
            return bracket * (-lam2) if i == 1 else bracket * (lam2)
        front = wedge(p1, b1) + wedge(p2, b2)
        tor = wedge(T1, b1) - wedge(T1.conj(), p1) + wedge(T2, b2) - wedge(T2.conj(), p2)
        bracket = wedge(front, psi_pair) + wedge(tor, W3)
        return bracket * (-lam2) if i == 3 else bracket * (lam2)
    raise ValueError("no closed-form derivative display for the general "
                     "canonical-family connection; use the finite-difference oracle")


def ddbar_formula(i: int, lam: float, coframe: TwistorCoframe,
                  flags: Optional[ConditionFlags] = None) -> ComplexForm:
    """i del dbar K_i from the closed-form displays (a 4-form).

    Availability: (i = 1, t = 0) on a self-dual base with constant scalar
    curvature (constancy is the caller's assertion; self-duality is checked
    against `flags`); (i in {3, 4}, t = 0) on a base with J-invariant Ricci
    tensor; (i in {3, 4}, t = 1) unconditionally.  Everything else is served
    by the finite-difference oracle.
    """
    (l1, l2, l3) = _lambdas(lam)
    assert l1 == 1.0 and l2 == 1.0, "the displays are stated for the one-parameter family"
    lam2 = l3 ** 2
    p1 = coframe.phi_form(1)
    p2 = coframe.phi_form(2)
    p3 = coframe.phi_form(3)
    b1, b2, b3 = p1.conj(), p2.conj(), p3.conj()
    if flags is None:
        flags = condition_flags(coframe.surface, coframe.y[:4])
    if abs(coframe.t) < 1e-12:
        assert coframe.tau3 is not None and coframe.omega_diff is not None
        fiber = (wedge(coframe.omega_diff, wedge(p3, b3)) - wedge(coframe.tau3, coframe.tau3.conj())) * lam2
        if i == 1:
            if not flags.self_dual:
                raise ValueError("the i = 1 display requires a self-dual base with constant "
                                 "scalar curvature (self-duality predicate failed); use the oracle")
            s = coframe.s
            combo = (wedge_all(p1, b1, b2, p2) * (-s / 12.0)
                     + wedge_all(b2, p2, p3, b3) + wedge_all(p3, b3, p1, b1))
            return combo * (-(2.0 - lam2 * s / 6.0)) + fiber
        if i in (3, 4):
            if not flags.ricci_J_invariant:
                raise ValueError("the i = 3, 4 displays require a J-invariant Ricci tensor "
                                 "(predicate failed); use the oracle")
            mu, mub = coframe.mu, coframe.mu.conj()
            base = wedge_all(p1, b1, p2, b2) * (0.25 * (coframe.s - coframe.sstar))
            mu_term = wedge(wedge(mu, mub), wedge(p1, b1) + wedge(p2, b2)) * (-2.0)
            return base + mu_term + fiber
        raise ValueError("no second-derivative display for i = 2; use the finite-difference oracle")
    if abs(coframe.t - 1.0) < 1e-12:
        if i not in (3, 4):
            raise ValueError("no second-derivative display for i = 1, 2 with the Chern "
                             "connection; use the finite-difference oracle")
        assert coframe.Psi_hat is not None and coframe.T_hat is not None
        P = coframe.Psi_hat
        T1, T2 = coframe.T_hat
        fiber = (wedge(P[0][1], P[0][1].conj())
                 + wedge(P[0][0] - P[1][1], wedge(p3, b3))) * (-lam2)
        return (fiber
                + wedge(P[0][0], wedge(p1, b1)) + wedge(P[1][1], wedge(p2, b2))
                + wedge(T1, T1.conj()) + wedge(T2, T2.conj())
                - wedge(P[0][1].conj(), wedge(p1, b2)) - wedge(P[0][1], wedge(b1, p2)))
    raise ValueError("no closed-form derivative display for the general "
                     "canonical-family connection; use the finite-difference oracle")


# ======================================================================
# finite-difference oracles
# ======================================================================

class CoframeSweep:
    """One order-4 FD sweep of the coframe field around a bundle point.

    From B and its six partials, the exterior derivatives of the three
    building-block 2-forms follow by the product rule; every dK_i(lambda)
    and K_i ^ dK_i oracle value is then an algebraic combination, so the
    whole (i, lambda) grid shares a single sweep.
    """

    def __init__(self, M: HermitianSurface, conn: Union[str, float], z: TwistorPoint,
                 seeds=None, backend: Optional[DiffBackend] = None):
        t, label = normalize_connection(conn)
        self.t, self.label = t, label
        self.M = M
        self.y0 = z.chart_coordinates()
        be = backend or M.backend
        field = lambda y: coframe_rows(M, t, y, seeds=seeds)  # noqa: E731
        self.B0 = field(self.y0)
        self.dB = np.stack([be.partial(field, self.y0, p) for p in range(6)])

    # -- coefficient matrices of the W-blocks and their partials ----------

    def _W(self, a: int, B: Optional[np.ndarray] = None) -> np.ndarray:
        B = self.B0 if B is None else B
        r = B[a]
        out = np.einsum("m,n->mn", r, np.conj(r))
        out = out - out.T
        return -out if a == 1 else out     # W_2 = conj(phi^2) ^ phi^2

    def _dW_partial(self, p: int, a: int) -> np.ndarray:
        r, dr = self.B0[a], self.dB[p][a]
        out = np.einsum("m,n->mn", dr, np.conj(r)) + np.einsum("m,n->mn", r, np.conj(dr))
        out = out - out.T
        return -out if a == 1 else out

    def W_form(self, a: int) -> ComplexForm:
        return _matrix_two_form(self._W(a))

    def dW_form(self, a: int) -> ComplexForm:
        dWp = [self._dW_partial(p, a) for p in range(6)]
        terms = {}
        for p in range(6):
            for q in range(p + 1, 6):
                for r in range(q + 1, 6):
                    v = dWp[p][q, r] - dWp[q][p, r] + dWp[r][p, q]
                    if v != 0.0:
                        terms[(p, q, r)] = v
        return ComplexForm(6, 3, terms)

    # -- assembled oracle values ------------------------------------------

    def K(self, i: int, lam: Union[float, Sequence[float]]) -> ComplexForm:
        l1, l2, l3 = _lambdas(lam)
        return (self.W_form(0) * (l1 ** 2) + self.W_form(1) * (_EPS2[i] * l2 ** 2)
                + self.W_form(2) * (_EPS3[i] * l3 ** 2)) * 1j

    def dK(self, i: int, lam: Union[float, Sequence[float]]) -> ComplexForm:
        l1, l2, l3 = _lambdas(lam)
        return (self.dW_form(0) * (l1 ** 2) + self.dW_form(1) * (_EPS2[i] * l2 ** 2)
                + self.dW_form(2) * (_EPS3[i] * l3 ** 2)) * 1j

    def K_wedge_dK(self, i: int, lam: Union[float, Sequence[float]]) -> ComplexForm:
        return wedge(self.K(i, lam), self.dK(i, lam))

    def acs(self, i: int) -> np.ndarray:
        return acs_endomorphism(i, self.B0)


def dK_oracle(i: int, lam: Union[float, Sequence[float]], M: HermitianSurface,
              conn: Union[str, float], z: TwistorPoint, seeds=None) -> ComplexForm:
    """dK_i(lambda) by order-4 finite differences of the coframe field."""
    return CoframeSweep(M, conn, z, seeds=seeds).dK(i, lam)


def balanced_defect_oracle(i: int, lam: Union[float, Sequence[float]], M: HermitianSurface,
                           conn: Union[str, float], z: TwistorPoint, seeds=None) -> ComplexForm:
    """K_i ^ dK_i with the derivative taken by finite differences."""
    return CoframeSweep(M, conn, z, seeds=seeds).K_wedge_dK(i, lam)


def nijenhuis_oracle(i: int, M: HermitianSurface, conn: Union[str, float],
                     z: TwistorPoint, seeds=None,
                     backend: Optional[DiffBackend] = None) -> float:
    """Max norm of the Nijenhuis tensor of J_i over the 15 coordinate pairs.

    N(X, Y) = [J X, J Y] - J[J X, Y] - J[X, J Y] - [X, Y] evaluated on
    coordinate fields (whose own brackets vanish), with the J-field
    differentiated by finite differences.
    """
    t, _ = normalize_connection(conn)
    y0 = z.chart_coordinates()
    be = backend or M.backend
    field = lambda y: acs_endomorphism(i, coframe_rows(M, t, y, seeds=seeds))  # noqa: E731
    J = field(y0)
    dJ = np.stack([be.partial(field, y0, p) for p in range(6)])
    worst = 0.0
    for a in range(6):
        for b in range(a + 1, 6):
            comm = np.einsum("p,pm->m", J[:, a], dJ[:, :, b]) - np.einsum("p,pm->m", J[:, b], dJ[:, :, a])
            corr = J @ dJ[b][:, a] - J @ dJ[a][:, b]
            worst = max(worst, float(np.linalg.norm(comm + corr)))
    return worst


def _bidegree_project6(form: ComplexForm, C: np.ndarray, p_holo: int) -> ComplexForm:
    """Project a chart form onto the terms with `p_holo` factors from the
    (1,0)-rows of C (rows 0..2) and the rest from their conjugates."""
    over_phi = substitute(form, np.linalg.inv(C))
    kept = {k: v for k, v in over_phi.terms.items() if sum(1 for idx in k if idx < 3) == p_holo}
    return substitute(ComplexForm(6, form.degree, kept), C)


def ddbar_oracle(i: int, lam: Union[float, Sequence[float]], M: HermitianSurface,
                 conn: Union[str, float], z: TwistorPoint, seeds=None,
                 outer_step: float = 2e-3) -> ComplexForm:
    """i del dbar K_i by nested finite differences.

    The inner pass produces the (1,2)-part of dK at each stencil point (a
    fresh coframe sweep per point, projected with the J_i bidegree of that
    point); the outer pass differentiates those coefficients and keeps the
    (2,2)-part.  Only meaningful when J_i is integrable.
    """
    t, _ = normalize_connection(conn)
    y0 = z.chart_coordinates()
    keys = [(a, b, c) for a in range(6) for b in range(a + 1, 6) for c in range(b + 1, 6)]

    def dbar_vec(y: np.ndarray) -> np.ndarray:
        zp = TwistorPoint.from_zeta(y[:4], complex(y[4], y[5]))
        sw = CoframeSweep(M, t, zp, seeds=seeds)
        proj = _bidegree_project6(sw.dK(i, lam), _adapted_rows(i, sw.B0), 1)
        return np.array([proj.terms.get(k, 0.0) for k in keys], dtype=complex)

    be = M.backend.with_step(outer_step)
    g0 = dbar_vec(y0)           # noqa: F841  (forces an in-domain evaluation first)
    dg = np.stack([be.partial(dbar_vec, y0, p) for p in range(6)])
    coeff: Dict[Tuple[int, ...], complex] = {}
    for kidx, (a, b, c) in enumerate(keys):
        for p in range(6):
            if p in (a, b, c):
                continue
            key = tuple(sorted((p, a, b, c)))
            pos = key.index(p)
            sign = (-1.0) ** pos
            coeff[key] = coeff.get(key, 0.0) + sign * dg[p][kidx]
    dG = ComplexForm(6, 4, coeff)
    B0 = coframe_rows(M, t, y0, seeds=seeds)
    return _bidegree_project6(dG, _adapted_rows(i, B0), 2) * 1j


# ======================================================================
# conformal comparison
# ======================================================================

def conformal_rescale(M: HermitianSurface, f_expr: Union[str, Callable[[np.ndarray], float]]) -> HermitianSurface:
    """The surface with metric e^{2f} h and the same complex structure."""
    f = _compile_expr(f_expr, ("x1", "x2", "x3", "x4"), 1, 0) if isinstance(f_expr, str) else f_expr
    scaled = lambda x: math.exp(2.0 * f(x)) * M.metric(x)  # noqa: E731
    return HermitianSurface(M.chart, scaled, M.J, name=f"{M.name}+conformal",
                            params=dict(M.params), backend=M.backend)


def conformal_compare(M: HermitianSurface, f_expr: Union[str, Callable[[np.ndarray], float]],
                      conn: Union[str, float], z: TwistorPoint, seeds=None) -> Dict[int, float]:
    """Max-norm differences of each J_i between h and e^{2f} h.

    The Gram-Schmidt frame of the rescaled metric is e^{-f} times the
    original for the same seeds, so the same chart point names the same
    fiber line on both sides and the endomorphisms compare directly.
    """
    t, _ = normalize_connection(conn)
    Ms = conformal_rescale(M, f_expr)
    y = z.chart_coordinates()
    B1 = coframe_rows(M, t, y, seeds=seeds)
    B2 = coframe_rows(Ms, t, y, seeds=seeds)
    out = {}
    for i in (1, 2, 3, 4):
        J1 = acs_endomorphism(i, B1)
        J2 = acs_endomorphism(i, B2)
        out[i] = float(np.max(np.abs(J1 - J2)))
    return out


def principal_angles(J_a: np.ndarray, J_b: np.ndarray) -> np.ndarray:
    """Principal angles between the (1,0)-eigenspaces of two structures."""
    def holo_basis(J):
        # the projector has singular values (1, 1, 1, 0, 0, 0), so the
        # leading left-singular vectors give a clean basis of its range
        P = (np.eye(6) - 1j * J) / 2.0
        u, _, _ = np.linalg.svd(P)
        return u[:, :3]
    Qa, Qb = holo_basis(J_a), holo_basis(J_b)
    sv = np.linalg.svd(np.conj(Qa.T) @ Qb, compute_uv=False)
    return np.arccos(np.clip(sv, -1.0, 1.0))


# ======================================================================
# projectivised-bundle comparison (Kahler bases)
# ======================================================================

def _check_kahler(M: HermitianSurface, x: np.ndarray, tol: float = 1e-8):
    if dF_form(M, x).norm() > tol:
        raise ValueError("projective-bundle comparison requires a Kahler base (dF != 0)")
    J0 = M.J(x)
    Jstd = np.array([[0.0, -1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0],
                     [0.0, 0.0, 0.0, -1.0], [0.0, 0.0, 1.0, 0.0]])
    if np.max(np.abs(J0 - Jstd)) > tol:
        raise ValueError("the bundle chart needs the standard constant complex structure")


def _hermitian_G(M: HermitianSurface, x: np.ndarray) -> np.ndarray:
    """G[a, b] = h(d/dz^a, d/d conj(z)^b) for z^a = x^{2a-1} + i x^{2a}."""
    g = M.metric(x)
    G = np.empty((2, 2), dtype=complex)
    for a in range(2):
        for b in range(2):
            ra, sa, rb, sb = 2 * a, 2 * a + 1, 2 * b, 2 * b + 1
            G[a, b] = 0.25 * (g[ra, rb] + g[sa, sb] + 1j * (g[ra, sb] - g[sa, rb]))
    return G


def fiber_coordinate_on_bundle(M: HermitianSurface, z: TwistorPoint, seeds=None) -> complex:
    """The projectivised-tangent coordinate w with [u_1 + zeta u_2] =
    [d/dz^1 + w d/dz^2] (Kahler bases with the standard structure only)."""
    _check_kahler(M, z.x)
    fr = adapted_frame(M, z.x, seeds=seeds)
    V = fr.U @ np.array([1.0, z.zeta], dtype=complex)
    A = V[0] + 1j * V[1]
    Bc = V[2] + 1j * V[3]
    if abs(A) < 1e-10:
        raise ValueError("fiber coordinate out of chart")
    return complex(Bc / A)


def projective_bundle_form(M: HermitianSurface, lam: float, z: TwistorPoint,
                           seeds=None) -> np.ndarray:
    """The Kahler-quotient 2-form of the projectivised (1,0)-bundle.

    Components over the chart (x^1..x^4, Re w, Im w), evaluated at the image
    of `z`: lambda times the pulled-back fundamental form plus the complex
    Hessian term of log h(v, v) for the section v = d/dz^1 + w d/dz^2.
    """
    lam = float(lam)
    if lam < LAMBDA_MIN:
        raise ValueError(f"metric parameter {lam:g} below the positivity floor {LAMBDA_MIN:g}")
    x = z.x
    _check_kahler(M, x)
    w0 = fiber_coordinate_on_bundle(M, z, seeds=seeds)
    y0 = np.concatenate([x, [w0.real, w0.imag]])

    def logh(y: np.ndarray) -> float:
        G = _hermitian_G(M, y[:4])
        w = complex(y[4], y[5])
        val = G[0, 0] + w * G[1, 0] + np.conj(w) * G[0, 1] + abs(w) ** 2 * G[1, 1]
        return math.log(float(np.real(val)))

    be = M.backend
    Hr = np.empty((6, 6))
    for p in range(6):
        gp = lambda y, _p=p: be.partial(logh, y, _p)  # noqa: E731
        for q in range(6):
            Hr[p, q] = be.partial(gp, y0, q)
    Hr = 0.5 * (Hr + Hr.T)

    # complex Hessian over (z^1, z^2, w) and the induced real 2-form
    pairs = [(0, 1), (2, 3), (4, 5)]
    H = np.empty((3, 3), dtype=complex)
    for a, (ra, sa) in enumerate(pairs):
        for b, (rb, sb) in enumerate(pairs):
            H[a, b] = 0.25 * (Hr[ra, rb] + Hr[sa, sb] + 1j * (Hr[ra, sb] - Hr[sa, rb]))
    D = np.zeros((3, 6), dtype=complex)
    for a, (ra, sa) in enumerate(pairs):
        D[a, ra] = 1.0
        D[a, sa] = 1j
    ddbar = 1j * (np.einsum("ab,am,bn->mn", H, D, np.conj(D))
                  - np.einsum("ab,an,bm->mn", H, D, np.conj(D)))
    assert np.max(np.abs(np.imag(ddbar))) < 1e-9

    out = np.real(ddbar)
    out[:4, :4] += lam * coordinate_fundamental_matrix(M, x)
    return out


def bundle_chart_compare(M: HermitianSurface, lam: float, z: TwistorPoint,
                         seeds=None) -> float:
    """Max-norm difference, on the fiber chart, between the projectivised-
    bundle form (pulled back through the coordinate transition) and the
    twistor form K_3 of the Chern connection at the same parameter."""
    co = twistor_coframe(M, "chern", z, seeds=seeds, with_structure=False)
    Kmat = np.real(K_form(3, lam, co).to_array())

    def transition(y: np.ndarray) -> np.ndarray:
        zp = TwistorPoint.from_zeta(y[:4], complex(y[4], y[5]))
        w = fiber_coordinate_on_bundle(M, zp, seeds=seeds)
        return np.concatenate([y[:4], [w.real, w.imag]])

    y0 = z.chart_coordinates()
    be = M.backend
    Jac = np.stack([be.partial(transition, y0, p) for p in range(6)], axis=1)
    omega = projective_bundle_form(M, lam, z, seeds=seeds)
    pulled = Jac.T @ omega @ Jac
    return float(np.max(np.abs(pulled - Kmat)))


# ======================================================================
# scans, evaluation bundles, reports
# ======================================================================

def lambda_zero_crossing(i: int, M: HermitianSurface, conn: Union[str, float],
                         z: TwistorPoint, seeds=None,
                         sweep: Optional[CoframeSweep] = None) -> Tuple[Optional[float], float]:
    """Least-squares root of dK_i(lambda^2) = A + lambda^2 B over the fiber
    parameter: returns (lambda^2_*, residual at the root).

    The sweep is linear in lambda^2, so the root is -<A, B>/<B, B> on the
    coefficient vectors; None when the fiber block B vanishes (then the
    defect is lambda-independent and `residual` reports |A|).
    """
    sw = sweep or CoframeSweep(M, conn, z, seeds=seeds)
    A = (sw.dW_form(0) + sw.dW_form(1) * _EPS2[i]) * 1j
    Bf = sw.dW_form(2) * (1j * _EPS3[i])
    keys = set(A.terms) | set(Bf.terms)
    av = np.array([A.terms.get(k, 0.0) for k in sorted(keys)])
    bv = np.array([Bf.terms.get(k, 0.0) for k in sorted(keys)])
    bb = float(np.real(np.vdot(bv, bv)))
    if bb < 1e-18:
        return None, float(np.linalg.norm(av))
    root = -float(np.real(np.vdot(bv, av))) / bb
    resid = float(np.linalg.norm(av + root * bv))
    return root, resid


@dataclass(frozen=True)
class TwistorMetricEval:
    """Everything measured for one (structure, parameter) pair at one point."""

    i: int
    lambdas: Tuple[float, float, float]
    K: ComplexForm
    reality_defect: float
    volume_coefficient: float          # K^3/3! over the orientation 6-form
    dK_formula: Optional[ComplexForm]
    dK_oracle: ComplexForm
    dK_residual: Optional[float]
    symplectic_defect: float
    balanced_formula: Optional[ComplexForm]
    balanced_oracle: ComplexForm
    balanced_residual: Optional[float]
    balanced_defect: float


def evaluate_metric(M: HermitianSurface, conn: Union[str, float], z: TwistorPoint,
                    i: int, lam: Union[float, Sequence[float]], seeds=None,
                    coframe: Optional[TwistorCoframe] = None,
                    sweep: Optional[CoframeSweep] = None) -> TwistorMetricEval:
    """Evaluate K_i(lambda) with both the formula and the oracle paths."""
    lams = _lambdas(lam)
    co = coframe or twistor_coframe(M, conn, z, seeds=seeds)
    sw = sweep or CoframeSweep(M, conn, z, seeds=seeds)
    K = K_form(i, lams, co)
    reality = max((abs(np.imag(v)) for v in K.terms.values()), default=0.0)
    # K^3/3! against the ordered (1,0)-pair volume of J_i
    vol = wedge_all(K, K, K) * (1.0 / 6.0)
    rows = _adapted_rows(i, co.B)
    pair = lambda r: wedge(_row_form(rows[r]), _row_form(rows[r]).conj())  # noqa: E731
    orient = wedge_all(pair(0), pair(1), pair(2)) * (1j ** 3)
    vol_c = vol.terms.get((0, 1, 2, 3, 4, 5), 0.0)
    orient_c = orient.terms.get((0, 1, 2, 3, 4, 5), 0.0)
    volume_coefficient = float(np.real(vol_c / orient_c)) if abs(orient_c) > 0 else float("nan")

    dKo = sw.dK(i, lams)
    bo = wedge(sw.K(i, lams), dKo)
    formula_ok = abs(co.t) < 1e-12 or abs(co.t - 1.0) < 1e-12
    dKf = dK_formula(i, lams, co) if formula_ok else None
    dK_res = (dKf - dKo).norm() if dKf is not None else None
    one_param = lams[0] == 1.0 and lams[1] == 1.0
    bf = balanced_defect_formula(i, lams[2], co) if (formula_ok and one_param) else None
    b_res = (bf - bo).norm() if bf is not None else None
    return TwistorMetricEval(i=i, lambdas=lams, K=K, reality_defect=reality,
                             volume_coefficient=volume_coefficient,
                             dK_formula=dKf, dK_oracle=dKo, dK_residual=dK_res,
                             symplectic_defect=dKo.norm(),
                             balanced_formula=bf, balanced_oracle=bo,
                             balanced_residual=b_res, balanced_defect=bo.norm())


@dataclass(frozen=True)
class MetricConditionRow:
    """Aggregated condition data for one (structure, fiber parameter)."""

    i: int
    lam: float
    symplectic_defect: float
    symplectic: bool
    balanced_defect: float
    balanced: bool
    nijenhuis_defect: float
    integrable: bool
    formula_residual: Optional[float]

    def as_dict(self) -> Dict[str, object]:
        return {
            "i": self.i, "lambda": self.lam,
            "symplectic": {"holds": self.symplectic, "defect": self.symplectic_defect},
            "balanced": {"holds": self.balanced, "defect": self.balanced_defect},
            "integrable": {"holds": self.integrable, "defect": self.nijenhuis_defect},
            "formula_residual": self.formula_residual,
        }


@dataclass(frozen=True)
class TwistorConditionReport:
    surface: str
    params: Dict[str, float]
    connection: str
    t: float
    tolerance: float
    nijenhuis_tolerance: float
    lambda_grid: Tuple[float, ...]
    points: List[TwistorPoint]
    rows: List[MetricConditionRow]
    base_flags: List[Dict[str, object]]
    zero_crossings: Dict[int, List[Tuple[Optional[float], float]]]

    def as_dict(self) -> Dict[str, object]:
        return {
            "surface": self.surface,
            "params": self.params,
            "connection": self.connection,
            "t": self.t,
            "tolerance": self.tolerance,
            "nijenhuis_tolerance": self.nijenhuis_tolerance,
            "lambda_grid": list(self.lambda_grid),
            "points": [{"x": list(map(float, z.x)),
                        "zeta": [z.zeta.real, z.zeta.imag]} for z in self.points],
            "rows": [r.as_dict() for r in self.rows],
            "base_flags": self.base_flags,
            "zero_crossings": {str(i): [[v if v is None else float(v), float(r)]
                                        for v, r in vals]
                               for i, vals in self.zero_crossings.items()},
        }


def condition_report(M: HermitianSurface, conn: Union[str, float],
                     lambdas: Sequence[float], points: Sequence[TwistorPoint],
                     tol: float = 1e-6, nijenhuis_tol: float = 1e-4,
                     seeds=None) -> TwistorConditionReport:
    """Survey symplectic/balanced/integrability defects over a parameter grid.

    Work fans out conceptually over (point, i, lambda); results are merged
    deterministically in sorted key order, with defects aggregated by max
    over the points, so the report is independent of evaluation order.
    """
    t, label = normalize_connection(conn)
    grid = tuple(sorted(float(v) for v in lambdas))
    formula_ok = abs(t) < 1e-12 or abs(t - 1.0) < 1e-12

    sweeps = [CoframeSweep(M, conn, z, seeds=seeds) for z in points]
    coframes = [twistor_coframe(M, conn, z, seeds=seeds, with_structure=formula_ok)
                for z in points]
    flags = [condition_flags(M, z.x, tol=tol).as_dict() for z in points]
    nij = {i: max(nijenhuis_oracle(i, M, conn, z, seeds=seeds) for z in points)
           for i in (1, 2, 3, 4)}
    crossings = {i: [lambda_zero_crossing(i, M, conn, z, sweep=sw)
                     for z, sw in zip(points, sweeps)]
                 for i in (1, 2, 3, 4)}

    rows = []
    for i in (1, 2, 3, 4):
        for lam in grid:
            sym = bal = 0.0
            res: Optional[float] = None
            for sw, co in zip(sweeps, coframes):
                dKo = sw.dK(i, lam)
                bo = wedge(sw.K(i, lam), dKo)
                sym = max(sym, dKo.norm())
                bal = max(bal, bo.norm())
                if formula_ok:
                    r = (dK_formula(i, lam, co) - dKo).norm()
                    r = max(r, (balanced_defect_formula(i, lam, co) - bo).norm())
                    res = r if res is None else max(res, r)
            rows.append(MetricConditionRow(
                i=i, lam=lam, symplectic_defect=sym, symplectic=sym < tol,
                balanced_defect=bal, balanced=bal < tol,
                nijenhuis_defect=nij[i], integrable=nij[i] < nijenhuis_tol,
                formula_residual=res))

    return TwistorConditionReport(
        surface=M.name, params=dict(M.params), connection=label, t=t,
        tolerance=tol, nijenhuis_tolerance=nijenhuis_tol, lambda_grid=grid,
        points=list(points), rows=rows, base_flags=flags,
        zero_crossings=crossings)
