"""Levi-Civita and the canonical family of Hermitian connections.

The family D^t interpolates the three classical Hermitian connections of a
Hermitian surface (t = 0, 1, -1).  D^t differs from Levi-Civita by a torsion
correction built from dF:

    h(D^t_X Y, Z) = h(grad_X Y, Z) + (1-t)/4 * dF(JX, JY, JZ)
                                   - (1+t)/4 * dF(JX, Y, Z)

which is affine in t; on Kahler input every D^t collapses to Levi-Civita.

Curvature conventions (fixed for the whole package):
    R(X1, X2, X3, X4) = h(R(X3, X4) X2, X1),
    R(X, Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z,
so in a frame the curvature 2-forms are Om^i_j = 1/2 R_{ijkl} th^k ^ th^l.

Complexified components insert u_a = (e_{2a-1} - i e_{2a})/sqrt2 or their
conjugates into the real tensor slots; patterns are strings like "1*212*"
parsed one slot at a time (digit, optional '*' for conjugation).
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from twistorlab.exterior import ComplexForm, wedge
from twistorlab.manifold import (
    DiffBackend,
    HermitianSurface,
    UnitaryFrame,
    adapted_frame,
    coordinate_fundamental_matrix,
    dF_form,
    lee_form,
)

CONNECTION_T = {"lichnerowicz": 0.0, "chern": 1.0, "bismut": -1.0}

# u_a in adapted-frame components: u_1 = (e1 - i e2)/sqrt2, u_2 = (e3 - i e4)/sqrt2
_B_FRAME = np.array([
    [1.0, -1.0j, 0.0, 0.0],
    [0.0, 0.0, 1.0, -1.0j],
]) / np.sqrt(2.0)


# ======================================================================
# pattern handling and complexification
# ======================================================================

def parse_pattern(pattern: str) -> List[Tuple[int, bool]]:
    """Parse a slot pattern like '1*212*' into [(index, conjugated), ...]."""
    slots: List[Tuple[int, bool]] = []
    i = 0
    while i < len(pattern):
        ch = pattern[i]
        if ch not in "12":
            raise ValueError(f"malformed slot pattern {pattern!r}: expected '1' or '2', got {ch!r}")
        conj = i + 1 < len(pattern) and pattern[i + 1] == "*"
        slots.append((int(ch) - 1, conj))
        i += 2 if conj else 1
    if len(slots) != 4:
        raise ValueError(f"malformed slot pattern {pattern!r}: need exactly 4 slots")
    return slots


def flip_pattern(pattern: str) -> str:
    """Flip every conjugation flag in a slot pattern."""
    out = []
    for idx, conj in parse_pattern(pattern):
        out.append(f"{idx + 1}" if conj else f"{idx + 1}*")
    return "".join(out)


def complexify(tensor: np.ndarray, pattern: str) -> complex:
    """Insert u_a / conj(u_a) into the four slots of a frame-component tensor.

    Args:
        tensor: real (or complex) 4x4x4x4 array of adapted-frame components.
        pattern: e.g. '1*212' for (conj u_1, u_2, u_1, u_2).
    """
    tensor = np.asarray(tensor)
    assert tensor.shape == (4, 4, 4, 4), f"need frame components of shape (4,4,4,4), got {tensor.shape}"
    vecs = []
    for idx, conj in parse_pattern(pattern):
        v = _B_FRAME[idx]
        vecs.append(np.conj(v) if conj else v)
    return complex(np.einsum("ijkl,i,j,k,l->", tensor, *vecs))


# ======================================================================
# Levi-Civita connection
# ======================================================================

def christoffel(M: HermitianSurface, x: np.ndarray) -> np.ndarray:
    """Christoffel symbols Gamma[mu, nu, rho] = Gamma^mu_{nu rho} at x (FD of the metric)."""
    x = np.asarray(x, dtype=float)
    g = M.metric(x)
    ginv = np.linalg.inv(g)
    dg = np.stack([M.backend.partial(M.metric, x, k) for k in range(4)])  # dg[k] = d_k g
    # Gamma^mu_{nu rho} = 1/2 g^{mu la} (d_nu g_{la rho} + d_rho g_{la nu} - d_la g_{nu rho})
    return 0.5 * np.einsum("ml,nlr->mnr", ginv, dg + np.transpose(dg, (2, 1, 0))
                           - np.transpose(dg, (1, 0, 2)))


@dataclass(frozen=True)
class LeviCivitaData:
    """Levi-Civita connection data at a point, against the canonical frame field.

    omega_coord[i, j, nu] = h(grad_{d_nu} e_j, e_i); omega_frame contracts the
    direction slot with the frame.  R[i, j, k, l] follows the package-wide
    pairing R(X1, X2, X3, X4) = h(R(X3, X4) X2, X1).
    """
    point: np.ndarray
    frame: UnitaryFrame
    Gamma: np.ndarray         # (4, 4, 4)
    omega_coord: np.ndarray   # (4, 4, 4) real
    omega_frame: np.ndarray   # (4, 4, 4) real
    R: np.ndarray             # (4, 4, 4, 4) real, frame components

    def curvature_two_form(self, i: int, j: int) -> ComplexForm:
        """Om^i_j as a 2-form over the adapted coframe."""
        return ComplexForm(4, 2, {(k, l): self.R[i, j, k, l] for k in range(4) for l in range(k + 1, 4)})

    def component(self, pattern: str) -> complex:
        return complexify(self.R, pattern)

    def defects(self) -> Dict[str, float]:
        """Max violations of the structural invariants (for tests/validation)."""
        R = self.R
        anti_dir = float(np.max(np.abs(self.omega_frame + np.transpose(self.omega_frame, (1, 0, 2)))))
        sym_pairs = float(np.max(np.abs(R - np.transpose(R, (2, 3, 0, 1)))))
        anti_12 = float(np.max(np.abs(R + np.transpose(R, (1, 0, 2, 3)))))
        anti_34 = float(np.max(np.abs(R + np.transpose(R, (0, 1, 3, 2)))))
        bianchi = float(np.max(np.abs(R + np.transpose(R, (0, 2, 3, 1)) + np.transpose(R, (0, 3, 1, 2)))))
        return {
            "omega_antisymmetry": anti_dir,
            "pair_symmetry": sym_pairs,
            "antisymmetry_12": anti_12,
            "antisymmetry_34": anti_34,
            "first_bianchi": bianchi,
        }


def _frame_derivatives(M: HermitianSurface, x: np.ndarray,
                       seeds=None) -> np.ndarray:
    """dE[nu, mu, j] = d_nu E[mu, j] of the canonical frame field (FD)."""
    def E_of(p):
        return adapted_frame(M, p, seeds=seeds).E
    return np.stack([M.backend.partial(E_of, x, nu) for nu in range(4)])


def levi_civita(M: HermitianSurface, x: np.ndarray, seeds=None) -> LeviCivitaData:
    """Levi-Civita connection forms and curvature at x.

    Christoffels come from one FD pass over the metric; the curvature comes
    from a second FD pass over the Christoffel field; frame components are
    produced against the canonical Gram-Schmidt frame field.
    """
    x = np.asarray(x, dtype=float)
    fr = adapted_frame(M, x, seeds=seeds)
    g = M.metric(x)
    Gm = christoffel(M, x)

    dE = _frame_derivatives(M, x, seeds=seeds)
    # (grad_{d_nu} e_j)^mu = d_nu E[mu, j] + Gamma^mu_{nu rho} E[rho, j]
    nabla = np.einsum("nmj->mnj", dE.copy()) + np.einsum("mnr,rj->mnj", Gm, fr.E)
    omega_coord = np.einsum("ml,mnj,li->ijn", g, nabla, fr.E)
    omega_frame = np.einsum("ijn,nk->ijk", omega_coord, fr.E)

    # coordinate Riemann from the Christoffel field:
    # R^mu_{nu rho si} = d_rho Gm^mu_{si nu} - d_si Gm^mu_{rho nu} + Gm Gm - Gm Gm
    dG = np.stack([M.backend.partial(lambda p: christoffel(M, p), x, k) for k in range(4)])
    Rup = (np.einsum("rmsn->mnrs", dG) - np.einsum("smrn->mnrs", dG)
           + np.einsum("mrl,lsn->mnrs", Gm, Gm) - np.einsum("msl,lrn->mnrs", Gm, Gm))
    # lower the first slot and push through the frame, pairing h(R(X3,X4)X2, X1)
    Rdn = np.einsum("ml,lnrs->mnrs", g, Rup)
    Rfr = np.einsum("mnrs,mi,nj,rk,sl->ijkl", Rdn, fr.E, fr.E, fr.E, fr.E)
    return LeviCivitaData(point=x, frame=fr, Gamma=Gm, omega_coord=omega_coord,
                          omega_frame=omega_frame, R=Rfr)


# ======================================================================
# the Gauduchon family D^t
# ======================================================================

def _df_array(M: HermitianSurface, x: np.ndarray) -> np.ndarray:
    return dF_form(M, x).to_array().real


def torsion_correction(M: HermitianSurface, x: np.ndarray, t: float) -> np.ndarray:
    """A[nu, rho, la] = h(D^t - grad)(d_nu, d_rho, d_la) from the dF correction."""
    x = np.asarray(x, dtype=float)
    Jm = M.J(x)
    dF3 = _df_array(M, x)
    c1 = (1.0 - t) / 4.0
    c2 = (1.0 + t) / 4.0
    # c1 * dF(JX, JY, JZ) - c2 * dF(JX, Y, Z)
    JdF_all = np.einsum("abc,an,br,cl->nrl", dF3, Jm, Jm, Jm)
    JdF_first = np.einsum("abc,an->nbc", dF3, Jm)
    return c1 * JdF_all - c2 * JdF_first


@dataclass(frozen=True)
class HermitianConnectionData:
    """D^t connection data at a point in the canonical adapted frame.

    psi_coord[a, b, nu] is the complex connection matrix on (1,0)-frame
    vectors along coordinate directions; mu_coord is the off-u(2) part of the
    *Levi-Civita* connection (the obstruction 1-form that vanishes exactly in
    the Kahler case), which is the same for every t.
    """
    point: np.ndarray
    t: float
    frame: UnitaryFrame
    omega_tilde_coord: np.ndarray   # (4, 4, 4) real
    psi_coord: np.ndarray           # (2, 2, 4) complex
    mu_coord: np.ndarray            # (4,) complex
    torsion_coord: np.ndarray       # (4, 4, 4) real: T^mu_{nu rho}
    T20: np.ndarray                 # (2, 2, 2) complex: T^a(u_b, u_c)
    T11: np.ndarray                 # (2, 2, 2) complex: T^a(u_b, conj u_c)
    T02: np.ndarray                 # (2, 2, 2) complex: T^a(conj u_b, conj u_c)

    def skew_hermitian_defect(self) -> float:
        """Max |psi^a_b + conj(psi^b_a)| over directions (h- and J-parallelism)."""
        return float(np.max(np.abs(self.psi_coord + np.conj(np.transpose(self.psi_coord, (1, 0, 2))))))

    def j_commutation_defect(self) -> float:
        """Max norm of the J-anticommuting part of the connection matrix.

        Zero (to FD accuracy) for every member of the family; the analogous
        quantity for raw Levi-Civita is the mu 1-form.
        """
        from twistorlab.manifold import J_STANDARD
        # row/column indices are frame labels, so J acts as the standard block matrix
        J0 = J_STANDARD
        out = 0.0
        for nu in range(4):
            A = self.omega_tilde_coord[:, :, nu]
            out = max(out, float(np.max(np.abs(0.5 * (A + J0 @ A @ J0)))))
        return out


def complex_connection_matrix(omega_coord: np.ndarray) -> np.ndarray:
    """psi^a_b(.) = 1/2[(om^{2a-1}_{2b-1} + om^{2a}_{2b}) + i(om^{2a}_{2b-1} - om^{2a-1}_{2b})]."""
    psi = np.empty((2, 2, omega_coord.shape[2]), dtype=complex)
    for a in range(2):
        for b in range(2):
            ra, rb = 2 * a, 2 * b
            psi[a, b] = 0.5 * ((omega_coord[ra, rb] + omega_coord[ra + 1, rb + 1])
                               + 1j * (omega_coord[ra + 1, rb] - omega_coord[ra, rb + 1]))
    return psi


def mu_from_omega(omega_coord: np.ndarray) -> np.ndarray:
    """mu = 1/2[(om^2_4 - om^1_3) - i(om^2_3 + om^1_4)] (1-based rows/columns)."""
    return 0.5 * ((omega_coord[1, 3] - omega_coord[0, 2])
                  - 1j * (omega_coord[1, 2] + omega_coord[0, 3]))


def omega_tilde_coord(M: HermitianSurface, x: np.ndarray, t: float, seeds=None,
                      lc: Optional[LeviCivitaData] = None) -> Tuple[np.ndarray, np.ndarray, UnitaryFrame]:
    """(omega_tilde, lc_omega, frame) at x: D^t and Levi-Civita forms in coordinates."""
    x = np.asarray(x, dtype=float)
    if lc is None or not np.allclose(lc.point, x):
        fr = adapted_frame(M, x, seeds=seeds)
        g = M.metric(x)
        Gm = christoffel(M, x)
        dE = _frame_derivatives(M, x, seeds=seeds)
        nabla = np.einsum("nmj->mnj", dE.copy()) + np.einsum("mnr,rj->mnj", Gm, fr.E)
        omega_coord = np.einsum("ml,mnj,li->ijn", g, nabla, fr.E)
    else:
        fr = lc.frame
        omega_coord = lc.omega_coord
    A = torsion_correction(M, x, t)
    # om~^i_j(d_nu) = om^i_j(d_nu) + A(d_nu, e_j, e_i)
    corr = np.einsum("nrl,rj,li->ijn", A, fr.E, fr.E)
    return omega_coord + corr, omega_coord, fr


def psi_field(M: HermitianSurface, t: float, seeds=None) -> Callable[[np.ndarray], np.ndarray]:
    """The complex connection-matrix field p -> psi_coord(p) for D^t."""
    def field(p: np.ndarray) -> np.ndarray:
        om_t, _, _ = omega_tilde_coord(M, p, t, seeds=seeds)
        return complex_connection_matrix(om_t)
    return field


def gauduchon(M: HermitianSurface, x: np.ndarray, t: float, seeds=None,
              lc: Optional[LeviCivitaData] = None) -> HermitianConnectionData:
    """The canonical Hermitian connection D^t at x, with torsion.

    Torsion comes from the coefficient antisymmetrization
    T^mu_{nu rho} = Gm~^mu_{nu rho} - Gm~^mu_{rho nu}, which for this family
    reduces to the antisymmetrized dF correction; complex components insert
    (1,0)-frame vectors and conjugates.
    """
    x = np.asarray(x, dtype=float)
    om_t, om_lc, fr = omega_tilde_coord(M, x, t, seeds=seeds, lc=lc)
    psi = complex_connection_matrix(om_t)
    mu = mu_from_omega(om_lc)

    g = M.metric(x)
    ginv = np.linalg.inv(g)
    A = torsion_correction(M, x, t)
    # T^mu_{nu rho} = g^{mu la} [A(d_nu, d_rho, d_la) - A(d_rho, d_nu, d_la)]
    T = np.einsum("ml,nrl->mnr", ginv, A - np.transpose(A, (1, 0, 2)))

    U = fr.U
    Ubar = np.conj(U)
    eta = fr.eta
    def tcomp(vb, vc):
        # T^a(X, Y) = eta^a( T(X, Y) )
        vec = np.einsum("mnr,nb,rc->mbc", T, vb, vc)
        return np.einsum("am,mbc->abc", eta, vec)
    return HermitianConnectionData(
        point=x, t=t, frame=fr,
        omega_tilde_coord=om_t, psi_coord=psi, mu_coord=mu,
        torsion_coord=T,
        T20=tcomp(U, U), T11=tcomp(U, Ubar), T02=tcomp(Ubar, Ubar),
    )


def structure_equation_defect(M: HermitianSurface, data: HermitianConnectionData,
                              seeds=None) -> float:
    """Max coefficient of d eta^a + psi^a_b ^ eta^b - T^a over the chart coframe.

    Validates that psi and the torsion really belong to the same connection:
    the identity is exact, so the residual is pure FD noise.
    """
    x = data.point

    def eta_of(p):
        return adapted_frame(M, p, seeds=seeds).eta
    eta0 = eta_of(x)
    deta = np.stack([M.backend.partial(eta_of, x, nu) for nu in range(4)])  # [nu, a, rho]
    psi = data.psi_coord
    T = data.torsion_coord
    worst = 0.0
    for a in range(2):
        for mu in range(4):
            for nu in range(mu + 1, 4):
                val = deta[mu, a, nu] - deta[nu, a, mu]
                for b in range(2):
                    val += psi[a, b, mu] * eta0[b, nu] - psi[a, b, nu] * eta0[b, mu]
                val -= np.dot(eta0[a], T[:, mu, nu])
                worst = max(worst, abs(val))
    return worst


# ======================================================================
# direct D^t curvature via the structure equation Psi = d psi + psi ^ psi
# ======================================================================

@dataclass(frozen=True)
class GauduchonCurvature:
    """Curvature 2-forms Psi^a_b of D^t over the coordinate coframe."""
    point: np.ndarray
    t: float
    frame: UnitaryFrame
    Psi: List[List[ComplexForm]]    # [a][b], dim-4 2-forms over dx

    def evaluate(self, a: int, b: int, X: np.ndarray, Y: np.ndarray) -> complex:
        return self.Psi[a][b].evaluate(np.vstack([X, Y]))

    def component(self, pattern: str) -> complex:
        """K-component for a 4-slot pattern; pairing h(K(X3, X4) X2, X1).

        Slot 1 must be conjugated and slot 2 plain (or the full flip, handled
        by conjugation symmetry); patterns with slots 1, 2 of equal type
        vanish identically for a J-parallel connection.
        """
        slots = parse_pattern(pattern)
        (a, ca), (b, cb) = slots[0], slots[1]
        if ca == cb:
            return 0.0 + 0.0j
        if not ca:
            return complex(np.conj(self.component(flip_pattern(pattern))))
        vecs = []
        for idx, conj in (slots[2], slots[3]):
            v = self.frame.U[:, idx]
            vecs.append(np.conj(v) if conj else v)
        return complex(self.Psi[a][b].evaluate(np.vstack(vecs)))

    def real_tensor(self) -> np.ndarray:
        """K[i,j,k,l] = h(K(e_k, e_l) e_j, e_i) as real frame components."""
        E = self.frame.E
        out = np.empty((4, 4, 4, 4))
        for k in range(4):
            for l in range(4):
                P = np.array([[self.Psi[a][b].evaluate(np.vstack([E[:, k], E[:, l]]))
                               for b in range(2)] for a in range(2)])
                op = 2.0 * np.real(_B_FRAME.T @ P @ np.conj(_B_FRAME))
                out[:, :, k, l] = op
        return out


def direct_curvature(M: HermitianSurface, x: np.ndarray, t: float, seeds=None) -> GauduchonCurvature:
    """Curvature of D^t from FD of the connection-matrix field plus psi ^ psi."""
    x = np.asarray(x, dtype=float)
    fr = adapted_frame(M, x, seeds=seeds)
    field = psi_field(M, t, seeds=seeds)
    psi0 = field(x)
    dpsi = np.stack([M.backend.partial(field, x, nu) for nu in range(4)])  # [nu, a, b, rho]
    Psi: List[List[ComplexForm]] = [[None, None], [None, None]]
    for a in range(2):
        for b in range(2):
            raw: Dict[Tuple[int, ...], complex] = {}
            for mu in range(4):
                for nu in range(mu + 1, 4):
                    val = dpsi[mu, a, b, nu] - dpsi[nu, a, b, mu]
                    for c in range(2):
                        val += psi0[a, c, mu] * psi0[c, b, nu] - psi0[a, c, nu] * psi0[c, b, mu]
                    raw[(mu, nu)] = val
            Psi[a][b] = ComplexForm(4, 2, raw)
    return GauduchonCurvature(point=x, t=t, frame=fr, Psi=Psi)


# ======================================================================
# curvature relations against Levi-Civita (cross-checks)
# ======================================================================

@dataclass(frozen=True)
class TorsionAuxiliary:
    """Lee-form derived quantities entering the curvature relations.

    L[i, j] = (grad_{e_i} alpha)(e_j) + 1/2 alpha(e_i) alpha(e_j);
    d_alpha_J[i, j] = d(alpha o J)(e_i, e_j); alpha_sq = |alpha|^2.
    All in adapted-frame components; all vanish on Kahler input.
    """
    point: np.ndarray
    frame: UnitaryFrame
    alpha_frame: np.ndarray    # (4,) real
    L: np.ndarray              # (4, 4) real
    d_alpha_J: np.ndarray      # (4, 4) real antisymmetric
    alpha_sq: float
    alpha_J_wedge_F: np.ndarray  # (4, 4, 4) real frame components of (alpha o J) ^ F
    grad_alpha_J_wedge_F: np.ndarray  # (4, 4, 4, 4): [dir, slots...] frame components


def _alpha_coord_field(M: HermitianSurface, seeds=None) -> Callable[[np.ndarray], np.ndarray]:
    def field(p: np.ndarray) -> np.ndarray:
        fr = adapted_frame(M, p, seeds=seeds)
        a = lee_form(M, p, frame=fr)
        comps = np.array([a.terms.get((i,), 0.0) for i in range(4)]).real
        return comps @ fr.theta
    return field


def _alpha_J_wedge_F_coord(M: HermitianSurface, p: np.ndarray, alpha_field) -> np.ndarray:
    """(alpha o J) ^ F as a full antisymmetric coordinate array at p."""
    ac = alpha_field(p)
    Jm = M.J(p)
    aJ = ac @ Jm                       # (alpha o J)(d_nu) = alpha(J d_nu)
    Fc = coordinate_fundamental_matrix(M, p)
    form = ComplexForm(4, 1, {(i,): aJ[i] for i in range(4)})
    Fform = ComplexForm(4, 2, {(i, j): Fc[i, j] for i in range(4) for j in range(i + 1, 4)})
    return wedge(form, Fform).to_array().real


def torsion_auxiliary(M: HermitianSurface, x: np.ndarray, seeds=None,
                      lc: Optional[LeviCivitaData] = None) -> TorsionAuxiliary:
    """Assemble the Lee-form auxiliaries used by the curvature relations."""
    x = np.asarray(x, dtype=float)
    if lc is None or not np.allclose(lc.point, x):
        fr = adapted_frame(M, x, seeds=seeds)
        Gm = christoffel(M, x)
    else:
        fr = lc.frame
        Gm = lc.Gamma
    alpha_field = _alpha_coord_field(M, seeds=seeds)
    ac = alpha_field(x)
    Jm = M.J(x)
    aJ_field = lambda p: alpha_field(p) @ M.J(p)

    # grad alpha in coordinates: (grad alpha)_{nu rho} = d_nu a_rho - Gm^mu_{nu rho} a_mu
    da = np.stack([M.backend.partial(alpha_field, x, nu) for nu in range(4)])
    grad_a = da - np.einsum("mnr,m->nr", Gm, ac)
    L_coord = grad_a + 0.5 * np.outer(ac, ac)
    L = fr.E.T @ L_coord @ fr.E

    # d(alpha o J) as a coordinate 2-form
    daJ = np.stack([M.backend.partial(aJ_field, x, nu) for nu in range(4)])
    daJ2 = daJ - daJ.T
    d_alpha_J = fr.E.T @ daJ2 @ fr.E

    alpha_frame = ac @ fr.E  # alpha(e_i)
    alpha_sq = float(np.dot(alpha_frame, alpha_frame))

    B3 = _alpha_J_wedge_F_coord(M, x, alpha_field)
    B3_frame = np.einsum("abc,ai,bj,ck->ijk", B3, fr.E, fr.E, fr.E)

    # covariant derivative of the 3-form in coordinates, then frame components
    dB3 = np.stack([M.backend.partial(lambda p: _alpha_J_wedge_F_coord(M, p, alpha_field), x, nu)
                    for nu in range(4)])
    gradB3 = (dB3
              - np.einsum("mna,mbc->nabc", Gm, B3)
              - np.einsum("mnb,amc->nabc", Gm, B3)
              - np.einsum("mnc,abm->nabc", Gm, B3))
    gradB3_frame = np.einsum("nabc,nd,ai,bj,ck->dijk", gradB3, fr.E, fr.E, fr.E, fr.E)

    return TorsionAuxiliary(point=x, frame=fr, alpha_frame=alpha_frame, L=L,
                            d_alpha_J=d_alpha_J, alpha_sq=alpha_sq,
                            alpha_J_wedge_F=B3_frame, grad_alpha_J_wedge_F=gradB3_frame)


@dataclass(frozen=True)
class CurvatureTensor:
    """A curvature-type tensor in adapted-frame components with slot pairing
    T(X1, X2, X3, X4); complexified components via `component(pattern)`."""
    which: str
    point: np.ndarray
    array: np.ndarray   # (4, 4, 4, 4)

    def component(self, pattern: str) -> complex:
        return complexify(self.array, pattern)

    def conjugation_defect(self, patterns: Tuple[str, ...] = ("1*212", "1*21*2", "1*211*", "1*222*", "1*212*", "1*21*2*")) -> float:
        return max(abs(self.component(p) - np.conj(self.component(flip_pattern(p)))) for p in patterns)


# F and h in adapted-frame components
_F_FRAME = np.array([
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0, 0.0],
])
_H_FRAME = np.eye(4)


def chern_curvature_relation(lc: LeviCivitaData, aux: TorsionAuxiliary) -> CurvatureTensor:
    """Chern curvature K from Levi-Civita curvature plus Lee-form corrections.

    K(X1..X4) = R + 1/2 d(alpha o J)(X3, X4) F(X1, X2)
                + 1/2 [L(X4, X2) h(X3, X1) + L(X3, X1) h(X4, X2)]
                - 1/2 [L(X3, X2) h(X4, X1) + L(X4, X1) h(X3, X2)]
                + |alpha|^2/4 [h(X3, X2) h(X4, X1) - h(X4, X2) h(X3, X1)]
    """
    assert np.allclose(lc.point, aux.point), "relation inputs evaluated at different points"
    R = lc.R
    L = aux.L
    h = _H_FRAME
    K = (R
         + 0.5 * np.einsum("kl,ij->ijkl", aux.d_alpha_J, _F_FRAME)
         + 0.5 * (np.einsum("lj,ki->ijkl", L, h) + np.einsum("ki,lj->ijkl", L, h))
         - 0.5 * (np.einsum("kj,li->ijkl", L, h) + np.einsum("li,kj->ijkl", L, h))
         + 0.25 * aux.alpha_sq * (np.einsum("kj,li->ijkl", h, h) - np.einsum("lj,ki->ijkl", h, h)))
    return CurvatureTensor(which="chern_relation", point=lc.point, array=K)


def bismut_curvature_relation(lc: LeviCivitaData, aux: TorsionAuxiliary) -> CurvatureTensor:
    """Bismut curvature K~ from Levi-Civita curvature plus (alpha o J) ^ F terms.

    K~(X1..X4) = R + 1/2 (grad_{X3}(aJ^F))(X4, X2, X1) - 1/2 (grad_{X4}(aJ^F))(X3, X2, X1)
                 + 1/4 sum_m (aJ^F)(X4, X1, e_m)(aJ^F)(X3, X2, e_m)
                 - 1/4 sum_m (aJ^F)(X3, X1, e_m)(aJ^F)(X4, X2, e_m)
    """
    assert np.allclose(lc.point, aux.point), "relation inputs evaluated at different points"
    R = lc.R
    B = aux.alpha_J_wedge_F
    GB = aux.grad_alpha_J_wedge_F
    K = (R
         + 0.5 * np.einsum("klji->ijkl", GB)
         - 0.5 * np.einsum("lkji->ijkl", GB)
         + 0.25 * np.einsum("lim,kjm->ijkl", B, B)
         - 0.25 * np.einsum("kim,ljm->ijkl", B, B))
    return CurvatureTensor(which="bismut_relation", point=lc.point, array=K)
