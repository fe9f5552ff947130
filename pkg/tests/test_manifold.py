import numpy as np
import pytest

from twistorlab import manifold as mf
from twistorlab.exterior import ComplexForm


def interior_points(M, n, seed):
    return M.chart.interior_points(n, seed=seed)


# ----------------------------------------------------------------------
# DSL parsing
# ----------------------------------------------------------------------

FLAT_SPEC = """\
coords x1 x2 x3 x4
domain x1 -1 1
domain x2 -1 1
domain x3 -1 1
domain x4 -1 1
J standard
"""


def test_parse_flat_identity():
    M = mf.parse_surface_spec(FLAT_SPEC)
    x = np.array([0.3, -0.2, 0.1, 0.0])
    np.testing.assert_allclose(M.metric(x), np.eye(4))
    np.testing.assert_allclose(M.J(x), mf.J_STANDARD)


def test_parse_expressions_and_comments():
    text = """\
# comment line
coords a b c d
domain a 0.5 2
g 1 1 = 1/(1 + a^2)      # inline comment
g 2 2 = 1/(1 + a^2)
g 3 3 = sqrt(4) + sin(c)*cos(c) - tanh(exp(0 - d^2))
g 4 4 = sqrt(4) + sin(c)*cos(c) - tanh(exp(0 - d^2))
J standard
"""
    M = mf.parse_surface_spec(text)
    x = np.array([1.0, 0.3, -0.2, 0.4])
    g = M.metric(x)
    np.testing.assert_allclose(g[0, 0], 0.5)
    np.testing.assert_allclose(g[1, 1], 0.5)
    np.testing.assert_allclose(g[2, 2], 2.0 + np.sin(-0.2) * np.cos(-0.2) - np.tanh(np.exp(-0.16)))
    np.testing.assert_allclose(g[3, 3], g[2, 2])


def test_unary_minus_binds_before_power():
    # per the grammar, '-' lives at the base level, so -a^2 means (-a)^2
    text = """\
coords a b c d
g 1 1 = 3 + -a^3
g 2 2 = 3 + -a^3
J standard
"""
    M = mf.parse_surface_spec(text)
    x = np.array([0.5, 0.0, 0.0, 0.0])
    np.testing.assert_allclose(M.metric(x)[0, 0], 3 + (-0.5) ** 3)


def test_parse_negative_exponent_and_scientific_numbers():
    text = """\
coords x1 x2 x3 x4
g 1 1 = 2^-1 + 1.5e0 - 1e0
g 2 2 = (1 + x1^2)^-1 + x1^2/(1+x1^2)
J standard
"""
    M = mf.parse_surface_spec(text)
    x = np.array([0.37, 0.0, 0.0, 0.0])
    np.testing.assert_allclose(M.metric(x)[0, 0], 1.0)
    np.testing.assert_allclose(M.metric(x)[1, 1], 1.0, rtol=1e-14)


@pytest.mark.parametrize("bad, line, fragment", [
    ("coords x1 x2 x3\nJ standard\n", 1, "coords needs exactly 4"),
    ("coords x1 x2 x3 x4\ng 1 1 = 1 +\nJ standard\n", 2, "unexpected end"),
    ("coords x1 x2 x3 x4\ng 1 1 = y\n", 2, "unknown name 'y'"),
    ("coords x1 x2 x3 x4\ng 1 1 = x1^2.5\n", 2, "exponent must be an integer"),
    ("coords x1 x2 x3 x4\ng 5 1 = 1\n", 2, "indices must be in 1..4"),
    ("coords x1 x2 x3 x4\ndomain x9 0 1\n", 2, "unknown coordinate"),
    ("coords x1 x2 x3 x4\ng 1 1 = 1 @ 2\n", 2, "unexpected character"),
    ("domain x1 0 1\n", 1, "coords line must come first"),
])
def test_parse_errors_carry_line_numbers(bad, line, fragment):
    with pytest.raises(mf.SpecSyntaxError) as exc:
        mf.parse_surface_spec(bad)
    assert f"line {line}" in str(exc.value)
    assert fragment in str(exc.value)


def test_parse_rejects_nonsymmetric_completion():
    text = """\
coords x1 x2 x3 x4
g 1 1 = 1/(1+x1^2)
g 1 2 = x1
g 2 1 = x2
J standard
"""
    with pytest.raises(ValueError, match="metric not symmetric"):
        mf.parse_surface_spec(text)


def test_parse_rejects_incompatible_J():
    # diag(1, 1, 1, 4) is positive but not invariant under the standard J
    text = """\
coords x1 x2 x3 x4
g 4 4 = 4
J standard
"""
    with pytest.raises(ValueError, match="metric not J-invariant"):
        mf.parse_surface_spec(text)


def test_parse_validates_J_square():
    text = """\
coords x1 x2 x3 x4
J 1 2 = -2
J 2 1 = 2
J 3 4 = -1
J 4 3 = 1
"""
    with pytest.raises(ValueError, match=r"J\*J != -Id"):
        mf.parse_surface_spec(text)


def test_builtin_source_round_trip():
    M = mf.builtin("cp2_fs", c=2.0)
    M2 = mf.parse_surface_spec(M.source_text)
    rng = np.random.default_rng(17)
    for _ in range(10):
        x = rng.uniform(-0.6, 0.6, size=4)
        np.testing.assert_allclose(M.metric(x), M2.metric(x), atol=1e-12)
        np.testing.assert_allclose(M.J(x), M2.J(x), atol=1e-12)


# ----------------------------------------------------------------------
# built-ins
# ----------------------------------------------------------------------

def test_builtin_flat():
    M = mf.builtin("flat_c2")
    x = np.array([0.5, 0.5, -0.5, 0.1])
    np.testing.assert_allclose(M.metric(x), np.eye(4))
    np.testing.assert_allclose(M.J(x), mf.J_STANDARD)


def test_builtin_cp2_origin_metric():
    # at the chart origin the FS metric is (4/c) Id
    for c in (1.0, 2.0, 4.0):
        M = mf.builtin("cp2_fs", c=c)
        np.testing.assert_allclose(M.metric(np.zeros(4)), (4.0 / c) * np.eye(4), atol=1e-14)


def test_builtin_rejects_bad_input():
    with pytest.raises(ValueError, match="unknown builtin"):
        mf.builtin("nope")
    with pytest.raises(ValueError, match="c must be positive"):
        mf.builtin("cp2_fs", c=-1.0)
    with pytest.raises(ValueError, match="unknown parameters"):
        mf.builtin("hopf", c=2.0)


@pytest.mark.parametrize("name", mf.BUILTIN_NAMES)
def test_surface_invariants_50_points(name):
    M = mf.builtin(name)
    for x in interior_points(M, 50, seed=99):
        g = M.metric(x)
        Jm = M.J(x)
        assert np.min(np.linalg.eigvalsh(g)) > 1e-10
        np.testing.assert_allclose(g, g.T, atol=1e-10)
        np.testing.assert_allclose(Jm @ Jm, -np.eye(4), atol=1e-10)
        np.testing.assert_allclose(Jm.T @ g @ Jm, g, atol=1e-10)


def test_hopf_is_not_kahler():
    M = mf.builtin("hopf")
    for x in interior_points(M, 5, seed=3):
        assert mf.dF_form(M, x).norm() > 0.1


# ----------------------------------------------------------------------
# adapted frames
# ----------------------------------------------------------------------

def test_adapted_frame_flat_is_coordinate_frame():
    M = mf.builtin("flat_c2")
    fr = mf.adapted_frame(M, np.zeros(4))
    np.testing.assert_allclose(fr.E, np.eye(4), atol=1e-14)
    np.testing.assert_allclose(fr.theta, np.eye(4), atol=1e-14)


def test_adapted_frame_cp2_origin_is_rescaled():
    M = mf.builtin("cp2_fs", c=2.0)
    fr = mf.adapted_frame(M, np.zeros(4))
    # metric is 2*Id there, so frame vectors are 1/sqrt(2) * coordinate axes
    np.testing.assert_allclose(fr.E, np.eye(4) / np.sqrt(2.0), atol=1e-14)


@pytest.mark.parametrize("name", mf.BUILTIN_NAMES)
def test_adapted_frame_invariants(name):
    M = mf.builtin(name)
    for x in interior_points(M, 8, seed=5):
        fr = mf.adapted_frame(M, x)
        g = M.metric(x)
        Jm = M.J(x)
        np.testing.assert_allclose(fr.E.T @ g @ fr.E, np.eye(4), atol=1e-10)
        np.testing.assert_allclose(fr.E[:, 1], Jm @ fr.E[:, 0], atol=1e-15)
        np.testing.assert_allclose(fr.E[:, 3], Jm @ fr.E[:, 2], atol=1e-15)
        # complex frame and its dual
        np.testing.assert_allclose(fr.U[:, 0], (fr.E[:, 0] - 1j * fr.E[:, 1]) / np.sqrt(2.0))
        np.testing.assert_allclose(fr.eta @ fr.U, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(fr.eta @ np.conj(fr.U), np.zeros((2, 2)), atol=1e-12)


def test_adapted_frame_degenerate_seed():
    M = mf.builtin("flat_c2")
    s1 = np.array([1.0, 0.0, 0.0, 0.0])
    # second seed inside span(e1, Je1) leaves no residual
    s2 = np.array([0.3, 0.8, 0.0, 0.0])
    with pytest.raises(ValueError, match="seed degenerate at point"):
        mf.adapted_frame(M, np.zeros(4), seeds=(s1, s2))


def test_frame_field_is_deterministic():
    M = mf.builtin("cp2_fs")
    field = mf.frame_field(M)
    x = np.array([0.1, 0.2, -0.3, 0.05])
    np.testing.assert_array_equal(field(x).E, field(x).E)


# ----------------------------------------------------------------------
# fundamental form and Lee form
# ----------------------------------------------------------------------

def test_fundamental_form_in_adapted_coframe():
    M = mf.builtin("hopf")
    x = np.array([0.6, 0.55, 0.62, 0.5])
    fr = mf.adapted_frame(M, x)
    F = mf.fundamental_form(M, x, fr)
    assert F.isclose(ComplexForm(4, 2, {(0, 1): 1.0, (2, 3): 1.0}), tol=1e-15)


def test_flat_dF_and_lee_vanish():
    M = mf.builtin("flat_c2")
    x = np.array([0.2, -0.1, 0.4, 0.3])
    assert mf.dF_form(M, x).norm() < 1e-13
    assert mf.lee_form(M, x).norm() < 1e-13


@pytest.mark.parametrize("name", ["cp2_fs", "ch2"])
def test_kahler_builtins_have_zero_lee_form(name):
    M = mf.builtin(name)
    for x in interior_points(M, 5, seed=21):
        assert mf.dF_form(M, x).norm() < 1e-8
        assert mf.lee_form(M, x).norm() < 1e-8


def test_hopf_lee_form_homogeneity():
    M = mf.builtin("hopf")
    xa = np.array([0.6, 0.55, 0.62, 0.5])
    xb = np.array([0.5, 0.62, 0.55, 0.6])  # same |z|
    na = mf.lee_form(M, xa).norm()
    nb = mf.lee_form(M, xb).norm()
    assert na > 0.1
    np.testing.assert_allclose(na, nb, rtol=1e-9)
    # conformally flat with factor 1/rho: the Lee form has h-norm exactly 2
    np.testing.assert_allclose(na, 2.0, rtol=1e-9)


def test_boundary_guard():
    M = mf.builtin("flat_c2")
    with pytest.raises(ValueError, match="point too close to boundary"):
        mf.dF_form(M, np.array([-0.9995, 0.0, 0.0, 0.0]))


# ----------------------------------------------------------------------
# differentiation backend sanity
# ----------------------------------------------------------------------

def _ddF(M, x):
    """d(dF) by FD of FD; identically zero up to roundoff (shifts commute)."""
    keys = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]

    def coeffs(p):
        f = mf.dF_form(M, p)
        return np.array([f.terms.get(k, 0.0) for k in keys])

    raw = {}
    for l in range(4):
        d = M.backend.partial(coeffs, x, l)
        for k_i, key in enumerate(keys):
            raw[(l,) + key] = raw.get((l,) + key, 0.0) + d[k_i]
    return ComplexForm(4, 4, raw)


@pytest.mark.parametrize("name", mf.BUILTIN_NAMES)
def test_ddF_vanishes(name):
    M = mf.builtin(name)
    x = M.chart.box.mean(axis=1)
    assert _ddF(M, x).norm() < 1e-4


def _exact_hopf_dF(x):
    rho = float(np.dot(x, x))
    raw = {}
    for k in range(4):
        c = -2.0 * x[k] / rho ** 2
        for pair in ((0, 1), (2, 3)):
            key = (k,) + pair
            raw[key] = raw.get(key, 0.0) + c
    return ComplexForm(4, 3, raw)


def test_order4_halving_improves_truncation_error():
    # fourth-order backend: halving the step shrinks the truncation error of
    # dF against the closed form by ~16x; assert at least 8x
    x = np.array([0.66, 0.63, 0.65, 0.64])
    errs = []
    for step in (8e-2, 4e-2):
        M = mf.builtin("hopf", backend=mf.DiffBackend(step=step))
        errs.append((mf.dF_form(M, x) - _exact_hopf_dF(x)).norm())
    assert errs[0] / errs[1] >= 8.0


def test_order2_backend_also_converges():
    x = np.array([0.66, 0.63, 0.65, 0.64])
    errs = []
    for step in (8e-2, 4e-2):
        M = mf.builtin("hopf", backend=mf.DiffBackend(step=step, order=2))
        errs.append((mf.dF_form(M, x) - _exact_hopf_dF(x)).norm())
    assert errs[0] / errs[1] >= 3.5  # second order: ~4x


def test_backend_validation():
    with pytest.raises(ValueError, match="order must be 2 or 4"):
        mf.DiffBackend(order=3)
    with pytest.raises(ValueError, match="step must be positive"):
        mf.DiffBackend(step=0.0)
