import numpy as np
import pytest

from equiszego.actions import (
    WeightSystem,
    act,
    eta_vector,
    infinitesimal_action,
    locus_center,
    locus_distance,
    locus_sample,
    moment,
    moment_kernel_basis,
    script_D,
    stabilizer,
    tangent_split,
)
from equiszego.errors import (
    AssumptionViolation,
    DomainError,
    InfeasibleLocusError,
    TransversalityError,
)
from equiszego.geometry import SpherePoint, apply_J, frame_at, to_complex, to_real
from equiszego.presets import (
    level_weight_system,
    p1_weight_system,
    p2_weight_system,
    t_only_weight_system,
)

WS1 = p1_weight_system()
WS2 = p2_weight_system()
X1 = SpherePoint(np.array([1.0, 1.0]) / np.sqrt(2))
X2 = SpherePoint(np.ones(3) / np.sqrt(3))


def random_unit(n, seed):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    return SpherePoint(z / np.linalg.norm(z))


# ---------------------------------------------------------------------------
# weight systems
# ---------------------------------------------------------------------------

def test_positivity_check_rejects_mixed_hull():
    with pytest.raises(AssumptionViolation):
        WeightSystem(n=1, W_G=np.zeros((0, 2), dtype=int), W_T=np.array([[1, -1]]))


def test_positive_functional_certificate():
    phi = WS1.positive_functional
    assert np.all(phi @ WS1.W_T >= 1 - 1e-9)


# ---------------------------------------------------------------------------
# action
# ---------------------------------------------------------------------------

def test_act_identity_and_unitarity():
    x = random_unit(1, seed=0)
    assert np.allclose(act(WS1, np.zeros(2), x).z, x.z)
    rng = np.random.default_rng(1)
    for _ in range(10):
        p = rng.uniform(0, 2 * np.pi, size=2)
        assert abs(np.linalg.norm(act(WS1, p, x).z) - 1.0) < 1e-12


def test_act_matches_published_convention():
    # (w, s) = (e^{i gamma}, e^{i theta}) acts as ((ws)^{-1} z0, w s^{-2} z1);
    # the compensated elements with s^3 = 1, w = 1/s fix the equal-moduli point.
    for j in range(3):
        theta = 2 * np.pi * j / 3
        gamma = -theta
        y = act(WS1, np.array([gamma, theta]), X1)
        assert np.max(np.abs(y.z - X1.z)) < 1e-12


# ---------------------------------------------------------------------------
# moment map
# ---------------------------------------------------------------------------

def test_moment_published_values():
    md = moment(WS1, X1)
    assert np.allclose(md.phi_G, [0.0]) and np.allclose(md.phi_T, [1.5])
    md = moment(WS1, SpherePoint(np.array([1.0, 0.0])))
    assert np.allclose(md.phi_G, [1.0]) and np.allclose(md.phi_T, [1.0])
    md = moment(WS2, X2)
    assert np.allclose(md.phi_G, [0.0, 0.0]) and np.allclose(md.phi_T, [2.0])


def test_moment_invariance_under_action():
    rng = np.random.default_rng(2)
    x = random_unit(2, seed=3)
    for _ in range(10):
        p = rng.uniform(0, 2 * np.pi, size=3)
        md0 = moment(WS2, x)
        md1 = moment(WS2, act(WS2, p, x))
        assert np.max(np.abs(md0.phi_P - md1.phi_P)) < 1e-12


def test_moment_inside_column_hull():
    for seed in range(5):
        x = random_unit(1, seed=seed)
        md = moment(WS1, x)
        cols = WS1.W_P
        lo, hi = cols.min(axis=1), cols.max(axis=1)
        assert np.all(md.phi_P >= lo - 1e-12) and np.all(md.phi_P <= hi + 1e-12)


# ---------------------------------------------------------------------------
# infinitesimal action
# ---------------------------------------------------------------------------

def _fd_infinitesimal(ws, xi, f, h=1e-4):
    """Central-difference oracle through the affine chart."""
    x = f.x

    def chart(t):
        y = act(ws, t * np.asarray(xi, dtype=float), x)
        return (f.e.conj() @ y.z) / np.vdot(x.z, y.z)

    return to_real((chart(h) - chart(-h)) / (2 * h))


def test_infinitesimal_fiber_only_direction():
    # all weights equal on the support: the action only rotates the fiber
    ws = level_weight_system(2)
    f = frame_at(random_unit(2, seed=4))
    v = infinitesimal_action(ws, np.array([1.0]), f)
    assert np.max(np.abs(v)) < 1e-12


def test_infinitesimal_matches_finite_differences():
    f = frame_at(X1)
    v = infinitesimal_action(WS1, np.array([1.0, 0.0]), f)
    assert np.linalg.norm(v) > 0.5
    fd = _fd_infinitesimal(WS1, np.array([1.0, 0.0]), f)
    assert np.max(np.abs(v - fd)) < 1e-6
    f2 = frame_at(random_unit(2, seed=5))
    for xi in np.eye(3):
        fd = _fd_infinitesimal(WS2, xi, f2)
        assert np.max(np.abs(infinitesimal_action(WS2, xi, f2) - fd)) < 1e-6


def test_infinitesimal_linearity():
    f = frame_at(random_unit(2, seed=6))
    xi, zeta = np.array([1.0, 2.0, -1.0]), np.array([0.5, -1.0, 3.0])
    lhs = infinitesimal_action(WS2, 2.0 * xi + 0.3 * zeta, f)
    rhs = 2.0 * infinitesimal_action(WS2, xi, f) + 0.3 * infinitesimal_action(WS2, zeta, f)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


# ---------------------------------------------------------------------------
# kernel basis, Gram invariant, eta
# ---------------------------------------------------------------------------

def test_kernel_basis_on_locus_is_fixed_block():
    B = moment_kernel_basis(WS1, X1)
    assert B.shape == (1, 2)
    assert np.allclose(np.abs(B[0]), [1.0, 0.0])
    B2 = moment_kernel_basis(WS2, X2)
    assert B2.shape == (2, 3)
    assert np.max(np.abs(B2[:, 2])) < 1e-12


def test_kernel_basis_annihilates_phi():
    for seed in range(5):
        x = random_unit(2, seed=seed)
        md = moment(WS2, x)
        B = moment_kernel_basis(WS2, x)
        assert np.max(np.abs(B @ md.phi_P)) < 1e-10


def test_script_D_empty_kernel_convention():
    ws = t_only_weight_system(1, [1, 2])
    assert script_D(ws, frame_at(random_unit(1, seed=7))) == 1.0


def test_script_D_frozen_values():
    # finite-difference-derived regression constants for the worked examples
    assert abs(script_D(WS1, frame_at(X1)) - 1.0) < 1e-10
    assert abs(script_D(WS2, frame_at(X2)) - 1.0 / np.sqrt(3)) < 1e-10


def test_script_D_basis_rotation_invariance():
    f = frame_at(X2)
    B = moment_kernel_basis(WS2, X2)
    rng = np.random.default_rng(8)
    A = rng.standard_normal((2, 2))
    Q, _ = np.linalg.qr(A)
    vals = np.array([infinitesimal_action(WS2, b, f) for b in B])
    rvals = np.array([infinitesimal_action(WS2, b, f) for b in Q @ B])
    d1 = np.sqrt(np.linalg.det(vals @ vals.T))
    d2 = np.sqrt(np.linalg.det(rvals @ rvals.T))
    assert abs(d1 - d2) < 1e-10


def test_script_D_transversality_failure():
    # at the axis point the fixed-block direction evaluates to zero
    with pytest.raises(TransversalityError):
        script_D(WS1, frame_at(SpherePoint(np.array([1.0, 0.0]))))


def test_eta_published_values():
    eta, _ = eta_vector(WS1, frame_at(X1))
    assert np.allclose(eta, [0.0, 1.0], atol=1e-12)
    eta2, _ = eta_vector(WS2, frame_at(X2))
    assert np.allclose(eta2, [0.0, 0.0, 1.0], atol=1e-12)


def test_eta_pairing_identity():
    eta, _ = eta_vector(WS1, frame_at(X1))
    md = moment(WS1, X1)
    assert abs(eta @ md.phi_P - np.linalg.norm(md.phi_T)) < 1e-10
    assert abs(np.linalg.norm(eta) - 1.0) < 1e-10


def test_eta_off_locus_is_domain_error():
    x = SpherePoint.from_moduli([0.7, 0.3])
    with pytest.raises(DomainError):
        eta_vector(WS1, frame_at(x))


# ---------------------------------------------------------------------------
# stabilizers
# ---------------------------------------------------------------------------

def test_stabilizer_orders_on_worked_examples():
    els1 = stabilizer(WS1, X1, nu_T=[1])
    assert len(els1) == 3
    els2 = stabilizer(WS2, X2, nu_T=[1])
    assert len(els2) == 6  # all sixth roots, including the omitted middle one


def test_stabilizer_elements_fix_point():
    for ws, x in ((WS1, X1), (WS2, X2)):
        for el in stabilizer(ws, x):
            assert np.max(np.abs(act(ws, el.sigma, x).z - x.z)) < 1e-12


def test_stabilizer_is_a_group():
    els = stabilizer(WS2, X2)
    turns = {tuple(el.sigma_turns) for el in els}
    for a in els:
        for b in els:
            comp = tuple((ta + tb) % 1 for ta, tb in zip(a.sigma_turns, b.sigma_turns))
            assert comp in turns


def test_stabilizer_against_grid_oracle():
    # generic full-rank weights: solutions have denominator dividing |det S|,
    # so a q x q grid scan is an exhaustive independent oracle
    ws = WeightSystem(n=1, W_G=np.array([[2, 1]]), W_T=np.array([[1, 3]]))
    x = random_unit(1, seed=9)
    els = stabilizer(ws, x)
    S = ws.W_P.T
    q = abs(int(round(np.linalg.det(S))))
    found = 0
    for a in range(q):
        for b in range(q):
            v = S @ np.array([a / q, b / q])
            if np.max(np.abs(v - np.round(v))) < 1e-9:
                found += 1
    assert len(els) == found == q


def test_stabilizer_not_locally_free():
    # at an axis point of the first example only one weight constrains two angles
    with pytest.raises(AssumptionViolation):
        stabilizer(WS1, SpherePoint(np.array([1.0, 0.0])))


def test_stabilizer_fiber_phase_matches_monomial_action():
    # the recorded character data reproduces the phase picked up by any
    # section of matching weight, read off a monomial evaluation
    from equiszego.hardy import build_basis, eval_section

    els = stabilizer(WS1, X1, nu_T=[1])
    k = 7
    b = build_basis(WS1, [1], [1], k)
    J, log_c = b.entries[0]
    y = random_unit(1, seed=10)
    for el in els:
        lhs = eval_section(J, log_c, act(WS1, el.sigma, y))
        rhs = el.section_phase([1], [1], k) * eval_section(J, log_c, y)
        assert abs(lhs - rhs) < 1e-10 * abs(rhs)


# ---------------------------------------------------------------------------
# locus distance and sampling
# ---------------------------------------------------------------------------

def test_locus_distance_zero_on_locus():
    assert locus_distance(WS1, X1, [1]) < 1e-9
    assert locus_distance(WS2, X2, [1]) < 1e-9


def test_locus_distance_positive_off_locus():
    x = SpherePoint.from_moduli([0.6, 0.4])
    assert locus_distance(WS1, x, [1]) > 1e-2


def test_locus_distance_monotone_along_ray():
    ds = []
    for s in np.linspace(0.0, 0.2, 6):
        x = SpherePoint.from_moduli([0.5 + s, 0.5 - s])
        ds.append(locus_distance(WS1, x, [1]))
    assert all(ds[i] < ds[i + 1] + 1e-12 for i in range(len(ds) - 1))


def test_locus_distance_action_invariance():
    x = SpherePoint.from_moduli([0.62, 0.38], phases=[0.3, -1.1])
    d0 = locus_distance(WS1, x, [1])
    rng = np.random.default_rng(11)
    for _ in range(5):
        p = rng.uniform(0, 2 * np.pi, 2)
        assert abs(locus_distance(WS1, act(WS1, p, x), [1]) - d0) < 1e-8


def test_locus_distance_infeasible():
    # the fixed block can never vanish: weights strictly positive
    ws = WeightSystem(n=1, W_G=np.array([[1, 1]]), W_T=np.array([[1, 2]]))
    with pytest.raises(InfeasibleLocusError):
        locus_distance(ws, X1, [1])


def test_locus_sample_total_masses():
    w1 = sum(w for _, w in locus_sample(WS1, [1], 16, seed=0))
    assert abs(w1 - np.pi) < 1e-10 * np.pi
    w2 = sum(w for _, w in locus_sample(WS2, [1], 64, seed=0))
    assert abs(w2 - 4 * np.pi**2 / (3 * np.sqrt(3))) < 1e-9
    # positive-dimensional moduli polytope: classical full-simplex case
    ws = level_weight_system(1)
    w3 = sum(w for _, w in locus_sample(ws, [1], 4000, seed=1))
    assert abs(w3 - np.pi) < 1e-3 * np.pi


def test_locus_sample_nodes_on_locus():
    for pt, _ in locus_sample(WS2, [1], 9, seed=2):
        assert locus_distance(WS2, pt, [1]) < 1e-9


def test_locus_sample_bundle_mass():
    w = sum(w for _, w in locus_sample(WS1, [1], 16, seed=0, space="X"))
    assert abs(w - np.pi) < 1e-9  # fiber length cancels the normalization


# ---------------------------------------------------------------------------
# tangent splitting
# ---------------------------------------------------------------------------

def test_tangent_split_reproduces_vertical():
    f = frame_at(X1)
    V = infinitesimal_action(WS1, np.array([1.0, 0.0]), f)
    Vh, Vv, Vt = tangent_split(WS1, f, V)
    assert np.max(np.abs(Vv - V)) < 1e-10
    assert np.max(np.abs(Vh)) < 1e-10 and np.max(np.abs(Vt)) < 1e-10


def test_tangent_split_transversal_is_J_of_vertical():
    f = frame_at(X1)
    V = infinitesimal_action(WS1, np.array([1.0, 0.0]), f)
    W = apply_J(f, V)
    Wh, Wv, Wt = tangent_split(WS1, f, W)
    assert np.max(np.abs(Wt - W)) < 1e-10


def test_tangent_split_pythagoras():
    f = frame_at(X2)
    rng = np.random.default_rng(12)
    for _ in range(10):
        V = rng.standard_normal(4)
        Vh, Vv, Vt = tangent_split(WS2, f, V)
        assert np.max(np.abs(Vh + Vv + Vt - V)) < 1e-10
        total = np.sum(Vh**2) + np.sum(Vv**2) + np.sum(Vt**2)
        assert abs(total - np.sum(V**2)) < 1e-10


def test_locus_center_is_on_locus():
    x = locus_center(WS1, [1])
    assert locus_distance(WS1, x, [1]) < 1e-9
    assert np.allclose(np.abs(x.z) ** 2, [0.5, 0.5], atol=1e-9)
