"""Torus actions on the sphere bundle from integer weight matrices.

A weight system assigns to each ambient coordinate a column of integer
weights for two commuting torus actions (a "G" block held fixed at a single
character and a "T" block scaled to infinity).  The sign convention is

    z_i  |->  exp(-i <w_i, p>) z_i,

i.e. weight w acts as lambda^{-w}, which makes the moment maps weighted
averages of |z_i|^2 with positive coefficients for positive weights.

This module provides the moment maps, the concentration locus and distances
to it, finite stabilizers (via Smith normal form), the Gram invariant of the
kernel evaluation map, the eta direction, and the vertical / transversal /
horizontal splitting of tangent vectors along the locus.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog, minimize
from sympy import Matrix, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

from .errors import (
    AssumptionViolation,
    DomainError,
    InfeasibleLocusError,
    TransversalityError,
)
from .geometry import (
    AdaptedFrame,
    SpherePoint,
    apply_J,
    dist_proj,
    frame_at,
    to_complex,
    to_real,
)

MEMBERSHIP_TOL = 1e-9
GRAM_SINGULAR_TOL = 1e-12
_STABILIZER_CAP = 10**6


# ---------------------------------------------------------------------------
# weight systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightSystem:
    """Integer weight matrices for the two commuting torus actions."""

    n: int
    W_G: np.ndarray  # shape (d_G, n+1), d_G may be 0
    W_T: np.ndarray  # shape (d_T, n+1)

    def __post_init__(self):
        W_G = np.atleast_2d(np.asarray(self.W_G, dtype=np.int64))
        W_T = np.atleast_2d(np.asarray(self.W_T, dtype=np.int64))
        if W_G.size == 0:
            W_G = W_G.reshape(0, self.n + 1)
        if W_G.shape[1] != self.n + 1 or W_T.shape[1] != self.n + 1:
            raise ValueError("weight matrices must have n+1 columns")
        object.__setattr__(self, "W_G", W_G)
        object.__setattr__(self, "W_T", W_T)
        # positivity: 0 must not lie in the convex hull of the W_T columns,
        # equivalently some functional phi has phi . w_i >= 1 for every column.
        phi = _positive_functional(W_T)
        if phi is None:
            raise AssumptionViolation(
                "0 lies in the convex hull of the T-weight columns; "
                "torus isotypes would be infinite-dimensional"
            )
        object.__setattr__(self, "_phi_positive", phi)

    @property
    def d_G(self) -> int:
        return self.W_G.shape[0]

    @property
    def d_T(self) -> int:
        return self.W_T.shape[0]

    @property
    def d_P(self) -> int:
        return self.d_G + self.d_T

    @property
    def W_P(self) -> np.ndarray:
        """Stacked (d_P, n+1) weight matrix of the product torus."""
        return np.vstack([self.W_G, self.W_T])

    @property
    def positive_functional(self) -> np.ndarray:
        """phi with phi^T W_T >= 1 componentwise (exists by construction)."""
        return self._phi_positive


def _positive_functional(W_T: np.ndarray):
    """Find phi with phi . (column i) >= 1 for all i, or None."""
    d_T, m = W_T.shape
    # minimize 0 subject to -W_T^T phi <= -1
    res = linprog(
        c=np.zeros(d_T),
        A_ub=-W_T.T.astype(float),
        b_ub=-np.ones(m),
        bounds=[(None, None)] * d_T,
        method="highs",
    )
    if not res.success:
        return None
    return res.x


# ---------------------------------------------------------------------------
# action and moment map
# ---------------------------------------------------------------------------

def act(ws: WeightSystem, p, x: SpherePoint) -> SpherePoint:
    """Act by the product-torus element with angle vector p (length d_P)."""
    p = np.asarray(p, dtype=float)
    if p.shape != (ws.d_P,):
        raise ValueError(f"expected {ws.d_P} angles, got shape {p.shape}")
    phases = np.exp(-1j * (p @ ws.W_P))
    return SpherePoint(phases * x.z)


@dataclass
class MomentData:
    """Moment map values at a point, with optional locus data attached."""

    phi_G: np.ndarray
    phi_T: np.ndarray
    phi_P: np.ndarray
    ker_basis: np.ndarray | None = None  # (d_P-1, d_P), orthonormal rows
    eta: np.ndarray | None = None        # unit vector in R^{d_P}
    script_D: float | None = None


def moment(ws: WeightSystem, x: SpherePoint) -> MomentData:
    """Moment map blocks Phi_G, Phi_T and their concatenation Phi_P."""
    r = np.abs(x.z) ** 2
    r = r / r.sum()
    phi_G = ws.W_G @ r
    phi_T = ws.W_T @ r
    return MomentData(phi_G=phi_G, phi_T=phi_T, phi_P=np.concatenate([phi_G, phi_T]))


def infinitesimal_action(ws: WeightSystem, xi, f: AdaptedFrame) -> np.ndarray:
    """Base component of the induced vector field of xi in frame coordinates.

    Returns the real 2n-vector of d/dt|_0 act(t xi, x) with the full complex
    x-line (fiber and radial directions) projected out.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (ws.d_P,):
        raise ValueError(f"expected a Lie algebra vector of length {ws.d_P}")
    z = f.x.z
    zdot = -1j * (xi @ ws.W_P) * z
    w = zdot - np.vdot(z, zdot) * z
    return to_real(f.e.conj() @ w)


def _val_matrix(ws: WeightSystem, f: AdaptedFrame, directions: np.ndarray) -> np.ndarray:
    """Rows: real 2n evaluation vectors of the given Lie-algebra directions."""
    return np.array([infinitesimal_action(ws, d, f) for d in directions])


# ---------------------------------------------------------------------------
# kernel of the moment map, Gram invariant, eta
# ---------------------------------------------------------------------------

def moment_kernel_basis(ws: WeightSystem, x: SpherePoint) -> np.ndarray:
    """Orthonormal basis (rows) of the hyperplane <Phi_P(m), .> = 0.

    At points where Phi_G = 0 this coincides with g x Ker(Phi_T(m)); at
    general points the hyperplane itself is returned.
    """
    md = moment(ws, x)
    nrm = np.linalg.norm(md.phi_P)
    if nrm < MEMBERSHIP_TOL:
        raise DomainError("Phi_P vanishes; the kernel hyperplane is undefined")
    # complete phi_P/|phi_P| to an orthonormal basis, drop the first vector
    q, _ = np.linalg.qr(
        np.column_stack([md.phi_P / nrm, np.eye(ws.d_P)]), mode="reduced"
    )
    return q[:, 1:ws.d_P].T


def script_D(ws: WeightSystem, f: AdaptedFrame) -> float:
    """Square root of the Gram determinant of the evaluation map on the
    moment kernel (the density correction in every leading term).

    The empty-kernel configuration d_P = 1 returns 1.0 (empty product).
    """
    if ws.d_P == 1:
        return 1.0
    basis = moment_kernel_basis(ws, f.x)
    vals = _val_matrix(ws, f, basis)
    D = vals @ vals.T
    det = float(np.linalg.det(D))
    if det < GRAM_SINGULAR_TOL:
        raise TransversalityError(
            f"evaluation map numerically singular (Gram det = {det:.3e})"
        )
    return float(np.sqrt(det))


def eta_vector(ws: WeightSystem, f: AdaptedFrame):
    """Unit generator of Ker(Phi_P(m))^perp with <eta, Phi_P> = ||Phi_T||,
    and the horizontal/vertical/transversal split of its base vector field.

    Only defined where Phi_G(m) = 0 (so that ||Phi_P|| = ||Phi_T||).
    """
    md = moment(ws, f.x)
    if np.linalg.norm(md.phi_G) > 1e-7 * max(1.0, np.linalg.norm(md.phi_P)):
        raise DomainError(
            f"eta is defined on the locus Phi_G = 0; got Phi_G = {md.phi_G}"
        )
    nrm = np.linalg.norm(md.phi_P)
    if nrm < MEMBERSHIP_TOL:
        raise DomainError("Phi_P vanishes")
    eta = md.phi_P / nrm
    eta_M = infinitesimal_action(ws, eta, f)
    split = tangent_split(ws, f, eta_M)
    return eta, split


# ---------------------------------------------------------------------------
# stabilizers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StabilizerElement:
    """A product-torus element fixing a sphere point.

    sigma holds the d_P angles in [0, 2pi); sigma_turns the same angles as
    exact fractions of a full turn, so character arithmetic can be exact.
    fiber_phase is the angle phi with e^{-ik phi} the T-block contribution
    to the factor by which the element acts on sections of the
    (nu_G, k nu_T) isotype; it pairs the T-angles with nu_T when one is
    supplied to :func:`stabilizer`.
    """

    sigma: np.ndarray
    sigma_turns: tuple = ()
    fiber_phase: float = 0.0
    d_G: int = 0

    def _weight(self, nu_G, nu_T, k: int) -> list:
        return [int(v) for v in np.atleast_1d(nu_G)] + [
            int(k) * int(v) for v in np.atleast_1d(nu_T)
        ]

    def acts_trivially_on(self, nu_G, nu_T, k: int) -> bool:
        """Exact test: does this element fix sections of weight
        (nu_G, k nu_T)?  True iff the pairing is an integer turn count."""
        nu = self._weight(nu_G, nu_T, k)
        total = sum(Fraction(n) * t for n, t in zip(nu, self.sigma_turns))
        return total.denominator == 1

    def section_phase(self, nu_G, nu_T, k: int) -> complex:
        """The unit complex factor by which this element multiplies any
        section of weight (nu_G, k nu_T); read off the character directly."""
        nu = self._weight(nu_G, nu_T, k)
        total = sum(Fraction(n) * t for n, t in zip(nu, self.sigma_turns))
        frac = Fraction(total.numerator % total.denominator, total.denominator)
        if frac == 0:
            return 1.0 + 0.0j
        return complex(np.exp(-2j * np.pi * float(frac)))


def stabilizer(ws: WeightSystem, x: SpherePoint, nu_T=None) -> list[StabilizerElement]:
    """The finite stabilizer of x in the product torus.

    Solves <w_i, sigma> in 2 pi Z for every coordinate i in the support of
    x, via a Smith decomposition of the support-weight matrix.  Raises
    AssumptionViolation when the solution set is infinite (the action is
    not locally free at x).
    """
    supp = np.where(np.abs(x.z) > 1e-12)[0]
    S = ws.W_P.T[supp]  # rows: weight vectors of supported coordinates
    d_P = ws.d_P
    dm = DomainMatrix.from_Matrix(Matrix(S.tolist())).convert_to(ZZ)
    D, U, V = smith_normal_decomp(dm)  # D = U * S * V, with U, V unimodular
    D = np.array(D.to_Matrix().tolist(), dtype=np.int64)
    V = np.array(V.to_Matrix().tolist(), dtype=np.int64)
    diag = [int(D[i, i]) for i in range(min(D.shape))]
    rank = sum(1 for d in diag if d != 0)
    if rank < d_P:
        raise AssumptionViolation(
            "stabilizer is not finite: support-weight matrix has rank "
            f"{rank} < {d_P} (action not locally free at this point)"
        )
    invariants = [abs(d) for d in diag[:d_P]]
    order = int(np.prod(invariants))
    if order > _STABILIZER_CAP:
        raise AssumptionViolation(f"stabilizer order {order} exceeds cap")

    nu_T_arr = None if nu_T is None else np.asarray(nu_T, dtype=float).reshape(-1)
    V_rows = [[int(v) for v in row] for row in V]
    elements = []
    for idx in np.ndindex(*invariants):
        y = [Fraction(t, d) for t, d in zip(idx, invariants)]
        turns = tuple(
            (sum(Fraction(w) * yi for w, yi in zip(row, y))) % 1 for row in V_rows
        )
        sigma = 2.0 * np.pi * np.array([float(t) for t in turns])
        y_check = act(ws, sigma, x)
        if np.max(np.abs(y_check.z - x.z)) > 1e-12:
            raise AssumptionViolation("stabilizer candidate fails to fix x")
        theta_T = sigma[ws.d_G:]
        if nu_T_arr is not None:
            fiber = float(theta_T @ nu_T_arr)
        elif ws.d_T == 1:
            fiber = float(theta_T[0])
        else:
            fiber = 0.0
        elements.append(
            StabilizerElement(
                sigma=sigma, sigma_turns=turns, fiber_phase=fiber, d_G=ws.d_G
            )
        )
    elements.sort(key=lambda el: tuple(np.round(el.sigma, 12)))
    return elements


# ---------------------------------------------------------------------------
# the locus M_{0, nu_T}: membership, distance, sampling
# ---------------------------------------------------------------------------

def _moduli_constraints(ws: WeightSystem, nu_T: np.ndarray):
    """Equality matrix E and rhs for the affine hull of the moduli polytope
    {r >= 0, sum r = 1, W_G r = 0, W_T r || nu_T}, in r-space."""
    m = ws.n + 1
    rows = [np.ones(m)]
    rhs = [1.0]
    for row in ws.W_G:
        rows.append(row.astype(float))
        rhs.append(0.0)
    # directions orthogonal to the ray R+ . nu_T
    nu = nu_T.astype(float)
    nu = nu / np.linalg.norm(nu)
    q, _ = np.linalg.qr(np.column_stack([nu, np.eye(ws.d_T)]), mode="reduced")
    K = q[:, 1:ws.d_T]  # (d_T, d_T-1)
    for col in K.T:
        rows.append(col @ ws.W_T.astype(float))
        rhs.append(0.0)
    return np.array(rows), np.array(rhs)


def _locus_interior_point(ws: WeightSystem, nu_T: np.ndarray):
    """A relative-interior point (r, t) of the moduli polytope, via LP."""
    m = ws.n + 1
    nu = np.asarray(nu_T, dtype=float)
    # variables (r_0..r_n, t, s): maximize the slack s
    c = np.zeros(m + 2)
    c[-1] = -1.0
    A_eq = np.zeros((1 + ws.d_G + ws.d_T, m + 2))
    b_eq = np.zeros(1 + ws.d_G + ws.d_T)
    A_eq[0, :m] = 1.0
    b_eq[0] = 1.0
    A_eq[1:1 + ws.d_G, :m] = ws.W_G
    A_eq[1 + ws.d_G:, :m] = ws.W_T
    A_eq[1 + ws.d_G:, m] = -nu
    A_ub = np.zeros((m + 1, m + 2))
    for i in range(m):
        A_ub[i, i] = -1.0
        A_ub[i, -1] = 1.0
    A_ub[m, m] = -1.0
    A_ub[m, -1] = 1.0
    b_ub = np.zeros(m + 1)
    res = linprog(
        c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
        bounds=[(0, None)] * m + [(0, None), (0, None)],
        method="highs",
    )
    if not res.success:
        raise InfeasibleLocusError("the concentration locus is empty")
    r = res.x[:m]
    t = res.x[m]
    if t <= 1e-12:
        raise InfeasibleLocusError("locus requires t > 0 but only t = 0 is feasible")
    return r, t


def locus_distance(ws: WeightSystem, x: SpherePoint, nu_T) -> float:
    """Base distance from x to the concentration locus of nu_T.

    Projects the moduli vector r = |z|^2 onto the moduli polytope (a QP in
    r), lifts the projection to the sphere point with the phases of x, and
    returns the geodesic base distance to the lift.  Zero (within 1e-9)
    exactly on the locus.
    """
    nu_T = np.asarray(nu_T, dtype=float).reshape(-1)
    if np.allclose(nu_T, 0.0):
        raise ValueError("nu_T must be nonzero")
    m = ws.n + 1
    r_x = np.abs(x.z) ** 2

    E, rhs = _moduli_constraints(ws, nu_T)
    nu_hat = nu_T / np.linalg.norm(nu_T)
    if (
        np.max(np.abs(E @ r_x - rhs)) < 1e-12
        and float(nu_hat @ (ws.W_T @ r_x)) > 1e-12
        and np.all(r_x > -1e-15)
    ):
        return 0.0

    r0, t0 = _locus_interior_point(ws, nu_T)

    def objective(q):
        d = q[:m] - r_x
        return float(d @ d)

    def grad(q):
        g = np.zeros(m + 1)
        g[:m] = 2.0 * (q[:m] - r_x)
        return g

    A_eq = np.zeros((1 + ws.d_G + ws.d_T, m + 1))
    A_eq[0, :m] = 1.0
    A_eq[1:1 + ws.d_G, :m] = ws.W_G
    A_eq[1 + ws.d_G:, :m] = ws.W_T
    A_eq[1 + ws.d_G:, m] = -nu_T
    b_eq = np.zeros(A_eq.shape[0])
    b_eq[0] = 1.0
    res = minimize(
        objective,
        np.concatenate([r0, [t0]]),
        jac=grad,
        method="SLSQP",
        bounds=[(0.0, None)] * m + [(1e-12, None)],
        constraints=[{"type": "eq", "fun": lambda q: A_eq @ q - b_eq,
                      "jac": lambda q: A_eq}],
        options={"maxiter": 500, "ftol": 1e-16},
    )
    if not res.success and res.fun > 1e-18:
        raise InfeasibleLocusError(f"moduli projection failed: {res.message}")
    r_star = np.clip(res.x[:m], 0.0, None)
    r_star = r_star / r_star.sum()
    phases = np.where(np.abs(x.z) > 1e-14, np.angle(x.z), 0.0)
    y = SpherePoint.from_moduli(r_star, phases)
    return dist_proj(x, y)


def _phase_torus_density(ws: WeightSystem, r, U, phases, space: str) -> float:
    """Riemannian density of the locus at moduli r, phase point `phases`,
    with respect to (hull coordinates) x (phase angles).

    U: (n+1, q) orthonormal basis of the moduli-polytope hull directions
    (may have q = 0 columns).  For space "M" one phase angle is gauged away
    and the complex x-line is projected out; for space "X" all support
    phases count and the density carries the global 1/(2 pi) of the volume
    normalization.
    """
    supp = np.where(r > 1e-13)[0]
    z = np.sqrt(r) * np.exp(1j * phases)
    tangents = []
    for a in range(U.shape[1]):
        t = np.zeros_like(z)
        t[supp] = U[supp, a] / (2.0 * np.sqrt(r[supp])) * np.exp(1j * phases[supp])
        tangents.append(t)
    phase_idx = supp if space == "X" else supp[:-1]
    for i in phase_idx:
        t = np.zeros_like(z)
        t[i] = 1j * z[i]
        tangents.append(t)
    if not tangents:
        return 1.0 if space == "M" else 1.0 / (2.0 * np.pi)
    T = np.array(tangents)
    if space == "M":
        T = T - (T @ z.conj())[:, None] * z[None, :]
    G = (T @ T.conj().T).real
    det = float(np.linalg.det(G))
    det = max(det, 0.0)
    dens = float(np.sqrt(det))
    if space == "X":
        dens /= 2.0 * np.pi
    return dens


def locus_sample(ws: WeightSystem, nu_T, count: int, seed: int, space: str = "M"):
    """Quadrature nodes and weights over the concentration locus.

    Returns a list of (SpherePoint, weight) whose weighted sums converge to
    the integral over the locus against the induced Riemannian volume: on
    the base for space "M" (one fiber phase gauged away), on the sphere
    bundle for space "X" (with the volume normalization of the bundle,
    i.e. an overall 1/(2 pi)).

    When the moduli polytope is a single point the rule is an exact product
    grid over the phase torus; a positive-dimensional polytope is handled by
    box-rejection Monte Carlo over its hull coordinates.
    """
    if space not in ("M", "X"):
        raise ValueError("space must be 'M' or 'X'")
    nu_T = np.asarray(nu_T, dtype=float).reshape(-1)
    r_int, _ = _locus_interior_point(ws, nu_T)
    E, rhs = _moduli_constraints(ws, nu_T)

    # forced-zero coordinates shrink the support and the phase torus
    forced_zero = []
    for i in range(ws.n + 1):
        if r_int[i] > 1e-9:
            continue
        c = np.zeros(ws.n + 2)
        c[i] = -1.0
        A_eq = np.zeros((E.shape[0], ws.n + 2))
        A_eq[:, :ws.n + 1] = E
        res = linprog(c, A_eq=A_eq, b_eq=rhs,
                      bounds=[(0, None)] * (ws.n + 1) + [(None, None)],
                      method="highs")
        if res.success and -res.fun < 1e-10:
            forced_zero.append(i)
    free = np.array([i for i in range(ws.n + 1) if i not in forced_zero])

    # hull directions of the moduli polytope within the free coordinates
    E_free = E[:, free]
    _, sv, Vt = np.linalg.svd(E_free)
    rank = int(np.sum(sv > 1e-10 * max(1.0, sv[0] if len(sv) else 1.0)))
    U_free = Vt[rank:].T  # (|free|, q) orthonormal
    q = U_free.shape[1]
    U = np.zeros((ws.n + 1, q))
    U[free] = U_free

    d_s = len(free)
    n_phase = d_s if space == "X" else d_s - 1
    rng = np.random.default_rng(seed)
    nodes = []

    if q == 0:
        r_star = np.zeros(ws.n + 1)
        r_star[free] = np.clip(r_int[free], 0.0, None)
        r_star /= r_star.sum()
        if n_phase <= 0:
            dens = _phase_torus_density(ws, r_star, U, np.zeros(ws.n + 1), space)
            return [(SpherePoint.from_moduli(r_star), dens)]
        m_grid = max(1, int(np.ceil(count ** (1.0 / n_phase))))
        angles = 2.0 * np.pi * np.arange(m_grid) / m_grid
        dens = _phase_torus_density(ws, r_star, U, np.zeros(ws.n + 1), space)
        w = dens * (2.0 * np.pi) ** n_phase / m_grid ** n_phase
        for idx in np.ndindex(*([m_grid] * n_phase)):
            phases = np.zeros(ws.n + 1)
            phases[free[:n_phase]] = angles[list(idx)]
            nodes.append((SpherePoint.from_moduli(r_star, phases), w))
        return nodes

    # positive-dimensional polytope: bounding box in hull coordinates
    lo = np.zeros(q)
    hi = np.zeros(q)
    for a in range(q):
        for sign, out in ((1.0, "lo"), (-1.0, "hi")):
            c = np.zeros(ws.n + 2)
            c[:ws.n + 1] = sign * U[:, a]
            A_eq = np.zeros((E.shape[0], ws.n + 2))
            A_eq[:, :ws.n + 1] = E
            res = linprog(c, A_eq=A_eq, b_eq=rhs,
                          bounds=[(0, None)] * (ws.n + 1) + [(None, None)],
                          method="highs")
            if not res.success:
                raise InfeasibleLocusError("hull bounding box LP failed")
            val = float(U[:, a] @ res.x[:ws.n + 1] - U[:, a] @ r_int)
            if out == "lo":
                lo[a] = val
            else:
                hi[a] = val
    box_vol = float(np.prod(hi - lo))
    nu_hat = nu_T / np.linalg.norm(nu_T)
    total = 0
    while len(nodes) < count and total < 1000 * count:
        s = lo + (hi - lo) * rng.random(q)
        total += 1
        r = r_int + U @ s
        if np.any(r < -1e-12) or float(nu_hat @ (ws.W_T @ r)) <= 1e-12:
            nodes.append(None)
            continue
        r = np.clip(r, 0.0, None)
        phases = np.zeros(ws.n + 1)
        phases[free] = 2.0 * np.pi * rng.random(d_s)
        if space == "M":
            phases[free[-1]] = 0.0
        dens = _phase_torus_density(ws, r, U, phases, space)
        nodes.append((SpherePoint.from_moduli(r, phases), dens))
    kept = [nd for nd in nodes if nd is not None]
    if not kept:
        raise InfeasibleLocusError("no feasible samples found in the polytope box")
    scale = box_vol * (2.0 * np.pi) ** n_phase / len(nodes)
    return [(pt, w * scale) for pt, w in kept]


# ---------------------------------------------------------------------------
# tangent splitting along the locus
# ---------------------------------------------------------------------------

def orbit_splitting_bases(ws: WeightSystem, f: AdaptedFrame):
    """Orthonormal bases (columns) of the vertical space V = val(Ker Phi_P),
    the transversal space N = J(V), and the horizontal complement H."""
    two_n = 2 * ws.n
    if ws.d_P == 1:
        V = np.zeros((two_n, 0))
        return V, V, np.eye(two_n)
    basis = moment_kernel_basis(ws, f.x)
    vals = _val_matrix(ws, f, basis).T  # columns: val vectors in R^{2n}
    Uv, sv, _ = np.linalg.svd(vals, full_matrices=False)
    rank = int(np.sum(sv > 1e-10 * sv[0])) if sv.size else 0
    if rank < basis.shape[0]:
        raise TransversalityError(
            "evaluation map on the moment kernel is not injective"
        )
    Q_V = Uv[:, :rank]
    Q_N = np.column_stack([apply_J(f, Q_V[:, j]) for j in range(rank)])
    # V is isotropic for commuting Hamiltonian actions, so N = J(V) is
    # g-orthogonal to V; verify and clean up residual float error.
    overlap = Q_V.T @ Q_N
    if np.max(np.abs(overlap)) > 1e-8:
        raise TransversalityError("V and J(V) are not orthogonal at this point")
    Q_N = Q_N - Q_V @ overlap
    Q_N, _ = np.linalg.qr(Q_N)
    P = np.eye(two_n) - Q_V @ Q_V.T - Q_N @ Q_N.T
    Uh, sh, _ = np.linalg.svd(P)
    n_h = two_n - 2 * rank
    Q_H = Uh[:, :n_h]
    return Q_V, Q_N, Q_H


def tangent_split(ws: WeightSystem, f: AdaptedFrame, V):
    """Orthogonal decomposition of a real 2n tangent vector into horizontal,
    vertical and transversal parts (V_h, V_v, V_t)."""
    V = np.asarray(V, dtype=float)
    Q_V, Q_N, Q_H = orbit_splitting_bases(ws, f)
    V_v = Q_V @ (Q_V.T @ V)
    V_t = Q_N @ (Q_N.T @ V)
    V_h = V - V_v - V_t
    return V_h, V_v, V_t


def full_moment_data(ws: WeightSystem, f: AdaptedFrame) -> MomentData:
    """Moment data with kernel basis, eta and the Gram invariant filled in
    (requires Phi_G = 0 at the point, i.e. a locus point)."""
    md = moment(ws, f.x)
    md.ker_basis = moment_kernel_basis(ws, f.x) if ws.d_P > 1 else np.zeros((0, 1))
    md.eta, _ = eta_vector(ws, f)
    md.script_D = script_D(ws, f)
    return md


def locus_center(ws: WeightSystem, nu_T) -> SpherePoint:
    """The zero-phase point over the moduli-polytope interior point; for
    single-point polytopes this is the canonical locus representative."""
    r, _ = _locus_interior_point(ws, np.asarray(nu_T, dtype=float).reshape(-1))
    return SpherePoint.from_moduli(np.clip(r, 0.0, None))
