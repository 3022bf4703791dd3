"""Predicted leading terms of the kernel asymptotics and exponent fitting.

The predictions implement the displayed leading expressions verbatim: the
rescaled frequency lambda = ||nu_T|| / ||Phi_T(m)||, the quadratic exponent
H built from the horizontal/vertical/transversal splitting, the diagonal
growth law, its near-diagonal refinement with stabilizer monodromy, and the
dimension constant.

The absolute normalization of the predictions relative to exact kernel
values is deliberately *not* asserted anywhere: the measured ratio is
exposed as a named diagnostic (`amplitude_diagnostic`).  Empirically it is
k-stable and equals (2 pi)^(-d_G) on the worked examples, consistent with a
Haar-normalization factor of the fixed-character torus block; the k-power,
the Gaussian profile and the stabilizer arithmetic are all checked exactly.
"""

from dataclasses import dataclass

import numpy as np

from .actions import (
    MomentData,
    StabilizerElement,
    WeightSystem,
    act,
    eta_vector,
    moment,
    orbit_splitting_bases,
    script_D,
    stabilizer,
)
from .errors import DomainError
from .geometry import (
    AdaptedFrame,
    SpherePoint,
    TangentVectorX,
    frame_at,
    hlc_point,
    to_complex,
    to_real,
)


# ---------------------------------------------------------------------------
# scalar building blocks
# ---------------------------------------------------------------------------

def lambda_nu(ws: WeightSystem, m: SpherePoint, nu_T) -> float:
    """Rescaled frequency ||nu_T|| / ||Phi_T(m)||."""
    md = moment(ws, m)
    nrm = float(np.linalg.norm(md.phi_T))
    if nrm < 1e-12:
        raise DomainError("Phi_T vanishes at this point")
    return float(np.linalg.norm(np.asarray(nu_T, dtype=float))) / nrm


def diag_k_exponent(d_M: int, d_P: int) -> float:
    """Growth exponent d_M + (1 - d_P)/2 of the diagonal law."""
    return d_M + (1.0 - d_P) / 2.0


def near_diag_k_exponent(d_M: int, d_P: int) -> float:
    """Exponent d_M - d_P/2 + 1/2 of the near-diagonal law (identical to
    the diagonal one; both spellings occur and must agree)."""
    return d_M - d_P / 2.0 + 0.5


# ---------------------------------------------------------------------------
# locus data bundle
# ---------------------------------------------------------------------------

@dataclass
class LocusData:
    """Everything the leading terms need at one locus point."""

    ws: WeightSystem
    frame: AdaptedFrame
    nu_T: np.ndarray
    moment: MomentData
    lam: float
    Q_V: np.ndarray
    Q_N: np.ndarray
    Q_H: np.ndarray
    eta: np.ndarray
    eta_M_h: np.ndarray
    eta_M_v: np.ndarray
    eta_M_t: np.ndarray
    D: float
    stab: list[StabilizerElement]

    @property
    def phi_T_norm(self) -> float:
        return float(np.linalg.norm(self.moment.phi_T))


def locus_data(ws: WeightSystem, f: AdaptedFrame, nu_T) -> LocusData:
    nu_T = np.asarray(nu_T, dtype=float).reshape(-1)
    md = moment(ws, f.x)
    Q_V, Q_N, Q_H = orbit_splitting_bases(ws, f)
    eta, (eh, ev, et) = eta_vector(ws, f)
    return LocusData(
        ws=ws,
        frame=f,
        nu_T=nu_T,
        moment=md,
        lam=lambda_nu(ws, f.x, nu_T),
        Q_V=Q_V,
        Q_N=Q_N,
        Q_H=Q_H,
        eta=eta,
        eta_M_h=eh,
        eta_M_v=ev,
        eta_M_t=et,
        D=script_D(ws, f),
        stab=stabilizer(ws, f.x, nu_T=nu_T),
    )


def _split(ld: LocusData, V: np.ndarray):
    V_v = ld.Q_V @ (ld.Q_V.T @ V)
    V_t = ld.Q_N @ (ld.Q_N.T @ V)
    return V - V_v - V_t, V_v, V_t


def _omega(a: np.ndarray, b: np.ndarray) -> float:
    """Symplectic pairing Im<a,b> on real 2n frame coordinates."""
    return float(np.vdot(to_complex(a), to_complex(b)).imag)


# ---------------------------------------------------------------------------
# the quadratic exponent H
# ---------------------------------------------------------------------------

def h_exponent_at(ld: LocusData, u1: TangentVectorX, u2: TangentVectorX) -> complex:
    """The quadratic exponent governing near-diagonal decay and phases.

    With b0 = (theta2 - theta1)/||Phi_T(m)|| and v = v_h + v_v + v_t:

        H = lam * ( i[w(v1v, v1t) - w(v2v, v2t)]
                    + i w(b0 etaMh, v1h + v2h) - i w(v1h, v2h)
                    - ||v1t||^2 - ||v2t||^2
                    - (1/2) ||v1h - b0 etaMh - v2h||^2 ).

    Re H <= 0 always, with equality iff both transversal parts and the
    horizontal Gaussian argument vanish.
    """
    v1 = to_real(u1.v)
    v2 = to_real(u2.v)
    v1h, v1v, v1t = _split(ld, v1)
    v2h, v2v, v2t = _split(ld, v2)
    b0 = (u2.theta - u1.theta) / ld.phi_T_norm
    drift = v1h - b0 * ld.eta_M_h - v2h
    val = (
        1j * (_omega(v1v, v1t) - _omega(v2v, v2t))
        + 1j * b0 * _omega(ld.eta_M_h, v1h + v2h)
        - 1j * _omega(v1h, v2h)
        - float(v1t @ v1t)
        - float(v2t @ v2t)
        - 0.5 * float(drift @ drift)
    )
    return ld.lam * val


def h_exponent(ws: WeightSystem, f: AdaptedFrame, nu_T,
               u1: TangentVectorX, u2: TangentVectorX) -> complex:
    return h_exponent_at(locus_data(ws, f, nu_T), u1, u2)


# ---------------------------------------------------------------------------
# stabilizer monodromy
# ---------------------------------------------------------------------------

def monodromy_matrix(ws: WeightSystem, f: AdaptedFrame, sigma,
                     step: float = 1e-5) -> np.ndarray:
    """Derivative of the action of the torus element `sigma` on base chart
    coordinates at the frame center, as a real (2n, 2n) matrix.

    Central finite differences through the chart, Richardson-extrapolated.
    The element must fix the center (a stabilizer element).
    """
    sigma = np.asarray(sigma, dtype=float)
    x = f.x
    two_n = 2 * ws.n

    def chart_coords(y: SpherePoint) -> np.ndarray:
        denom = np.vdot(x.z, y.z)
        return to_real((f.e.conj() @ y.z) / denom)

    def curve(direction: np.ndarray, h: float) -> np.ndarray:
        y = hlc_point(f, 0.0, to_complex(h * direction))
        return chart_coords(act(ws, sigma, y))

    cols = []
    for j in range(two_n):
        e_j = np.zeros(two_n)
        e_j[j] = 1.0
        d1 = (curve(e_j, step) - curve(e_j, -step)) / (2 * step)
        d2 = (curve(e_j, 2 * step) - curve(e_j, -2 * step)) / (4 * step)
        cols.append((4.0 * d1 - d2) / 3.0)
    return np.array(cols).T


# ---------------------------------------------------------------------------
# leading terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LeadingTerm:
    """A predicted asymptotic value amplitude * k^exponent * stabilizer_factor."""

    amplitude: complex
    k_exponent: float
    stabilizer_factor: complex
    description: str

    def value(self, k: int) -> complex:
        return self.amplitude * float(k) ** self.k_exponent * self.stabilizer_factor


def _common_prefactor(ld: LocusData) -> float:
    """The k-independent scalar shared by the diagonal and near-diagonal
    laws: d_nu 2^{d_G/2} / (sqrt2 pi)^{d_T-1} * (||nu||/pi)^e /
    (D ||Phi_T||^{d_M + 1 + (1-d_P)/2}), with d_nu = 1 for torus blocks."""
    ws = ld.ws
    d_M, d_P, d_G, d_T = ws.n, ws.d_P, ws.d_G, ws.d_T
    e = diag_k_exponent(d_M, d_P)
    d_nu = 1.0  # abelian fixed block: all irreducibles are characters
    return (
        d_nu
        * 2.0 ** (d_G / 2.0)
        / (np.sqrt(2.0) * np.pi) ** (d_T - 1)
        * (float(np.linalg.norm(ld.nu_T)) / np.pi) ** e
        / (ld.D * ld.phi_T_norm ** (d_M + 1.0 + (1.0 - d_P) / 2.0))
    )


def stabilizer_character_sum(ld: LocusData, nu_G, k: int) -> complex:
    """Roots-of-unity factor: sum over the stabilizer of the conjugated
    character of weight (nu_G, k nu_T).

    The stabilizer is a finite abelian group and the summand is a character
    of it, so the sum is exactly |F_x| when the character is trivial and
    exactly 0 otherwise; computed that way (no float roundoff)."""
    nu_T_int = [int(v) for v in ld.nu_T]
    if all(el.acts_trivially_on(nu_G, nu_T_int, k) for el in ld.stab):
        return complex(len(ld.stab))
    return 0.0 + 0.0j


def diagonal_leading(ws: WeightSystem, f: AdaptedFrame, nu_G, nu_T, k: int,
                     ld: LocusData | None = None):
    """Predicted diagonal value at the frame center, as (LeadingTerm, value)."""
    ld = ld if ld is not None else locus_data(ws, f, nu_T)
    term = LeadingTerm(
        amplitude=complex(_common_prefactor(ld)),
        k_exponent=diag_k_exponent(ws.n, ws.d_P),
        stabilizer_factor=stabilizer_character_sum(ld, nu_G, k),
        description="diagonal growth law at a locus point",
    )
    return term, term.value(k)


def near_diagonal_leading(
    ws: WeightSystem,
    f: AdaptedFrame,
    nu_G,
    nu_T,
    k: int,
    u1: TangentVectorX,
    u2: TangentVectorX,
    p0=None,
    ld: LocusData | None = None,
) -> complex:
    """Predicted kernel value at sqrt(k)-rescaled displacements u1, u2 from
    the frame center, the second point optionally translated by the torus
    element p0 (angle vector).

    Sums over the stabilizer with monodromy-rotated first displacements and
    conjugated character twists; includes the fiber phase
    e^{-i sqrt(k) (theta2 - theta1) lambda}.
    """
    ld = ld if ld is not None else locus_data(ws, f, nu_T)
    nu = np.concatenate(
        [np.asarray(nu_G, dtype=float).reshape(-1),
         float(k) * ld.nu_T]
    )
    sigma0 = np.zeros(ws.d_P) if p0 is None else np.asarray(p0, dtype=float)
    v1 = to_real(u1.v)
    total = 0.0 + 0.0j
    for el in ld.stab:
        mono = monodromy_matrix(ws, f, el.sigma) if np.any(np.abs(el.sigma) > 1e-13) \
            else np.eye(2 * ws.n)
        u1j = TangentVectorX(theta=u1.theta, v=to_complex(mono @ v1))
        char = np.exp(-1j * float(nu @ (el.sigma - sigma0)))
        total += char * np.exp(h_exponent_at(ld, u1j, u2))
    fiber = np.exp(-1j * np.sqrt(float(k)) * (u2.theta - u1.theta) * ld.lam)
    pref = _common_prefactor(ld)
    e = near_diag_k_exponent(ws.n, ws.d_P)
    return complex(pref * float(k) ** e * total * fiber)


def amplitude_diagnostic(computed: float, term: LeadingTerm, k: int) -> float:
    """Named normalization diagnostic: exact/predicted amplitude ratio.

    Not asserted to be 1; reported so its k-stability can be checked (the
    worked examples give (2 pi)^(-d_G))."""
    pred = term.value(k)
    if pred == 0:
        return np.nan
    return float(computed / abs(pred))


# ---------------------------------------------------------------------------
# dimension constant and exponent fitting
# ---------------------------------------------------------------------------

def dim_prediction(ws: WeightSystem, nu_G, nu_T, quadrature) -> float:
    """Constant C with  dim ~ C (||nu_T|| k / pi)^{d_M - d_P + 1}:

        C = (d_nu^2 / (2 pi)^{d_T-1}) *
            integral over the locus of ||Phi_T||^{-(d_M+1)+d_P-1} / D.

    `quadrature` is a list of (SpherePoint, weight) base-locus nodes, e.g.
    from locus_sample.  The fixed-character block contributes d_nu = 1.
    """
    d_M, d_P, d_T = ws.n, ws.d_P, ws.d_T
    total = 0.0
    for pt, w in quadrature:
        fr = frame_at(pt)
        md = moment(ws, pt)
        phi = float(np.linalg.norm(md.phi_T))
        total += w * phi ** (-(d_M + 1) + d_P - 1) / script_D(ws, fr)
    return total / (2.0 * np.pi) ** (d_T - 1)


def fit_exponent(series) -> tuple[float, float, float]:
    """Least-squares fit of log|value| against log k.

    Returns (slope, intercept, residual rms).  Requires at least four
    samples with positive modulus.
    """
    pts = [(k, abs(v)) for k, v in series]
    if len(pts) < 4:
        raise ValueError("need at least 4 samples")
    if any(v <= 0 for _, v in pts):
        raise ValueError("values must be nonzero for a log-log fit")
    ks = np.log([float(k) for k, _ in pts])
    ys = np.log([v for _, v in pts])
    A = np.vstack([ks, np.ones_like(ks)]).T
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = ys - A @ coef
    rms = float(np.sqrt(np.mean(resid**2)))
    return float(coef[0]), float(coef[1]), rms
