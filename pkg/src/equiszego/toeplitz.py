"""Equivariant Berezin-Toeplitz operators on one isotype.

The operator compresses multiplication by a bounded function f to the
isotype: its matrix in the monomial basis is M[i,j] = <f s_j, s_i> (so that
f == 1 gives the identity).  Two assembly routes are kept and compared:

* Monte Carlo over the sphere with the bundle volume normalization, for
  arbitrary f;
* closed-form monomial sphere moments ("Dirichlet route") when f is a
  polynomial in the moduli-squared r_i = |z_i|^2, in which case the matrix
  is exactly diagonal by phase-integral orthogonality.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .actions import WeightSystem, moment, script_D
from .asymptotics import (
    LocusData,
    diag_k_exponent,
    locus_data,
    near_diag_k_exponent,
)
from .errors import ConfigError
from .geometry import AdaptedFrame, SpherePoint, frame_at, to_complex
from .hardy import IsotypeBasis
from .kernel import szego_eval_batch


# ---------------------------------------------------------------------------
# observables: polynomials in the moduli-squared
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialPolynomial:
    """f = sum of c * prod_i r_i^{alpha_i} with integer exponents alpha."""

    terms: tuple  # ((coeff, alpha-tuple), ...)

    def __call__(self, z: np.ndarray) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        r = np.abs(z) ** 2
        r = r / r.sum(axis=1, keepdims=True)
        out = np.zeros(r.shape[0])
        for c, alpha in self.terms:
            out += c * np.prod(r ** np.asarray(alpha, dtype=float), axis=1)
        return out

    def value_at(self, x: SpherePoint) -> float:
        return float(self(x.z[None, :])[0])

    @staticmethod
    def constant(c: float, n: int) -> "RadialPolynomial":
        return RadialPolynomial(terms=((float(c), (0,) * (n + 1)),))


def parse_f_spec(spec, n: int) -> RadialPolynomial:
    """Observable from a config entry: {"constant": c} or
    {"radial": [[c, [a_0, ..., a_n]], ...]}."""
    if spec is None:
        return RadialPolynomial.constant(1.0, n)
    if isinstance(spec, (int, float)):
        return RadialPolynomial.constant(float(spec), n)
    if isinstance(spec, dict) and "constant" in spec:
        return RadialPolynomial.constant(float(spec["constant"]), n)
    if isinstance(spec, dict) and "radial" in spec:
        terms = []
        for item in spec["radial"]:
            c, alpha = item
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != n + 1 or any(a < 0 for a in alpha):
                raise ConfigError(f"bad radial exponent vector {alpha}")
            terms.append((float(c), alpha))
        return RadialPolynomial(terms=tuple(terms))
    raise ConfigError(f"unrecognized observable spec: {spec!r}")


@dataclass(frozen=True)
class QuadratureSpec:
    """How to assemble operator entries: 'dirichlet' (closed-form, radial f
    only), 'mc', or 'auto' (closed form when available)."""

    method: str = "auto"
    samples: int = 10**6
    seed: int = 0


# ---------------------------------------------------------------------------
# sections sampled on the sphere
# ---------------------------------------------------------------------------

def section_values(b: IsotypeBasis, Z: np.ndarray) -> np.ndarray:
    """(S, dim) matrix of section values at the sample rows of Z."""
    J = b.J_matrix
    logZ = np.log(np.maximum(np.abs(Z), 1e-300))
    logmag = 0.5 * b.log_c[None, :] + logZ @ J.T
    phase = np.angle(Z) @ J.T
    return np.exp(logmag) * np.exp(1j * phase)


def _sphere_samples(n: int, samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    w = rng.standard_normal((samples, n + 1)) + 1j * rng.standard_normal((samples, n + 1))
    return w / np.linalg.norm(w, axis=1, keepdims=True)


# ---------------------------------------------------------------------------
# matrix, kernel, trace
# ---------------------------------------------------------------------------

def _dirichlet_entry(J, alpha, n: int) -> float:
    """<r^alpha s_J, s_J> = prod_i (J_i+1)..(J_i+alpha_i) /
    ((|J|+n+1)..(|J|+n+|alpha|)), from the closed-form sphere moments."""
    logv = 0.0
    for j, a in zip(J, alpha):
        logv += math.lgamma(j + a + 1) - math.lgamma(j + 1)
    total = sum(J)
    logv += math.lgamma(total + n + 1) - math.lgamma(total + sum(alpha) + n + 1)
    return math.exp(logv)


def toeplitz_matrix(b: IsotypeBasis, f, quad: QuadratureSpec = QuadratureSpec()):
    """Matrix of the compressed multiplication operator in the monomial
    basis; Hermitian by construction.  Returns (matrix, stderr_matrix);
    the error matrix is zero on the closed-form route."""
    dim = b.dim
    if dim == 0:
        return np.zeros((0, 0), dtype=complex), np.zeros((0, 0))
    method = quad.method
    if method == "auto":
        method = "dirichlet" if isinstance(f, RadialPolynomial) else "mc"
    if method == "dirichlet":
        if not isinstance(f, RadialPolynomial):
            raise ConfigError("dirichlet route requires a radial polynomial f")
        diag = np.zeros(dim)
        for i, (J, _) in enumerate(b.entries):
            diag[i] = sum(
                c * _dirichlet_entry(J, alpha, b.n) for c, alpha in f.terms
            )
        return np.diag(diag).astype(complex), np.zeros((dim, dim))
    if method != "mc":
        raise ConfigError(f"unknown quadrature method {quad.method!r}")
    Z = _sphere_samples(b.n, quad.samples, quad.seed)
    V = section_values(b, Z)
    fv = f(Z) if callable(f) else np.full(Z.shape[0], float(f))
    vol = math.pi**b.n / math.factorial(b.n)
    S = quad.samples
    M = vol / S * (V.T @ (fv[:, None] * V.conj()))
    # per-entry spread of the product f s_i conj(s_j) without materializing
    # the (S, dim, dim) tensor: E|.|^2 = E[f^2 |s_i|^2 |s_j|^2]
    A = np.abs(V) ** 2
    second = vol**2 / S * ((fv**2)[:, None] * A).T @ A
    var = np.maximum(second - np.abs(M) ** 2, 0.0)
    err = np.sqrt(var / S)
    M = 0.5 * (M + M.conj().T)
    err = np.abs(0.5 * (err + err.T))
    return M, err


def toeplitz_kernel(
    b: IsotypeBasis,
    f,
    x: SpherePoint,
    y: SpherePoint,
    quad: QuadratureSpec = QuadratureSpec(),
    route: str = "matrix",
) -> complex:
    """Operator kernel at (x, y) by either displayed route.

    route 'matrix':   sum_ij s_i(x) M[j, i] conj(s_j(y));
    route 'integral': Monte Carlo of K(x, w) f(w) K(w, y) over the sphere.
    Route agreement is a test, not an assumption.
    """
    if b.dim == 0:
        return 0.0
    if route == "matrix":
        M, _ = toeplitz_matrix(b, f, quad)
        u = section_values(b, x.z[None, :])[0]
        v = section_values(b, y.z[None, :])[0]
        return complex(np.vdot(v, M @ u))
    if route == "integral":
        Z = _sphere_samples(b.n, quad.samples, quad.seed)
        kx = szego_eval_batch(b, x, Z)  # K(x, w_s)
        ky = szego_eval_batch(b, y, Z)  # K(y, w_s); K(w, y) = conj of it
        fv = f(Z) if callable(f) else np.full(Z.shape[0], float(f))
        vol = math.pi**b.n / math.factorial(b.n)
        return complex(vol * np.mean(kx * fv * ky.conj()))
    raise ConfigError(f"unknown kernel route {route!r}")


def toeplitz_trace(M: np.ndarray) -> float:
    return float(np.trace(M).real)


def trace_prediction(ws: WeightSystem, f, nu_G, nu_T, quadrature) -> tuple[float, float]:
    """Limit constant of (pi/(||nu_T|| k))^{d_M-d_P+1} tr T[f]:

        (d_nu^2/(2 pi)^{d_T-1}) *
        integral over the bundle locus of f ||Phi_T||^{-(d_M+2-d_P)} / D.

    For invariant f the bundle-locus integral against the bundle volume
    equals the base-locus integral (unit-length fibers after the 1/(2 pi)
    normalization), so base quadrature nodes are used directly.  Returns
    (value, quadrature error bar).
    """
    d_M, d_P, d_T = ws.n, ws.d_P, ws.d_T
    vals = []
    wts = []
    for pt, w in quadrature:
        fr = frame_at(pt)
        md = moment(ws, pt)
        phi = float(np.linalg.norm(md.phi_T))
        fv = f.value_at(pt) if isinstance(f, RadialPolynomial) else float(f(pt.z[None, :])[0])
        vals.append(fv * phi ** (-(d_M + 2 - d_P)) / script_D(ws, fr))
        wts.append(w)
    vals = np.asarray(vals)
    wts = np.asarray(wts)
    pref = 1.0 / (2.0 * np.pi) ** (d_T - 1)
    est = pref * float(wts @ vals)
    if len(vals) > 1:
        err = pref * float(np.std(vals, ddof=1) / np.sqrt(len(vals)) * wts.sum())
    else:
        err = 0.0
    return est, err


def toeplitz_near_diagonal_leading(
    ws: WeightSystem,
    f,
    nu_G,
    nu_T,
    k: int,
    n1,
    frame: AdaptedFrame,
    ld: LocusData | None = None,
) -> float:
    """Predicted near-diagonal operator kernel value at displacement n1
    (real 2n vector normal to the orbit) from a locus point:

        pref * (k ||nu||/pi)^{d_M - d_P/2 + 1/2} f(m) e^{-2 lambda ||t1||^2}

    with t1 the transversal part of n1.  The statement assumes a trivial
    stabilizer; a nontrivial one only triggers a warning here.
    """
    ld = ld if ld is not None else locus_data(ws, frame, nu_T)
    if len(ld.stab) > 1:
        warnings.warn(
            f"stabilizer has order {len(ld.stab)} > 1; the near-diagonal "
            "operator law assumes it is trivial",
            stacklevel=2,
        )
    n1 = np.asarray(n1, dtype=float)
    t1 = ld.Q_N @ (ld.Q_N.T @ n1)
    fm = f.value_at(frame.x) if isinstance(f, RadialPolynomial) else float(f(frame.x.z[None, :])[0])
    d_M, d_P, d_G, d_T = ws.n, ws.d_P, ws.d_G, ws.d_T
    e = near_diag_k_exponent(d_M, d_P)
    pref = (
        2.0 ** (d_G / 2.0)
        / (np.sqrt(2.0) * np.pi) ** (d_T - 1)
        * (float(np.linalg.norm(ld.nu_T)) / np.pi) ** e
        / (ld.D * ld.phi_T_norm ** (d_M + 1.0 + (1.0 - d_P) / 2.0))
    )
    return float(pref * float(k) ** e * fm * np.exp(-2.0 * ld.lam * float(t1 @ t1)))
