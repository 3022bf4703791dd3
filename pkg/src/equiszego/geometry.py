"""Point and tangent model for the unit sphere bundle over projective space.

The ambient space is C^{n+1}; X is the unit sphere S^{2n+1} fibering over
projective n-space M by the diagonal circle action.  All pairings use the
Kaehler normalization in which the symplectic form integrates to pi over a
projective line, equivalently omega = (i/2) d d-bar log ||Z||^2.  At a chart
origin this reduces to the standard structure of C^n:

    <a, b> = sum_i conj(a_i) b_i,   g(a, b) = Re<a, b>,
    omega(a, b) = Im<a, b>,         J v = i v,   g(. , .) = omega(. , J .).

Sign convention: omega(a, b) = +Im<a, b> (first slot conjugated).  This is
the unique choice compatible with g = omega(., J.) and positivity of
omega(v, Jv); it is pinned down by the kernel phase tests (loop-phase probe
and fiber-rotation equivariance), and it makes every Gaussian exponent in
the asymptotics module have nonpositive real part.

With this normalization the round metric of S^{2n+1} coincides with
alpha (x) alpha + pi^* g, so spherical geodesic distance doubles as the
distance on X and arccos|<x,y>| as the base distance.
"""

from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-12


def _as_complex_vector(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.ndim != 1:
        raise ValueError(f"expected a 1-d complex vector, got shape {z.shape}")
    return z


@dataclass(frozen=True)
class SpherePoint:
    """A point of the unit sphere X in C^{n+1}."""

    z: np.ndarray

    def __post_init__(self):
        z = _as_complex_vector(self.z)
        nrm = np.linalg.norm(z)
        if abs(nrm - 1.0) > 1e-9:
            raise ValueError(f"not a unit vector: ||z|| = {nrm!r}")
        # renormalize residual float error so invariants hold to 1e-12
        object.__setattr__(self, "z", z / nrm)

    @property
    def n(self) -> int:
        """Projective dimension (ambient dimension minus one)."""
        return self.z.shape[0] - 1

    @staticmethod
    def from_moduli(r, phases=None) -> "SpherePoint":
        """Build the point with |z_i|^2 = r_i / sum(r) and given phases."""
        r = np.asarray(r, dtype=float)
        if np.any(r < -1e-15):
            raise ValueError("moduli-squared must be nonnegative")
        r = np.clip(r, 0.0, None)
        if phases is None:
            phases = np.zeros_like(r)
        z = np.sqrt(r / r.sum()) * np.exp(1j * np.asarray(phases, dtype=float))
        return SpherePoint(z)


@dataclass(frozen=True)
class AdaptedFrame:
    """A sphere point with a unitary basis of its Hermitian orthocomplement."""

    x: SpherePoint
    e: np.ndarray  # shape (n, n+1); rows are the frame vectors

    def __post_init__(self):
        e = np.asarray(self.e, dtype=complex)
        n = self.x.n
        if e.shape != (n, n + 1):
            raise ValueError(f"frame must have shape {(n, n + 1)}, got {e.shape}")
        gram = e @ e.conj().T
        if not np.allclose(gram, np.eye(n), atol=NORM_TOL * 10):
            raise ValueError("frame rows are not orthonormal")
        if np.max(np.abs(e @ self.x.z.conj())) > NORM_TOL * 10:
            raise ValueError("frame rows are not orthogonal to the base point")
        object.__setattr__(self, "e", e)

    @property
    def n(self) -> int:
        return self.x.n


@dataclass(frozen=True)
class TangentVectorX:
    """Tangent data (theta, v) at a sphere point: fiber angle plus base
    displacement in frame coordinates C^n."""

    theta: float
    v: np.ndarray

    def __post_init__(self):
        v = _as_complex_vector(self.v)
        if not np.all(np.isfinite(v.view(float))) or not np.isfinite(self.theta):
            raise ValueError("tangent data must be finite")
        object.__setattr__(self, "v", v)


def frame_at(x: SpherePoint) -> AdaptedFrame:
    """Deterministic adapted frame at x.

    Drops the coordinate axis carrying the largest |x_i| (lowest index on
    ties), then Gram-Schmidts the remaining axes against x.  Two calls on
    identical input return bit-identical output.
    """
    z = x.z
    n = x.n
    drop = int(np.argmax(np.abs(z)))  # argmax takes the first maximizer
    rows = []
    basis = [z]
    for i in range(n + 1):
        if i == drop:
            continue
        v = np.zeros(n + 1, dtype=complex)
        v[i] = 1.0
        for b in basis:
            v = v - (b.conj() @ v) * b
        nrm = np.linalg.norm(v)
        v = v / nrm
        basis.append(v)
        rows.append(v)
    return AdaptedFrame(x=x, e=np.array(rows))


def hlc_point(f: AdaptedFrame, theta: float, v) -> SpherePoint:
    """Chart point e^{i theta} (x + sum_j v_j e_j) / || x + sum_j v_j e_j ||.

    Normalized-affine chart: agrees with adapted (Heisenberg-type) local
    coordinates through second order at the origin, which is all the
    leading-term comparisons need.  Exact on the fiber: (theta, 0) maps to
    e^{i theta} x.
    """
    v = _as_complex_vector(v)
    if v.shape[0] != f.n:
        raise ValueError(f"base displacement must have length {f.n}")
    if np.linalg.norm(v) >= 1.0:
        raise ValueError("chart radius exceeded: ||v|| must be < 1")
    w = f.x.z + v @ f.e
    w = w / np.linalg.norm(w)
    return SpherePoint(np.exp(1j * theta) * w)


def to_real(v) -> np.ndarray:
    """Frame coordinates C^n -> R^{2n}, block layout [Re v, Im v]."""
    v = _as_complex_vector(v)
    return np.concatenate([v.real, v.imag])


def to_complex(V) -> np.ndarray:
    """Inverse of :func:`to_real`."""
    V = np.asarray(V, dtype=float)
    if V.ndim != 1 or V.shape[0] % 2:
        raise ValueError("expected a real vector of even length")
    n = V.shape[0] // 2
    return V[:n] + 1j * V[n:]


def tangent_pairing(f: AdaptedFrame, V1, V2) -> tuple[float, float]:
    """Riemannian and symplectic pairings at the chart origin.

    Arguments are real 2n-vectors in frame coordinates.  Returns
    (g, omega) = (Re<a,b>, Im<a,b>) for the corresponding complex vectors.
    """
    a = to_complex(V1)
    b = to_complex(V2)
    if a.shape[0] != f.n or b.shape[0] != f.n:
        raise ValueError("tangent vectors must match the frame dimension")
    h = np.vdot(a, b)  # vdot conjugates the first argument
    return float(h.real), float(h.imag)


def apply_J(f: AdaptedFrame, V) -> np.ndarray:
    """Complex structure (multiplication by i) on real frame coordinates."""
    a = to_complex(V)
    if a.shape[0] != f.n:
        raise ValueError("tangent vector must match the frame dimension")
    return to_real(1j * a)


def dist_proj(x: SpherePoint, y: SpherePoint) -> float:
    """Geodesic distance between the base points [x], [y]: arccos|<x,y>|."""
    ip = np.abs(np.vdot(x.z, y.z))
    return float(np.arccos(np.clip(ip, 0.0, 1.0)))


def dist_sphere(x: SpherePoint, y: SpherePoint) -> float:
    """Geodesic distance on X itself: arccos Re<x,y>."""
    ip = np.vdot(x.z, y.z).real
    return float(np.arccos(np.clip(ip, -1.0, 1.0)))
