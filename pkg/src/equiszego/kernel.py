"""Exact (to floating precision) evaluation of equivariant projector kernels.

The kernel of one joint isotype is the monomial sum

    K(x, y) = sum_J c_J x^J conj(y)^J,

summed in the log domain with a single max-extraction: the diagonal is a sum
of positive terms (no cancellation) and off-diagonal phase spread is benign
at the scales exercised here.  Bases up to ~1e6 entries and degrees up to
~1e4 stay finite in double precision.
"""

import warnings

import numpy as np
from scipy.special import gammaln, logsumexp

from .geometry import AdaptedFrame, SpherePoint, TangentVectorX, hlc_point
from .hardy import IsotypeBasis

_LOG_FLOOR = -1e30


def _log_moduli(z: np.ndarray) -> np.ndarray:
    mods = np.abs(z)
    return np.where(mods > 0.0, np.log(np.where(mods > 0.0, mods, 1.0)), _LOG_FLOOR)


def _term_logs(b: IsotypeBasis, z: np.ndarray) -> np.ndarray:
    """Per-entry log |x^J| + log_c/2 contribution of one argument; entries
    hitting a zero coordinate with positive exponent get the log floor."""
    J = b.J_matrix
    logs = J @ _log_moduli(z)
    return np.maximum(logs, _LOG_FLOOR)


def szego_eval(b: IsotypeBasis, x: SpherePoint, y: SpherePoint) -> complex:
    """Kernel value K(x, y) of the isotype projector."""
    if b.dim == 0:
        return 0.0
    J = b.J_matrix
    logmag = b.log_c + _term_logs(b, x.z) + _term_logs(b, y.z)
    phase = J @ (np.angle(x.z) - np.angle(y.z))
    top = float(np.max(logmag))
    if top <= _LOG_FLOOR / 2:
        return 0.0
    s = np.sum(np.exp(logmag - top) * np.exp(1j * phase))
    return complex(np.exp(top) * s)


def szego_eval_batch(b: IsotypeBasis, x: SpherePoint, W: np.ndarray) -> np.ndarray:
    """K(x, w) for every row w of W (shape (S, n+1)); used by quadratures."""
    if b.dim == 0:
        return np.zeros(W.shape[0], dtype=complex)
    J = b.J_matrix
    base = b.log_c + _term_logs(b, x.z)  # (N,)
    logW = np.where(np.abs(W) > 0, np.log(np.maximum(np.abs(W), 1e-300)), _LOG_FLOOR)
    logmag = base[None, :] + logW @ J.T  # (S, N)
    phase = (np.angle(x.z) @ J.T)[None, :] - np.angle(W) @ J.T
    top = np.max(logmag, axis=1, keepdims=True)
    vals = np.sum(np.exp(logmag - top) * np.exp(1j * phase), axis=1)
    return np.exp(top[:, 0]) * vals


def log_szego_diag(b: IsotypeBasis, x: SpherePoint) -> float:
    """log K(x, x); -inf when the kernel vanishes at x."""
    if b.dim == 0:
        return -np.inf
    J = b.J_matrix
    logs = b.log_c + 2.0 * (J @ _log_moduli(x.z))
    out = float(logsumexp(logs))
    return -np.inf if out <= _LOG_FLOOR / 2 else out


def szego_diag(b: IsotypeBasis, x: SpherePoint) -> float:
    """Diagonal kernel value; nonnegative by construction."""
    val = log_szego_diag(b, x)
    return 0.0 if val == -np.inf else float(np.exp(val))


def szego_rescaled(
    b: IsotypeBasis,
    f: AdaptedFrame,
    u1: TangentVectorX,
    u2: TangentVectorX,
    k: int,
    window_constant: float = 2.5,
) -> complex:
    """Kernel at the sqrt(k)-rescaled chart points around the frame center.

    Displacements beyond the k^{1/9} comparison window trigger a warning
    (the asymptotic statements are only claimed inside it); the chart radius
    itself is still enforced by the chart map.
    """
    sk = np.sqrt(float(k))
    for u in (u1, u2):
        if np.linalg.norm(u.v) > window_constant * float(k) ** (1.0 / 9.0):
            warnings.warn(
                "displacement exceeds the k^(1/9) comparison window",
                stacklevel=2,
            )
    p1 = hlc_point(f, u1.theta / sk, u1.v / sk)
    p2 = hlc_point(f, u2.theta / sk, u2.v / sk)
    return szego_eval(b, p1, p2)


def level_kernel_closed(n: int, k: int, x: SpherePoint, y: SpherePoint) -> complex:
    """Closed form of the full level-k kernel on projective n-space:
    ((k+n)!/(pi^n k!)) <x,y>^k with <x,y> = sum_i x_i conj(y_i).

    Equals the full-degree monomial sum by the multinomial theorem; used as
    an independent oracle for the summation path.
    """
    u = complex(np.sum(x.z * np.conj(y.z)))
    logc = gammaln(k + n + 1) - gammaln(k + 1) - n * np.log(np.pi)
    if u == 0:
        return 0.0 if k >= 1 else complex(np.exp(logc))
    return complex(np.exp(logc + k * np.log(abs(u))) * np.exp(1j * k * np.angle(u)))
