"""Monomial bases of the joint isotypes.

A monomial z^J lies in the (nu_G, k nu_T) isotype exactly when the integer
system  W_G J = nu_G,  W_T J = k nu_T,  J >= 0  holds.  The positivity
invariant of the weight system (0 outside the hull of the T-columns) makes
the solution set finite and yields per-coordinate enumeration bounds through
a strictly positive functional.

All constraint arithmetic is exact (Python integers); floating point enters
only through the log-domain normalization coefficients.
"""

import math
from dataclasses import dataclass

import numpy as np

from .actions import WeightSystem


@dataclass(frozen=True)
class ExponentVector:
    """A monomial exponent J >= 0 with its total degree."""

    J: tuple

    def __post_init__(self):
        if any(j < 0 for j in self.J):
            raise ValueError("exponents must be nonnegative")

    @property
    def degree(self) -> int:
        return sum(self.J)


def log_coefficient(J, n: int) -> float:
    """log of (|J|+n)! / (pi^n J!), the squared normalization of the
    monomial section z^J on the sphere bundle."""
    J = tuple(int(j) for j in J)
    total = sum(J)
    return (
        math.lgamma(total + n + 1)
        - n * math.log(math.pi)
        - sum(math.lgamma(j + 1) for j in J)
    )


def _coordinate_bounds(ws: WeightSystem, target_T) -> list[int]:
    """Rigorous per-coordinate caps: phi^T W_T J = phi . target with
    phi . column_i >= gap_i > 0 forces J_i <= (phi . target) / gap_i."""
    phi = ws.positive_functional
    gaps = phi @ ws.W_T
    budget = float(phi @ np.asarray(target_T, dtype=float))
    if budget < -1e-9:
        return [-1] * (ws.n + 1)  # infeasible
    return [int(math.floor(budget / g + 1e-9)) for g in gaps]


def _solve_tail(cols, residual, caps):
    """All exact nonnegative integer solutions on the last <= 2 coordinates.

    cols: list of integer weight columns (length-d tuples) for the unknowns;
    residual: remaining integer target; caps: per-unknown upper bounds.
    Returns a list of tuples.
    """
    m = len(cols)
    if m == 0:
        return [()] if all(r == 0 for r in residual) else []
    if m == 1:
        (col,) = cols
        val = None
        for w, r in zip(col, residual):
            if w == 0:
                if r != 0:
                    return []
            else:
                if r % w != 0:
                    return []
                cand = r // w
                if val is None:
                    val = cand
                elif cand != val:
                    return []
        if val is None or val < 0 or val > caps[0]:
            return []
        return [(val,)]
    # m == 2: find an invertible 2x2 minor
    d = len(residual)
    for i in range(d):
        for j in range(i + 1, d):
            det = cols[0][i] * cols[1][j] - cols[0][j] * cols[1][i]
            if det == 0:
                continue
            num_a = residual[i] * cols[1][j] - residual[j] * cols[1][i]
            num_b = cols[0][i] * residual[j] - cols[0][j] * residual[i]
            if num_a % det or num_b % det:
                return []
            a, b = num_a // det, num_b // det
            if a < 0 or b < 0 or a > caps[0] or b > caps[1]:
                return []
            for w0, w1, r in zip(cols[0], cols[1], residual):
                if w0 * a + w1 * b != r:
                    return []
            return [(a, b)]
    # all 2x2 minors vanish (rows parallel on the unknowns): reduce to one
    # row and verify the rest.  The common case (one strictly positive row,
    # bounded data) is vectorized; anything else falls back to the loop.
    pivot = next(
        (row for row in zip(*[c for c in cols]) if row[0] != 0 and row[1] != 0),
        None,
    )
    data_bound = max(
        caps[0], caps[1], *(abs(r) for r in residual),
        *(abs(w) for c in cols for w in c), 1,
    )
    small = data_bound < 2**30
    if pivot is not None and small:
        d = len(residual)
        ridx = next(
            i for i in range(d) if cols[0][i] == pivot[0] and cols[1][i] == pivot[1]
        )
        w0, w1, r = pivot[0], pivot[1], residual[ridx]
        a = np.arange(caps[0] + 1, dtype=np.int64)
        rem = r - w0 * a
        ok = rem % w1 == 0
        b = np.where(ok, rem // w1, -1)
        ok &= (b >= 0) & (b <= caps[1])
        a, b = a[ok], b[ok]
        if a.size == 0:
            return []
        C = np.array([cols[0], cols[1]], dtype=np.int64)  # (2, d)
        lhs = a[:, None] * C[0][None, :] + b[:, None] * C[1][None, :]
        good = np.all(lhs == np.asarray(residual, dtype=np.int64)[None, :], axis=1)
        return [(int(x), int(y)) for x, y in zip(a[good], b[good])]
    out = []
    for a in range(caps[0] + 1):
        res2 = tuple(r - a * w for r, w in zip(residual, cols[0]))
        for (b,) in _solve_tail(cols[1:], res2, caps[1:]):
            out.append((a, b))
    return out


def enumerate_isotype(ws: WeightSystem, nu_G, nu_T, k: int) -> list[ExponentVector]:
    """All exponent vectors of the (nu_G, k nu_T) isotype, in lexicographic
    order, by bounded depth-first enumeration with exact integer arithmetic."""
    nu_G = tuple(int(v) for v in np.atleast_1d(nu_G)) if ws.d_G else ()
    nu_T = tuple(int(v) for v in np.atleast_1d(nu_T))
    if len(nu_G) != ws.d_G or len(nu_T) != ws.d_T:
        raise ValueError("character lengths must match the weight system")
    target = nu_G + tuple(k * v for v in nu_T)
    target_T = target[ws.d_G:]
    caps = _coordinate_bounds(ws, target_T)
    if any(c < 0 for c in caps):
        return []
    cols = [tuple(int(w) for w in ws.W_P[:, i]) for i in range(ws.n + 1)]
    phi = ws.positive_functional
    gaps = (phi @ ws.W_T).tolist()

    solutions = []

    def dfs(i, prefix, residual):
        remaining = ws.n + 1 - i
        if remaining <= 2:
            for tail in _solve_tail(cols[i:], residual, caps[i:]):
                solutions.append(prefix + tail)
            return
        # positivity budget on the T-block residual
        budget = float(np.dot(phi, residual[ws.d_G:]))
        if budget < -1e-9:
            return
        cap_i = min(caps[i], int(math.floor(budget / gaps[i] + 1e-9)))
        for v in range(cap_i + 1):
            res2 = tuple(r - v * w for r, w in zip(residual, cols[i]))
            dfs(i + 1, prefix + (v,), res2)

    dfs(0, (), target)
    solutions.sort()
    return [ExponentVector(J) for J in solutions]


@dataclass(frozen=True)
class IsotypeBasis:
    """Orthonormal monomial basis of one joint isotype.

    entries: list of (J tuple, log_c) sorted lexicographically by J, where
    log_c is the log of the squared normalization (see log_coefficient).
    """

    ws: WeightSystem
    nu_G: tuple
    nu_T: tuple
    k: int
    entries: tuple

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return self.ws.n

    @property
    def J_matrix(self) -> np.ndarray:
        """(dim, n+1) integer exponent matrix (empty-safe)."""
        if not self.entries:
            return np.zeros((0, self.ws.n + 1), dtype=np.int64)
        return np.array([e[0] for e in self.entries], dtype=np.int64)

    @property
    def log_c(self) -> np.ndarray:
        return np.array([e[1] for e in self.entries], dtype=float)

    def dump_lines(self):
        """One line per entry, 'J... log_c' (the documented dump format)."""
        return [
            " ".join(str(j) for j in J) + f" {lc:.17g}" for J, lc in self.entries
        ]


def build_basis(ws: WeightSystem, nu_G, nu_T, k: int) -> IsotypeBasis:
    """Enumerate the isotype and attach normalization coefficients."""
    exps = enumerate_isotype(ws, nu_G, nu_T, k)
    if exps:
        from scipy.special import gammaln

        J = np.array([e.J for e in exps], dtype=np.int64)
        log_cs = (
            gammaln(J.sum(axis=1) + ws.n + 1)
            - ws.n * math.log(math.pi)
            - gammaln(J + 1).sum(axis=1)
        )
        entries = tuple(
            (e.J, float(lc)) for e, lc in zip(exps, log_cs)
        )
    else:
        entries = ()
    return IsotypeBasis(
        ws=ws,
        nu_G=tuple(int(v) for v in np.atleast_1d(nu_G)) if ws.d_G else (),
        nu_T=tuple(int(v) for v in np.atleast_1d(nu_T)),
        k=int(k),
        entries=entries,
    )


def dim_isotype(ws: WeightSystem, nu_G, nu_T, k: int) -> int:
    return len(enumerate_isotype(ws, nu_G, nu_T, k))


def eval_section(J, log_c: float, x) -> complex:
    """Value of the normalized monomial section at a sphere point, computed
    with log-magnitude / phase separation (stable for |J| up to ~1e4)."""
    z = np.asarray(getattr(x, "z", x), dtype=complex)
    J = np.asarray(J, dtype=np.int64)
    mods = np.abs(z)
    zero = (mods == 0.0) & (J > 0)
    if np.any(zero):
        return 0.0
    logmag = 0.5 * log_c + float(
        np.sum(np.where(J > 0, J * np.log(np.where(mods > 0, mods, 1.0)), 0.0))
    )
    phase = float(np.sum(J * np.angle(np.where(mods > 0, z, 1.0))))
    return complex(np.exp(logmag) * np.exp(1j * phase))
