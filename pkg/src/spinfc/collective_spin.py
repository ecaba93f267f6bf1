"""Symmetric collective-spin (Dicke) basis and rotations about the y axis.

N spin-1/2 nuclei restricted to the fully symmetric sector form a single
angular momentum j = N/2.  Basis states are labeled by the excitation
number m = 0..N, with J_z eigenvalue m - N/2, so index 0 is the bottom of
the ladder.

Convention
----------
Rotations are R_y(theta) = exp(-i * theta * J_y).  The matrix returned by
``wigner_d`` has elements d[n, m] = <n| R_y(theta) |m>, i.e. column m holds
the expansion of the rotated ladder state |theta, m> = R_y(theta)|m> in the
unrotated basis.  ``rotation_oracle`` computes the same matrix by dense
eigendecomposition of J_y and exists only as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

try:
    import gmpy2

    _MPZ = gmpy2.mpz
    _ISQRT = gmpy2.isqrt
except ImportError:  # pragma: no cover - gmpy2 is an optional accelerator
    _MPZ = int
    _ISQRT = math.isqrt

# Dense (N+1)-dimensional matrices; beyond this the quadratic storage and the
# big-integer rotation elements stop being practical on a desktop.
MAX_SPINS = 1000
# Eigendecomposition cross-check is meant for small systems only.
ORACLE_MAX_SPINS = 60

_EPS = np.finfo(float).eps
# Escalate a matrix element to exact arithmetic once the float64 alternating
# sum cannot reach ~1e-13 absolute accuracy.
_ESCALATION_TOL = 1e-13
# Fixed-point bits used for cos/sin of the half angle in the exact path.
_FIXED_BITS = 64
_GUARD_BITS = 64


@dataclass(frozen=True)
class DickeBasis:
    """Symmetric sector of N spin-1/2 particles, dimension N + 1."""

    n_spins: int

    @property
    def dim(self) -> int:
        return self.n_spins + 1

    @property
    def j(self) -> float:
        return self.n_spins / 2.0

    @property
    def levels(self) -> np.ndarray:
        """Excitation numbers m = 0..N."""
        return np.arange(self.n_spins + 1)

    @property
    def z_eigenvalues(self) -> np.ndarray:
        """J_z eigenvalues m - N/2, ascending."""
        return self.levels - self.n_spins / 2.0


@dataclass(frozen=True)
class CollectiveOperators:
    """Dense collective operators on the symmetric sector."""

    n_spins: int
    j_plus: np.ndarray
    j_minus: np.ndarray
    j_x: np.ndarray
    j_y: np.ndarray
    j_z: np.ndarray

    @property
    def casimir_eigenvalue(self) -> float:
        j = self.n_spins / 2.0
        return j * (j + 1.0)


@dataclass(frozen=True)
class WignerDMatrix:
    """Real rotation matrix d[n, m] = <n| exp(-i angle J_y) |m>."""

    n_spins: int
    angle: float
    elements: np.ndarray

    def column(self, m: int) -> np.ndarray:
        return self.elements[:, m]


@dataclass(frozen=True)
class RotatedDickeState:
    """Ladder state |angle, m> expanded in the unrotated basis."""

    n_spins: int
    angle: float
    m: int
    coefficients: np.ndarray = field(repr=False)


def build_basis(n_spins: int) -> tuple[DickeBasis, CollectiveOperators]:
    """Construct the basis bookkeeping and dense ladder operators.

    Raising acts as <m+1|J_+|m> = sqrt((N - m)(m + 1)); all operators are
    returned as complex (N+1) x (N+1) arrays.
    """
    _check_n_spins(n_spins)
    basis = DickeBasis(n_spins)
    n = n_spins
    m = np.arange(n)
    raise_amp = np.sqrt((n - m) * (m + 1.0))
    j_plus = np.zeros((n + 1, n + 1), dtype=complex)
    j_plus[m + 1, m] = raise_amp
    j_minus = j_plus.conj().T.copy()
    j_x = (j_plus + j_minus) / 2.0
    j_y = (j_plus - j_minus) / 2.0j
    j_z = np.diag(basis.z_eigenvalues.astype(complex))
    ops = CollectiveOperators(n, j_plus, j_minus, j_x, j_y, j_z)
    return basis, ops


def wigner_d(n_spins: int, angle: float) -> WignerDMatrix:
    """Rotation matrix for j = N/2 about the y axis.

    Each element is the classic single-sum expression over k with four
    factorials in the denominator, evaluated in log space with explicit
    sign tracking.  Elements whose alternating sum cancels beyond what
    float64 can absorb are recomputed with exact integer arithmetic
    (fixed-point powers of cos/sin of the half angle), so the result stays
    accurate for any N up to the cap and any angle.
    """
    _check_n_spins(n_spins)
    if not math.isfinite(angle):
        raise ValueError("rotation angle must be finite")
    elements = _wigner_elements_cached(n_spins, float(angle))
    return WignerDMatrix(n_spins, float(angle), elements)


def wigner_d_column_zero(n_spins: int, angle: float) -> np.ndarray:
    """Closed-form column m = 0 of ``wigner_d``.

    d[n, 0] = sqrt(C(N, n)) cos(angle/2)^(N-n) (-sin(angle/2))^n, evaluated
    with log-binomials.  Cheap for any N, including sizes where the full
    matrix is not wanted.
    """
    if n_spins < 1:
        raise ValueError("n_spins must be >= 1")
    n = np.arange(n_spins + 1)
    c = math.cos(angle / 2.0)
    s = math.sin(angle / 2.0)
    lf = _log_factorials(n_spins)
    log_binom = 0.5 * (lf[n_spins] - lf[n] - lf[n_spins - n])
    sign = np.ones(n_spins + 1)
    if c < 0:
        sign *= np.where((n_spins - n) % 2 == 0, 1.0, -1.0)
    if -s < 0:
        sign *= np.where(n % 2 == 0, 1.0, -1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_c = np.where(n_spins - n > 0, (n_spins - n) * _safe_log(abs(c)), 0.0)
        log_s = np.where(n > 0, n * _safe_log(abs(s)), 0.0)
    return sign * np.exp(log_binom + log_c + log_s)


def rotate_dicke(basis: DickeBasis, angle: float, m: int) -> RotatedDickeState:
    """Expand |angle, m> = exp(-i angle J_y)|m> in the unrotated ladder."""
    if not 0 <= m <= basis.n_spins:
        raise ValueError(f"level m={m} outside 0..{basis.n_spins}")
    column = wigner_d(basis.n_spins, angle).column(m)
    return RotatedDickeState(basis.n_spins, float(angle), m, column)


def rotation_oracle(basis: DickeBasis, angle: float) -> np.ndarray:
    """exp(-i angle J_y) by dense eigendecomposition of J_y.

    Independent of the factorial-sum route; intended as a small-system
    cross-check and capped accordingly.
    """
    if basis.n_spins > ORACLE_MAX_SPINS:
        raise ValueError(
            f"rotation oracle capped at n_spins <= {ORACLE_MAX_SPINS}; "
            f"got {basis.n_spins}"
        )
    _, ops = build_basis(basis.n_spins)
    vals, vecs = np.linalg.eigh(ops.j_y)
    phases = np.exp(-1j * angle * vals)
    mat = (vecs * phases) @ vecs.conj().T
    stray = float(np.abs(mat.imag).max())
    if stray > 1e-10:
        raise ArithmeticError(
            f"rotation matrix kept an imaginary residue of {stray:.3e}"
        )
    return np.ascontiguousarray(mat.real)


def _check_n_spins(n_spins) -> None:
    if not isinstance(n_spins, (int, np.integer)):
        raise ValueError("n_spins must be an integer")
    if n_spins < 1 or n_spins > MAX_SPINS:
        raise ValueError(f"n_spins must be in 1..{MAX_SPINS}, got {n_spins}")


def _safe_log(x: float) -> float:
    return math.log(x) if x > 0.0 else -math.inf


def _log_factorials(n: int) -> np.ndarray:
    return np.array([math.lgamma(i + 1.0) for i in range(n + 1)])


_WIGNER_CACHE: dict[tuple[int, float], np.ndarray] = {}
_WIGNER_CACHE_MAX = 64


def _wigner_elements_cached(n_spins: int, angle: float) -> np.ndarray:
    key = (n_spins, angle)
    hit = _WIGNER_CACHE.get(key)
    if hit is None:
        hit = _wigner_elements(n_spins, angle)
        hit.flags.writeable = False
        if len(_WIGNER_CACHE) >= _WIGNER_CACHE_MAX:
            _WIGNER_CACHE.pop(next(iter(_WIGNER_CACHE)))
        _WIGNER_CACHE[key] = hit
    return hit


def _wigner_elements(n_spins: int, angle: float) -> np.ndarray:
    N = n_spins
    c = math.cos(angle / 2.0)
    s = math.sin(angle / 2.0)
    if s == 0.0:
        # Rotation by a multiple of 4*pi is the identity; by 2*pi it picks up
        # the half-integer-spin phase (-1)^N.
        return np.eye(N + 1) * (c**N)

    lf = _log_factorials(N)
    log_c = _safe_log(abs(c))
    log_s = _safe_log(abs(s))
    flip_c = c < 0.0
    flip_s = -s < 0.0

    out = np.empty((N + 1, N + 1))
    escalate: list[tuple[int, int]] = []
    log_escalate = math.log(_ESCALATION_TOL / _EPS)
    for n in range(N + 1):
        base_n = lf[n] + lf[N - n]
        for m in range(N + 1):
            k = np.arange(max(0, m - n), min(m, N - n) + 1)
            pc = N + m - n - 2 * k
            ps = n - m + 2 * k
            logt = 0.5 * (lf[m] + lf[N - m] + base_n)
            logt = logt - lf[N - n - k] - lf[m - k] - lf[k + n - m] - lf[k]
            if log_c == -math.inf:
                logt = logt + np.where(pc > 0, -math.inf, 0.0)
            else:
                logt = logt + pc * log_c
            logt = logt + ps * log_s
            sgn = 1.0 - 2.0 * (k % 2)
            if flip_c:
                sgn = sgn * (1.0 - 2.0 * (pc % 2))
            if flip_s:
                sgn = sgn * (1.0 - 2.0 * (ps % 2))
            top = logt.max()
            if top == -math.inf:
                out[n, m] = 0.0
                continue
            out[n, m] = math.exp(top) * float((sgn * np.exp(logt - top)).sum())
            if top + math.log(k.size) > log_escalate:
                escalate.append((n, m))

    if escalate:
        _recompute_exact(out, N, c, s, escalate)
    return out


def _recompute_exact(
    out: np.ndarray, N: int, c: float, s: float, cells: list[tuple[int, int]]
) -> None:
    """Re-evaluate flagged elements of the same sum in exact integer form.

    cos and sin of the half angle are scaled by 2**_FIXED_BITS (exact for
    float64 inputs), every term then being an integer, so the alternating
    sum carries no rounding at all.  The square-root prefactor is an integer
    square root with enough guard bits for the full dynamic range.
    """
    B = _FIXED_BITS
    big_c = _MPZ(round(c * (1 << B)))
    big_ms = _MPZ(round(-s * (1 << B)))
    c_pow = [_MPZ(1)] * (N + 1)
    ms_pow = [_MPZ(1)] * (N + 1)
    for p in range(1, N + 1):
        c_pow[p] = c_pow[p - 1] * big_c
        ms_pow[p] = ms_pow[p - 1] * big_ms
    # Every term has total degree N, so only the cos power is free.
    cs_pow = [c_pow[p] * ms_pow[N - p] for p in range(N + 1)]
    comb = math.comb
    binom_n = [_MPZ(comb(N, i)) for i in range(N + 1)]

    for n, m in cells:
        acc = _MPZ(0)
        for k in range(max(0, m - n), min(m, N - n) + 1):
            coef = comb(m, k) * comb(N - m, n - m + k)
            term = coef * cs_pow[N + m - n - 2 * k]
            acc = acc - term if k & 1 else acc + term
        if acc == 0:
            out[n, m] = 0.0
            continue
        # prefactor sqrt(C(N, m) / C(N, n)), guard-shifted before isqrt so
        # small ratios keep full precision.
        num = binom_n[m]
        den = binom_n[n]
        shift = 2 * _GUARD_BITS + max(0, den.bit_length() - num.bit_length())
        shift += shift & 1
        root = _ISQRT((num << shift) // den)
        val = acc * root
        sign = 1.0 if val > 0 else -1.0
        mag = abs(val)
        drop = max(mag.bit_length() - 64, 0)
        out[n, m] = sign * math.ldexp(float(mag >> drop), drop - N * B - shift // 2)
