"""Concurrence, CHSH Bell function and trace-distance discord.

Each measure has a closed form on X-state fields (vectorised, ``*_fields``)
plus an independent dense-matrix oracle that does not use the closed form.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .channels import SIGMA1, SIGMA2, SIGMA3
from .errors import ComplexCoherence, SingularDenominator
from .qmat import XState, check_density_matrix

EPS_REAL = 1e-9
EPS_DEN = 1e-12

_PAULIS = (SIGMA1, SIGMA2, SIGMA3)
_YY = np.kron(SIGMA2, SIGMA2)


# -- concurrence ---------------------------------------------------------------

def concurrence_fields(d1, d2, d3, d4, c14, c23):
    d1, d2, d3, d4 = (np.clip(np.real(v), 0.0, None) for v in (d1, d2, d3, d4))
    a = np.abs(c23) - np.sqrt(d1 * d4)
    b = np.abs(c14) - np.sqrt(d2 * d3)
    return 2.0 * np.maximum(0.0, np.maximum(a, b))


def concurrence_x(x: XState) -> float:
    return float(concurrence_fields(*x.fields()))


def concurrence_oracle(m) -> float:
    """Spin-flip construction: sqrt-eigenvalues of rho (Y x Y) rho* (Y x Y)."""
    m = check_density_matrix(m, dim=4)
    r = m @ _YY @ m.conj() @ _YY
    lam = np.sort(np.clip(np.linalg.eigvals(r).real, 0.0, None))[::-1]
    s = np.sqrt(lam)
    return float(max(0.0, s[0] - s[1] - s[2] - s[3]))


# -- Bell function -------------------------------------------------------------

@dataclass(frozen=True)
class BellEigenvalues:
    u1: float
    u2: float
    u3: float


def bell_eigen_fields(d1, d2, d3, d4, c14, c23):
    a, b = np.abs(c14), np.abs(c23)
    u1 = 4.0 * (a + b) ** 2
    u2 = ((d1 - d2) + (d4 - d3)) ** 2
    u3 = 4.0 * (a - b) ** 2
    return u1, u2, u3


def bell_eigenvalues(x: XState) -> BellEigenvalues:
    return BellEigenvalues(*(float(u) for u in bell_eigen_fields(*x.fields())))


def bell_fields(d1, d2, d3, d4, c14, c23):
    u1, u2, u3 = bell_eigen_fields(d1, d2, d3, d4, c14, c23)
    return 2.0 * np.sqrt(u1 + np.maximum(u2, u3))


def bell_f_x(x: XState) -> float:
    return float(bell_fields(*x.fields()))


def correlation_matrix(m) -> np.ndarray:
    """T_ij = tr[rho sigma_i (x) sigma_j] for i, j in 1..3."""
    m = np.asarray(m, dtype=complex)
    return np.array([[np.trace(m @ np.kron(si, sj)).real for sj in _PAULIS]
                     for si in _PAULIS])


def bell_oracle(m) -> float:
    m = check_density_matrix(m, dim=4)
    t = correlation_matrix(m)
    u = np.sort(np.linalg.eigvalsh(t.T @ t))
    return float(2.0 * math.sqrt(max(0.0, u[-1] + u[-2])))


# -- trace-distance discord ------------------------------------------------------

@dataclass(frozen=True)
class GammaCoords:
    gamma1: float
    gamma2: float
    gamma3: float
    x: float

    def astuple(self):
        return (self.gamma1, self.gamma2, self.gamma3, self.x)

    def canonical(self) -> "GammaCoords":
        """Relabel so that |gamma1| >= |gamma2|.

        The swap is a local diagonal unitary (it flips the sign of rho23), so
        discord is unchanged; the closed form is only valid in this ordering.
        """
        if abs(self.gamma2) > abs(self.gamma1):
            return GammaCoords(self.gamma2, self.gamma1, self.gamma3, self.x)
        return self


class DiscordSegment(str, enum.Enum):
    A = "A"  # |g3| >= |g1|: D = |g1|/2
    B = "B"  # |g3| < |g1| and g3^2 >= g2^2 + x^2: D = |g3|/2
    C = "C"  # otherwise


_SEGMENTS = (DiscordSegment.A, DiscordSegment.B, DiscordSegment.C)


def _require_real(c14, c23):
    if np.any(np.abs(np.imag(c14)) >= EPS_REAL) or np.any(np.abs(np.imag(c23)) >= EPS_REAL):
        raise ComplexCoherence(
            "closed-form discord needs real coherences; use discord_oracle instead")


def gamma_fields(d1, d2, d3, d4, c14, c23, canonical=False):
    _require_real(c14, c23)
    r14, r23 = np.real(c14), np.real(c23)
    g1 = 2.0 * (r23 + r14)
    g2 = 2.0 * (r23 - r14)
    g3 = 1.0 - 2.0 * (np.real(d2) + np.real(d3))
    xx = 2.0 * (np.real(d1) + np.real(d2)) - 1.0
    if canonical:
        swap = np.abs(g2) > np.abs(g1)
        g1, g2 = np.where(swap, g2, g1), np.where(swap, g1, g2)
    return g1, g2, g3, xx


def gamma_coords(x: XState) -> GammaCoords:
    return GammaCoords(*(float(v) for v in gamma_fields(*x.fields())))


def segment_code(g1, g2, g3, xx):
    """0/1/2 for segments A/B/C; boundary |g3| = |g1| goes to A, g3^2 = g2^2+x^2 to B."""
    a = np.abs(g3) >= np.abs(g1)
    b = g3 ** 2 >= g2 ** 2 + xx ** 2
    return np.where(a, 0, np.where(b, 1, 2))


def discord_segment(g: GammaCoords) -> DiscordSegment:
    return _SEGMENTS[int(segment_code(*g.astuple()))]


def discord_from_gammas(g1, g2, g3, xx, strict=False, warn=True):
    """Segment-wise closed form; expects canonically ordered coordinates.

    The segment-C ratio is evaluated in a form that stays exact as its
    denominator vanishes; ``strict`` raises instead, ``warn`` flags it.
    """
    g1, g2, g3, xx = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (g1, g2, g3, xx)))
    code = segment_code(g1, g2, g3, xx)
    g1s, g2s, g3s, xs = g1 ** 2, g2 ** 2, g3 ** 2, xx ** 2
    den = g1s - g3s + xs
    in_c = code == 2
    if np.any(in_c & (den < EPS_DEN)):
        if strict:
            raise SingularDenominator("segment-C denominator below 1e-12")
        if warn:
            warnings.warn("segment-C denominator below 1e-12; using the weighted-mean form",
                          RuntimeWarning, stacklevel=2)
    # (g1^2 (g2^2 + x^2) - g2^2 g3^2) / den is a weighted mean of g2^2 and g1^2,
    # written in a form that stays finite as den -> 0; den > 0 inside segment C
    safe = np.where(in_c & (den > 0), den, 1.0)
    ratio = np.where(in_c, (g2s * (g1s - g3s) + g1s * xs) / safe, 0.0)
    out = np.where(code == 0, 0.5 * np.abs(g1),
                   np.where(code == 1, 0.5 * np.abs(g3), 0.5 * np.sqrt(np.clip(ratio, 0, None))))
    return out


def discord_general(g1, g2, g3, xx):
    """The single max/min expression covering all three segments (cross-check)."""
    g1s, g2s, g3s, xs = g1 ** 2, g2 ** 2, g3 ** 2, xx ** 2
    hi = max(g3s, g2s + xs)
    lo = min(g3s, g1s)
    den = hi - lo + g1s - g2s
    if abs(den) < EPS_DEN:
        return math.nan  # 0/0 on a segment corner
    return 0.5 * math.sqrt(max(0.0, (g1s * hi - g2s * lo) / den))


def discord_fields(d1, d2, d3, d4, c14, c23, canonical=True, strict=False):
    """Vectorised discord; sweeps pass near-zero correlations routinely, so no warning."""
    return discord_from_gammas(*gamma_fields(d1, d2, d3, d4, c14, c23, canonical=canonical),
                               strict=strict, warn=False)


def discord_x(x: XState, *, canonical: bool = True, strict: bool = False) -> float:
    """Trace-distance discord of a real-coherence X state.

    ``canonical=False`` evaluates the segment formulas on the raw
    coordinates, which is only correct when ``rho14 * rho23 >= 0``.
    """
    g = gamma_coords(x)
    if canonical:
        g = g.canonical()
    value = float(discord_from_gammas(*g.astuple(), strict=strict))
    if canonical:
        check = discord_general(*g.astuple())
        if not math.isnan(check) and abs(check - value) > 1e-9:
            raise ArithmeticError(f"segment form {value} != general form {check}")
    return value


@dataclass(frozen=True)
class OracleResult:
    value: float
    spread: float  # median minus best over restarts; 0 means most restarts agreed
    nfev: int
    backend: str


def oracle_starts(m, n_starts: int, rng: np.random.Generator) -> np.ndarray:
    """Restart points: the computational-basis dephased state first, then random."""
    m = np.asarray(m, dtype=complex)
    starts = np.empty((n_starts, 10))
    blocks = [m[0:2, 0:2], m[2:4, 2:4]]
    first = [0.0, 0.0]
    for blk in blocks:
        blk = 0.5 * (blk + blk.conj().T) + 1e-6 * np.eye(2)
        chol = np.linalg.cholesky(blk)
        first += [chol[0, 0].real, chol[1, 0].real, chol[1, 0].imag, chol[1, 1].real]
    starts[0] = first
    k = n_starts - 1
    starts[1:, 0] = np.arccos(rng.uniform(-1.0, 1.0, k))
    starts[1:, 1] = rng.uniform(0.0, 2 * np.pi, k)
    starts[1:, 2:] = rng.normal(0.0, 0.5, (k, 8))
    return starts


def discord_oracle(m, *, n_starts: int = 32, seed: int = 42, fatol: float = 1e-6,
                   xatol: float = 1e-6, maxiter: int = 4000, backend: str | None = None,
                   full: bool = False):
    """Minimise the trace distance to classical-quantum states numerically.

    Classical-quantum states are ``sum_j |a_j><a_j| (x) rho_L(j)`` with an
    orthonormal qubit-U basis.  Multi-start Nelder-Mead with a fixed seed;
    restarts run in order and the minimum is taken, so results are deterministic.
    """
    if isinstance(m, XState):
        m = m.to_dense()
    m = check_density_matrix(m, dim=4)
    rng = np.random.default_rng(seed)
    starts = oracle_starts(m, n_starts, rng)
    kern = kernels.get_backend(backend)
    values, _, nfev = kern.minimize_cq_distance(m, starts, xatol=xatol, fatol=fatol,
                                                maxiter=maxiter)
    best = float(max(0.0, values.min()))
    if not full:
        return best
    name = "python" if kern is kernels.fallback else "cython"
    return OracleResult(best, float(np.median(values) - best), int(nfev), name)
