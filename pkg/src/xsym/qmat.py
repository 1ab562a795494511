"""Two-qubit density matrices and the X-state type.

Basis order is ``|00>, |01>, |10>, |11>`` with the first tensor factor being
qubit U and the second qubit L.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import InvalidProbabilities, NotDensityMatrix, NotXShape

EPS_NUM = 1e-12
EPS_SHAPE = 1e-12

# entries of a 4x4 matrix that must vanish for an X state
_OFF_X = np.array(
    [[0, 1, 1, 0],
     [1, 0, 0, 1],
     [1, 0, 0, 1],
     [0, 1, 1, 0]], dtype=bool)

SWAP = np.array(
    [[1, 0, 0, 0],
     [0, 0, 1, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1]], dtype=complex)


class QubitLabel(str, enum.Enum):
    U = "U"
    L = "L"

    @property
    def other(self) -> "QubitLabel":
        return QubitLabel.L if self is QubitLabel.U else QubitLabel.U


def as_label(value) -> QubitLabel:
    if isinstance(value, QubitLabel):
        return value
    try:
        return QubitLabel(str(value).upper())
    except ValueError:
        raise ValueError(f"qubit label must be 'U' or 'L', got {value!r}") from None


@dataclass(frozen=True)
class XState:
    """Seven real degrees of freedom of a two-qubit X state.

    ``rho14`` is the ``|00><11|`` coherence and ``rho23`` the ``|01><10|`` one;
    the lower triangle holds their conjugates.
    """

    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho14: complex = 0j
    rho23: complex = 0j

    def __post_init__(self):
        for name in ("rho11", "rho22", "rho33", "rho44"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("rho14", "rho23"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        check_x_params(*self.fields())

    @property
    def diag(self) -> tuple[float, float, float, float]:
        return (self.rho11, self.rho22, self.rho33, self.rho44)

    def fields(self) -> tuple[float, float, float, float, complex, complex]:
        return (self.rho11, self.rho22, self.rho33, self.rho44, self.rho14, self.rho23)

    def r(self, j: int, k: int) -> float:
        """Population difference rho_jj - rho_kk (1-based indices)."""
        d = self.diag
        return d[j - 1] - d[k - 1]

    @property
    def has_real_coherences(self) -> bool:
        return abs(self.rho14.imag) < 1e-9 and abs(self.rho23.imag) < 1e-9

    def to_dense(self) -> np.ndarray:
        return x_dense(*self.fields())

    def swapped(self) -> "XState":
        """Relabel the qubits, |ij> -> |ji>."""
        return XState(self.rho11, self.rho33, self.rho22, self.rho44,
                      self.rho14, self.rho23.conjugate())

    def to_json(self) -> dict:
        return {
            "diag": list(self.diag),
            "rho14": {"re": self.rho14.real, "im": self.rho14.imag},
            "rho23": {"re": self.rho23.real, "im": self.rho23.imag},
        }

    @classmethod
    def from_fields(cls, fields) -> "XState":
        return cls(*(np.asarray(f).item() for f in fields))


def check_x_params(d1, d2, d3, d4, c14, c23, tol: float = EPS_NUM) -> None:
    diag = (d1, d2, d3, d4)
    if not all(math.isfinite(v) for v in diag) or not all(
            math.isfinite(abs(c)) for c in (c14, c23)):
        raise InvalidProbabilities("X-state parameters must be finite")
    if min(diag) < -tol:
        raise InvalidProbabilities(f"negative population in {diag}")
    if abs(sum(diag) - 1.0) > tol:
        raise InvalidProbabilities(f"populations sum to {sum(diag)!r}, not 1")
    if abs(c14) > math.sqrt(max(d1 * d4, 0.0)) + tol:
        raise NotDensityMatrix(f"|rho14| = {abs(c14)} exceeds sqrt(rho11 rho44)")
    if abs(c23) > math.sqrt(max(d2 * d3, 0.0)) + tol:
        raise NotDensityMatrix(f"|rho23| = {abs(c23)} exceeds sqrt(rho22 rho33)")


def x_dense(d1, d2, d3, d4, c14, c23) -> np.ndarray:
    """Dense 4x4 matrix of X-state fields; broadcasts over array fields."""
    d1, d2, d3, d4, c14, c23 = np.broadcast_arrays(
        *(np.asarray(v, dtype=complex) for v in (d1, d2, d3, d4, c14, c23)))
    m = np.zeros(d1.shape + (4, 4), dtype=complex)
    m[..., 0, 0] = d1
    m[..., 1, 1] = d2
    m[..., 2, 2] = d3
    m[..., 3, 3] = d4
    m[..., 0, 3] = c14
    m[..., 3, 0] = np.conj(c14)
    m[..., 1, 2] = c23
    m[..., 2, 1] = np.conj(c23)
    return m


def check_density_matrix(m, tol: float = EPS_NUM, dim: int | None = None) -> np.ndarray:
    """Return ``m`` as a complex array after checking it is a valid state."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotDensityMatrix(f"expected a square matrix, got shape {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise NotDensityMatrix(f"expected a {dim}x{dim} matrix, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NotDensityMatrix("matrix has non-finite entries")
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise NotDensityMatrix("matrix is not Hermitian")
    if abs(np.trace(m) - 1.0) > tol:
        raise NotDensityMatrix(f"trace is {np.trace(m).real!r}, not 1")
    if np.linalg.eigvalsh(m).min() < -tol:
        raise NotDensityMatrix("matrix has a negative eigenvalue")
    return m


def from_dense(m) -> XState:
    m = check_density_matrix(m, dim=4)
    if np.max(np.abs(m[_OFF_X])) > EPS_SHAPE:
        raise NotXShape("matrix has non-zero entries outside the X pattern")
    d = m.diagonal().real
    return XState(d[0], d[1], d[2], d[3], m[0, 3], m[1, 2])


def max_coherence_state(d1: float, d2: float, d3: float, d4: float) -> XState:
    """X state with the given populations and maximal, real coherences."""
    diag = np.array([d1, d2, d3, d4], dtype=float)
    if np.any(diag < 0) or abs(diag.sum() - 1.0) > EPS_NUM:
        raise InvalidProbabilities(f"invalid populations {tuple(diag)}")
    return XState(d1, d2, d3, d4, math.sqrt(d1 * d4), math.sqrt(d2 * d3))


def bell_state() -> XState:
    """(|00> + |11>)/sqrt(2)."""
    return XState(0.5, 0.0, 0.0, 0.5, 0.5, 0.0)


def maximally_mixed() -> XState:
    return XState(0.25, 0.25, 0.25, 0.25)


def x_eigenvalues(x: XState) -> np.ndarray:
    """Exact spectrum of an X state from its two 2x2 blocks, ascending."""
    out = []
    for a, b, c in ((x.rho11, x.rho44, x.rho14), (x.rho22, x.rho33, x.rho23)):
        mean = 0.5 * (a + b)
        rad = math.hypot(0.5 * (a - b), abs(c))
        out += [mean - rad, mean + rad]
    return np.sort(out)


def _as_matrix(m) -> np.ndarray:
    if isinstance(m, XState):
        return m.to_dense()
    return np.asarray(m, dtype=complex)


def reduced_qubit(m, keep) -> np.ndarray:
    """Reduced 2x2 state of qubit ``keep`` (the other qubit is traced out)."""
    m = check_density_matrix(_as_matrix(m), dim=4)
    t = m.reshape(2, 2, 2, 2)
    if as_label(keep) is QubitLabel.U:
        return np.einsum("ijkj->ik", t)
    return np.einsum("ijil->jl", t)


def von_neumann_entropy(m) -> float:
    """Entropy in bits; 0 log 0 is taken as 0."""
    m = check_density_matrix(_as_matrix(m))
    lam = np.clip(np.linalg.eigvalsh(m), 0.0, None)
    lam = lam[lam > 0]
    return float(max(0.0, -np.sum(lam * np.log2(lam))))


def trace_distance(a, b) -> float:
    a = check_density_matrix(_as_matrix(a))
    b = check_density_matrix(_as_matrix(b))
    if a.shape != b.shape:
        raise NotDensityMatrix(f"shape mismatch {a.shape} vs {b.shape}")
    return float(0.5 * np.linalg.svd(a - b, compute_uv=False).sum())


def random_x_state(rng: np.random.Generator, *, coherences: str = "complex",
                   frac: tuple[float, float] = (0.0, 1.0), diag=None) -> XState:
    """Sample an X state.

    Populations are Dirichlet(1,1,1,1) unless ``diag`` is given. Each coherence
    magnitude is a uniform fraction in ``frac`` of its positivity bound.
    ``coherences`` is ``"complex"`` (uniform phase), ``"real"`` (random sign),
    ``"positive"`` or ``"max"``.
    """
    d = rng.dirichlet(np.ones(4)) if diag is None else np.asarray(diag, dtype=float)
    bounds = (math.sqrt(d[0] * d[3]), math.sqrt(d[1] * d[2]))
    c = []
    for bound in bounds:
        if coherences == "max":
            c.append(bound)
            continue
        mag = bound * rng.uniform(*frac)
        if coherences == "complex":
            c.append(mag * np.exp(2j * np.pi * rng.uniform()))
        elif coherences == "real":
            c.append(mag * rng.choice([-1.0, 1.0]))
        elif coherences == "positive":
            c.append(mag)
        else:
            raise ValueError(f"unknown coherence mode {coherences!r}")
    return XState(d[0], d[1], d[2], d[3], c[0], c[1])


def _complex_from_json(v) -> complex:
    if isinstance(v, dict):
        return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    return complex(float(v))


def state_from_json(obj: Any) -> XState:
    """Parse the JSON state schema (dict or JSON text)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "diag" not in obj:
        raise InvalidProbabilities("state JSON needs a 'diag' list of four populations")
    diag = [float(v) for v in obj["diag"]]
    if len(diag) != 4:
        raise InvalidProbabilities("'diag' must have exactly four entries")
    if obj.get("coherences") == "max":
        return max_coherence_state(*diag)
    return XState(*diag, _complex_from_json(obj.get("rho14", 0.0)),
                  _complex_from_json(obj.get("rho23", 0.0)))
