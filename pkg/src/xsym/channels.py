"""One-sided noise channels on two-qubit X states.

Two independent routes are provided: dense Kraus application
(:func:`kraus_ops` -> :func:`lift_one_sided` -> :func:`apply_kraus`) and the
closed-form X-state maps (:func:`evolve_closed_form`).  The closed forms work on
field tuples ``(rho11, rho22, rho33, rho44, rho14, rho23)`` and broadcast over
numpy arrays, which is what the sweeps use.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import BadLayout, DimensionMismatch, InvalidStrength
from .qmat import QubitLabel, XState, as_label, check_density_matrix

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)


class ChannelKind(str, enum.Enum):
    DEPOLARIZING = "depolarizing"
    AMPLITUDE_DAMPING = "amplitude_damping"
    BIT_FLIP = "bit_flip"
    BIT_PHASE_FLIP = "bit_phase_flip"
    DEPHASING = "dephasing"


_KIND_ALIASES = {
    "dep": ChannelKind.DEPOLARIZING,
    "ad": ChannelKind.AMPLITUDE_DAMPING,
    "bf": ChannelKind.BIT_FLIP,
    "bpf": ChannelKind.BIT_PHASE_FLIP,
    "pd": ChannelKind.DEPHASING,
}


def as_kind(value) -> ChannelKind:
    if isinstance(value, ChannelKind):
        return value
    key = str(value).strip().lower()
    if key in _KIND_ALIASES:
        return _KIND_ALIASES[key]
    try:
        return ChannelKind(key)
    except ValueError:
        raise ValueError(f"unknown channel kind {value!r}") from None


def check_strength(p) -> None:
    arr = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise InvalidStrength(f"channel strength must lie in [0, 1], got {p!r}")


@dataclass(frozen=True)
class KrausSet:
    operators: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        if not ops:
            raise DimensionMismatch("empty Kraus set")
        shape = ops[0].shape
        if len(shape) != 2 or shape[0] != shape[1] or any(k.shape != shape for k in ops):
            raise DimensionMismatch("Kraus operators must be square and equally sized")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def completeness_error(self) -> float:
        total = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(total - np.eye(self.dim))))

    def __iter__(self):
        return iter(self.operators)

    def __len__(self):
        return len(self.operators)


@dataclass(frozen=True)
class OneSidedChannel:
    kind: ChannelKind
    location: QubitLabel = QubitLabel.U
    p: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", as_kind(self.kind))
        object.__setattr__(self, "location", as_label(self.location))
        check_strength(self.p)
        object.__setattr__(self, "p", float(self.p))

    def at(self, location=None, p=None) -> "OneSidedChannel":
        return OneSidedChannel(self.kind,
                               self.location if location is None else location,
                               self.p if p is None else p)

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "location": self.location.value, "p": self.p}


LAYOUT_SLOTS = {"a": 2, "b": 2, "c": 3, "d": 3}


@dataclass(frozen=True)
class ChannelConfig:
    """One of the four two-/three-channel layouts, all slots sharing ``p``.

    ``location`` is ``U`` for the layout as drawn (multi-channel side on U) and
    ``L`` for its mirror image.
    """

    layout: str
    slots: tuple
    p: float = 0.0
    location: QubitLabel = QubitLabel.U

    def __post_init__(self):
        layout = str(self.layout).strip().lower()
        if layout not in LAYOUT_SLOTS:
            raise BadLayout(f"layout must be one of a, b, c, d; got {self.layout!r}")
        slots = tuple(as_kind(s) for s in self.slots)
        if len(slots) != LAYOUT_SLOTS[layout]:
            raise BadLayout(
                f"layout {layout!r} takes {LAYOUT_SLOTS[layout]} channels, got {len(slots)}")
        check_strength(self.p)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "slots", slots)
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "location", as_label(self.location))

    def steps(self) -> list[tuple[ChannelKind, QubitLabel]]:
        """(kind, side) pairs in application order."""
        near, far = QubitLabel.U, QubitLabel.L
        if self.location is QubitLabel.L:
            near, far = far, near
        s = self.slots
        if self.layout == "a":
            return [(s[0], near), (s[1], far)]
        if self.layout == "b":
            return [(s[0], near), (s[1], near)]
        if self.layout == "c":
            return [(s[0], near), (s[1], near), (s[2], far)]
        return [(s[0], near), (s[1], near), (s[2], near)]

    @property
    def is_mixed(self) -> bool:
        return len(set(self.slots)) > 1

    def at(self, location=None, p=None) -> "ChannelConfig":
        return ChannelConfig(self.layout, self.slots,
                             self.p if p is None else p,
                             self.location if location is None else location)

    def to_json(self) -> dict:
        return {"layout": self.layout, "slots": [k.value for k in self.slots],
                "p": self.p, "location": self.location.value}


def channel_from_json(obj: Any) -> OneSidedChannel | ChannelConfig:
    """Parse either the channel or the config JSON schema."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise ValueError("channel JSON must be an object")
    if "layout" in obj:
        return ChannelConfig(obj["layout"], tuple(obj.get("slots", ())),
                             obj.get("p", 0.0), obj.get("location", "U"))
    if "kind" not in obj:
        raise ValueError("channel JSON needs 'kind' (or 'layout' for a config)")
    return OneSidedChannel(obj["kind"], obj.get("location", "U"), obj.get("p", 0.0))


# -- Kraus route ---------------------------------------------------------------

def kraus_ops(kind, p: float) -> KrausSet:
    """Single-qubit Kraus operators of ``kind`` at strength ``p``."""
    kind = as_kind(kind)
    check_strength(p)
    p = float(p)
    q = 1.0 - p
    if kind is ChannelKind.DEPHASING:
        ops = [np.sqrt(q) * IDENTITY2, np.sqrt(p) * SIGMA3]
    elif kind is ChannelKind.BIT_FLIP:
        ops = [np.sqrt(q) * IDENTITY2, np.sqrt(p) * SIGMA1]
    elif kind is ChannelKind.BIT_PHASE_FLIP:
        ops = [np.sqrt(q) * IDENTITY2, np.sqrt(p) * SIGMA2]
    elif kind is ChannelKind.AMPLITUDE_DAMPING:
        ops = [np.array([[1, 0], [0, np.sqrt(q)]], dtype=complex),
               np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex)]
    else:
        ops = [np.sqrt(1.0 - 0.75 * p) * IDENTITY2] + [
            0.5 * np.sqrt(p) * s for s in (SIGMA1, SIGMA2, SIGMA3)]
    return KrausSet(tuple(ops))


def lift_one_sided(k: KrausSet, location) -> KrausSet:
    if k.dim != 2:
        raise DimensionMismatch("only single-qubit Kraus sets can be lifted")
    if as_label(location) is QubitLabel.U:
        return KrausSet(tuple(np.kron(op, IDENTITY2) for op in k))
    return KrausSet(tuple(np.kron(IDENTITY2, op) for op in k))


def apply_kraus(m, k: KrausSet, validate: bool = True) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.shape != (k.dim, k.dim):
        raise DimensionMismatch(f"state shape {m.shape} does not match Kraus dim {k.dim}")
    out = sum(op @ m @ op.conj().T for op in k)
    if validate:
        check_density_matrix(out, tol=1e-10)
    return out


def channel_matrix(ch: OneSidedChannel) -> KrausSet:
    """Lifted two-qubit Kraus set of a one-sided channel."""
    return lift_one_sided(kraus_ops(ch.kind, ch.p), ch.location)


# -- closed forms --------------------------------------------------------------

def evolve_fields(fields: Sequence, kind, location, p):
    """Closed-form image of X-state fields under a one-sided channel.

    Every argument broadcasts, so ``fields`` may hold arrays of states and ``p``
    an array of strengths.
    """
    kind = as_kind(kind)
    upper = as_label(location) is QubitLabel.U
    d1, d2, d3, d4, c14, c23 = fields
    p = np.asarray(p, dtype=float)
    q = 1.0 - p
    if kind is ChannelKind.DEPOLARIZING:
        h = 0.5 * p
        if upper:
            diag = (d1 + h * (d3 - d1), d2 + h * (d4 - d2),
                    d3 + h * (d1 - d3), d4 + h * (d2 - d4))
        else:
            diag = (d1 + h * (d2 - d1), d2 + h * (d1 - d2),
                    d3 + h * (d4 - d3), d4 + h * (d3 - d4))
        return diag + (q * c14, q * c23)
    if kind is ChannelKind.AMPLITUDE_DAMPING:
        s = np.sqrt(q)
        if upper:
            diag = (d1 + p * d3, d2 + p * d4, q * d3, q * d4)
        else:
            diag = (d1 + p * d2, q * d2, d3 + p * d4, q * d4)
        return diag + (s * c14, s * c23)
    if kind is ChannelKind.DEPHASING:
        f = 1.0 - 2.0 * p
        return (d1 + 0 * p, d2 + 0 * p, d3 + 0 * p, d4 + 0 * p, f * c14, f * c23)
    # bit flip and bit-phase flip share populations; sign differs on the cross term
    sign = 1.0 if kind is ChannelKind.BIT_FLIP else -1.0
    if upper:
        diag = (q * d1 + p * d3, q * d2 + p * d4, q * d3 + p * d1, q * d4 + p * d2)
        coh = (q * c14 + sign * p * np.conj(c23), q * c23 + sign * p * np.conj(c14))
    else:
        diag = (q * d1 + p * d2, q * d2 + p * d1, q * d3 + p * d4, q * d4 + p * d3)
        coh = (q * c14 + sign * p * c23, q * c23 + sign * p * c14)
    return diag + coh


def config_fields(fields: Sequence, cfg: ChannelConfig, p=None):
    p = cfg.p if p is None else p
    for kind, side in cfg.steps():
        fields = evolve_fields(fields, kind, side, p)
    return fields


def channel_fields(fields: Sequence, ch: OneSidedChannel | ChannelConfig, location=None, p=None):
    """Apply a channel or config, optionally overriding its location and ``p``."""
    ch = ch.at(location=location)
    p = ch.p if p is None else p
    if isinstance(ch, ChannelConfig):
        return config_fields(fields, ch, p)
    return evolve_fields(fields, ch.kind, ch.location, p)


def evolve_closed_form(x: XState, ch: OneSidedChannel) -> XState:
    check_strength(ch.p)
    return XState.from_fields(evolve_fields(x.fields(), ch.kind, ch.location, ch.p))


def apply_config(x: XState, cfg: ChannelConfig, p: float | None = None) -> XState:
    if p is not None:
        check_strength(p)
    return XState.from_fields(config_fields(x.fields(), cfg, p))


def apply_channel(x: XState, ch: OneSidedChannel | ChannelConfig) -> XState:
    if isinstance(ch, ChannelConfig):
        return apply_config(x, ch)
    return evolve_closed_form(x, ch)


def evolve_kraus(x: XState, ch: OneSidedChannel) -> np.ndarray:
    """Dense route: lifted Kraus operators applied to ``x``."""
    return apply_kraus(x.to_dense(), channel_matrix(ch))


def mixed_configs() -> list[ChannelConfig]:
    """All layouts whose slots mix amplitude damping and depolarizing noise."""
    ad, dep = ChannelKind.AMPLITUDE_DAMPING, ChannelKind.DEPOLARIZING
    out = []
    for layout, n in LAYOUT_SLOTS.items():
        for mask in range(2 ** n):
            slots = tuple(ad if (mask >> i) & 1 else dep for i in range(n))
            if len(set(slots)) > 1:
                out.append(ChannelConfig(layout, slots))
    return out


__all__ = [
    "SIGMA1", "SIGMA2", "SIGMA3", "IDENTITY2",
    "ChannelKind", "KrausSet", "OneSidedChannel", "ChannelConfig",
    "as_kind", "kraus_ops", "lift_one_sided", "apply_kraus", "evolve_fields",
    "config_fields", "channel_fields", "evolve_closed_form", "apply_config",
    "apply_channel", "evolve_kraus", "channel_from_json", "mixed_configs",
]
