"""Location-symmetry analysis of correlation decay under one-sided noise.

Symmetry questions compare the same channel acting on qubit U against it acting
on qubit L.  Every verdict is computed twice: from the analytic family rules
(population equalities on the initial state) and from a numeric sweep over a
p-grid, and the two are reported side by side.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .channels import (ChannelConfig, ChannelKind, OneSidedChannel, as_kind, channel_fields,
                       mixed_configs)
from .correlations import (DiscordSegment, bell_fields, concurrence_fields, discord_fields,
                           gamma_fields, segment_code)
from .errors import Ambiguous, ComplexCoherence, NoFit, UnsupportedCombination
from .qmat import (QubitLabel, XState, as_label, check_density_matrix, from_dense,
                   max_coherence_state, reduced_qubit, von_neumann_entropy)

log = logging.getLogger(__name__)

EPS_ELEM = 1e-12
EPS_SYM = 1e-10
EPS_ZERO = 1e-10
EPS_FIT = 1e-8
EPS_INV = 1e-9
MIN_INTERVAL = 1e-7

DEFAULT_GRID = np.linspace(0.0, 1.0, 201)
# Branch switches of the max() in C and F cluster near p = 0 and p = 1, where
# windows of location dependence can be narrower than the uniform spacing.
_EDGE = 10.0 ** -np.arange(2.5, 9.5, 0.5)
VERDICT_GRID = np.unique(np.concatenate([DEFAULT_GRID, _EDGE, 1.0 - _EDGE]))
INVARIANCE_GRID = np.linspace(0.0, 1.0, 401)

Channel = OneSidedChannel | ChannelConfig
_SEGMENTS = (DiscordSegment.A, DiscordSegment.B, DiscordSegment.C)


class Measure(str, enum.Enum):
    CONCURRENCE = "C"
    BELL = "F"
    DISCORD = "D"


_MEASURE_ALIASES = {"c": Measure.CONCURRENCE, "concurrence": Measure.CONCURRENCE,
                    "f": Measure.BELL, "bell": Measure.BELL,
                    "d": Measure.DISCORD, "discord": Measure.DISCORD}


def as_measure(value) -> Measure:
    if isinstance(value, Measure):
        return value
    try:
        return _MEASURE_ALIASES[str(value).strip().lower()]
    except KeyError:
        raise ValueError(f"unknown measure {value!r}; use C, F or D") from None


class Verdict(str, enum.Enum):
    SYMMETRIC = "Symmetric"
    ASYMMETRIC = "Asymmetric"


def _eq(a, b, tol=EPS_ELEM) -> bool:
    return abs(a - b) <= tol


def _real(c) -> bool:
    return abs(complex(c).imag) <= EPS_ELEM


def _grid(grid, default=DEFAULT_GRID) -> np.ndarray:
    g = default if grid is None else np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0 or np.any(np.diff(g) <= 0) or g[0] < 0 or g[-1] > 1:
        raise ValueError("p-grid must be strictly increasing inside [0, 1]")
    return g


def _as_channel(ch) -> Channel:
    if isinstance(ch, (OneSidedChannel, ChannelConfig)):
        return ch
    return OneSidedChannel(as_kind(ch))


def measure_fields(measure, fields):
    measure = as_measure(measure)
    if measure is Measure.CONCURRENCE:
        return concurrence_fields(*fields)
    if measure is Measure.BELL:
        return bell_fields(*fields)
    return discord_fields(*fields)


def evolved_fields(x: XState, ch, location, grid) -> tuple:
    return channel_fields(x.fields(), _as_channel(ch), location=location, p=np.asarray(grid))


def measure_trace(x: XState, ch, location, measure, grid=None) -> np.ndarray:
    grid = _grid(grid)
    return np.asarray(measure_fields(measure, evolved_fields(x, ch, location, grid)))


# -- sweeps ----------------------------------------------------------------------

@dataclass
class SweepResult:
    p_grid: np.ndarray
    traces: dict = field(default_factory=dict)  # (Measure, QubitLabel) -> array

    def trace(self, measure, location) -> np.ndarray:
        return self.traces[(as_measure(measure), as_label(location))]

    @property
    def measures(self) -> list[Measure]:
        return [m for m in Measure if (m, QubitLabel.U) in self.traces]

    def columns(self) -> list[tuple[str, np.ndarray]]:
        cols = [("p", self.p_grid)]
        for m in self.measures:
            for loc in QubitLabel:
                cols.append((f"{m.value}_{loc.value}", self.traces[(m, loc)]))
        return cols


def sweep(x: XState, ch, measures: Iterable = ("C", "F", "D"), grid=None) -> SweepResult:
    grid = _grid(grid)
    ms = [as_measure(m) for m in measures]
    if not ms:
        raise ValueError("at least one measure is required")
    out = SweepResult(grid)
    for loc in QubitLabel:
        fields = evolved_fields(x, ch, loc, grid)
        for m in Measure:
            if m in ms:
                out.traces[(m, loc)] = np.asarray(measure_fields(m, fields))
    return out


# -- state / dynamics symmetry ------------------------------------------------------

def is_swap_symmetric(x: XState) -> bool:
    return _eq(x.rho22, x.rho33) and abs(x.rho23.imag) <= EPS_ELEM


def dynamics_symmetric(x: XState, kind) -> bool:
    """Whether the channel's action on ``x`` does not depend on its location."""
    kind = as_kind(kind)
    if kind is ChannelKind.DEPHASING:
        return True
    if kind is ChannelKind.AMPLITUDE_DAMPING:
        return _eq(x.rho11, 1.0)  # |00><00| is the fixed point of the closed form
    balanced = _eq(x.rho11, x.rho44) and _eq(x.rho22, x.rho33)
    if kind is ChannelKind.DEPOLARIZING:
        return balanced
    return balanced and _real(x.rho14) and _real(x.rho23)


def dynamics_asymmetry(x: XState, ch, grid=None) -> float:
    """max over the grid of the entrywise gap between U- and L-noise outputs."""
    grid = _grid(grid, VERDICT_GRID)
    u = evolved_fields(x, ch, QubitLabel.U, grid)
    lo = evolved_fields(x, ch, QubitLabel.L, grid)
    return float(max(np.max(np.abs(np.asarray(a) - np.asarray(b))) for a, b in zip(u, lo)))


# -- decay symmetry ----------------------------------------------------------------

@dataclass(frozen=True)
class SymmetryVerdict:
    measure: Measure
    verdict: Verdict
    analytic_basis: str
    analytic: bool | None  # None when no analytic rule covers the case
    numeric_evidence: float
    conjectural: bool = False
    segments_agree: bool | None = None

    @property
    def symmetric(self) -> bool:
        return self.verdict is Verdict.SYMMETRIC

    @property
    def consistent(self) -> bool:
        return self.analytic is None or self.analytic == self.symmetric

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "analytic_basis": self.analytic_basis,
                "analytic": self.analytic, "numeric_evidence": self.numeric_evidence,
                "conjectural": self.conjectural, "segments_agree": self.segments_agree}


_AD, _DEP = ChannelKind.AMPLITUDE_DAMPING, ChannelKind.DEPOLARIZING


def _single_rule(x: XState, kind: ChannelKind, measure: Measure):
    """(basis, prediction, conjectural) for a single one-sided channel."""
    d1, d2, d3, d4 = x.diag
    s23 = _eq(d2, d3)
    if kind is ChannelKind.DEPHASING:
        return "dephasing: location-independent dynamics", True, False
    if measure is Measure.CONCURRENCE:
        if kind is _DEP:
            return "rho22 = rho33 or rho11 = rho44", s23 or _eq(d1, d4), False
        if kind is _AD:
            return "rho22 = rho33 or rho44 = 0", s23 or _eq(d4, 0.0), False
        pred = s23 or _eq(d1, d4)
        if _real(x.rho14) or _real(x.rho23):
            return "real coherence: rho22 = rho33 or rho11 = rho44", pred, False
        return "conjectural: complex rho14 and rho23 never decay symmetrically", False, True
    if measure is Measure.BELL:
        if kind is _DEP:
            return "depolarizing: F location-independent", True, False
        if kind is _AD:
            quarter = _eq(d1, 0.25) and _eq(d4, 0.25)
            return "rho22 = rho33 or rho11 = rho44 = 1/4", s23 or quarter, False
        return "numeric", None, False
    return None  # discord handled separately


def _config_rule(x: XState, cfg: ChannelConfig, measure: Measure):
    kinds = set(cfg.slots)
    if not kinds <= {_AD, _DEP} or measure is Measure.DISCORD:
        return "numeric", None, False
    d1, d2, d3, d4 = x.diag
    s23 = _eq(d2, d3)
    if len(kinds) == 1:
        if cfg.layout == "a":
            return "identical channels on both qubits", True, False
        kind = next(iter(kinds))
        basis, pred, conj = _single_rule(x, kind, measure)
        return f"repeated {kind.value}: {basis}", pred, conj
    if measure is Measure.BELL:
        if cfg.layout == "c" and cfg.slots == (_AD, _DEP, _AD):
            return "layout c with AD-Dep-AD: F location-independent", True, False
        return "mixed channels: rho22 = rho33", s23, False
    if cfg.layout in ("a", "c"):
        return "mixed channels (a/c): rho22 = rho33", s23, False
    both_zero = _eq(d1, 0.0) and _eq(d4, 0.0)
    return "mixed channels (b/d): rho22 = rho33 or rho11 = rho44 = 0", s23 or both_zero, False


def _discord_rule(x: XState, ch: Channel, grid: np.ndarray):
    if isinstance(ch, ChannelConfig) or ch.kind is _AD:
        return "numeric", None, False
    if ch.kind is ChannelKind.DEPHASING:
        return "dephasing: location-independent dynamics", True, False
    # gammas evolve identically for U and L noise; only x differs
    fu = evolved_fields(x, ch, QubitLabel.U, grid)
    fl = evolved_fields(x, ch, QubitLabel.L, grid)
    gu = gamma_fields(*fu, canonical=True)
    gl = gamma_fields(*fl, canonical=True)
    su, sl = segment_code(*gu), segment_code(*gl)
    same = bool(np.all(su == sl))
    # inside C the value depends on x unless |gamma1| = |gamma2|, where it is |gamma1|/2
    x_free = (np.abs(gu[3] ** 2 - gl[3] ** 2) <= 1e-12) | (np.abs(gu[0] ** 2 - gu[1] ** 2) <= 1e-12)
    x_ok = bool(np.all(np.where(su == 2, x_free, True)))
    return "co-segment rule: same segment at every p, x^2 equal inside segment C", \
        same and x_ok, False


def analytic_rule(x: XState, ch, measure, grid=None):
    """(basis, prediction or None, conjectural) from the family rules."""
    ch = _as_channel(ch)
    measure = as_measure(measure)
    if measure is Measure.DISCORD:
        return _discord_rule(x, ch, _grid(grid, VERDICT_GRID))
    if measure is Measure.CONCURRENCE and concurrence_fields(*x.fields()) <= EPS_ZERO:
        # local noise cannot create entanglement
        return "separable initial state: C stays 0", True, False
    if isinstance(ch, ChannelConfig):
        return _config_rule(x, ch, measure)
    return _single_rule(x, ch.kind, measure)


def decay_symmetry(x: XState, ch, measure, grid=None, *,
                   require_analytic: bool = False) -> SymmetryVerdict:
    """Compare the decay of ``measure`` for noise on U against noise on L.

    The verdict itself comes from the numeric sweep (``numeric_evidence`` is
    ``max_p |M_U - M_L|``); the analytic rule is evaluated alongside.
    """
    ch = _as_channel(ch)
    measure = as_measure(measure)
    grid = _grid(grid, VERDICT_GRID)
    if measure is Measure.DISCORD and not x.has_real_coherences:
        raise ComplexCoherence("discord symmetry needs real coherences")
    basis, pred, conj = analytic_rule(x, ch, measure, grid)
    if pred is None and require_analytic:
        raise UnsupportedCombination(f"no analytic rule for {measure.name} under {ch}")
    fu = evolved_fields(x, ch, QubitLabel.U, grid)
    fl = evolved_fields(x, ch, QubitLabel.L, grid)
    tu = np.asarray(measure_fields(measure, fu))
    tl = np.asarray(measure_fields(measure, fl))
    evidence = float(np.max(np.abs(tu - tl)))
    symmetric = evidence < EPS_SYM
    segments_agree = None
    if measure is Measure.DISCORD:
        segments_agree = bool(np.all(segment_code(*gamma_fields(*fu, canonical=True))
                                     == segment_code(*gamma_fields(*fl, canonical=True))))
        symmetric = symmetric and segments_agree
    verdict = Verdict.SYMMETRIC if symmetric else Verdict.ASYMMETRIC
    if pred is not None and pred != symmetric and not conj:
        log.warning("analytic rule %r predicts %s but the sweep gives %s (evidence %.3g)",
                    basis, pred, verdict.value, evidence)
    return SymmetryVerdict(measure, verdict, basis, pred, evidence, conj, segments_agree)


# -- sudden death ------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroSet:
    location: QubitLabel
    intervals: tuple  # maximal closed intervals of positive length where C = 0
    touches: tuple    # isolated zeros (zero-measure crossings)
    initial: float    # C at p = 0

    @property
    def sudden_death(self) -> bool:
        return self.initial > EPS_ZERO and any(a < 1.0 for a, _ in self.intervals)

    @property
    def death_point(self) -> float | None:
        return self.intervals[0][0] if self.sudden_death else None

    def to_json(self) -> dict:
        return {"intervals": [list(iv) for iv in self.intervals],
                "touches": list(self.touches), "sudden_death": self.sudden_death}


def _bisect(pred: Callable[[float], bool], lo: float, hi: float, tol: float = 1e-13) -> float:
    """Boundary between ``pred(lo) == False`` and ``pred(hi) == True``."""
    flo = pred(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid) == flo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def zero_set(x: XState, ch, location=None, n: int = 2001) -> ZeroSet:
    """Where the concurrence of the evolved state vanishes."""
    ch = _as_channel(ch)
    loc = as_label(location if location is not None else ch.location)
    grid = np.linspace(0.0, 1.0, n)

    def conc(p):
        return np.asarray(concurrence_fields(*evolved_fields(x, ch, loc, p)))

    def is_zero(p):
        return bool(conc(float(p)) <= EPS_ZERO)

    zero = conc(grid) <= EPS_ZERO
    intervals, touches = [], []
    i = 0
    while i < n:
        if not zero[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and zero[j + 1]:
            j += 1
        a = grid[i] if i == 0 else _bisect(is_zero, grid[i - 1], grid[i])
        b = grid[j] if j == n - 1 else _bisect(lambda p: not is_zero(p), grid[j], grid[j + 1])
        if b - a >= MIN_INTERVAL:
            intervals.append((float(a), float(b)))
        else:
            touches.append(float(0.5 * (a + b)))
        i = j + 1
    return ZeroSet(loc, tuple(intervals), tuple(touches), float(conc(0.0)))


# -- discord segments --------------------------------------------------------------

@dataclass(frozen=True)
class SegmentTrajectory:
    location: QubitLabel
    p: np.ndarray
    segments: tuple          # DiscordSegment per grid point
    crossings: tuple         # (p*, from, to), refined by bisection
    persistence: tuple | None  # bit-flip window (p_lo, p_hi) for staying in segment A

    def at(self, p: float) -> DiscordSegment:
        return self.segments[int(np.argmin(np.abs(self.p - p)))]


def bitflip_persistence_window(x: XState) -> tuple | None:
    """Segment A survives bit-flip noise for p <= lo or p >= hi.

    Written for ``rho14 * rho23 >= 0``; ``None`` when ``|gamma3| = 0``.
    """
    g3 = abs(1.0 - 2.0 * (x.rho22 + x.rho33))
    if g3 <= EPS_ELEM:
        return None
    w = abs((x.rho23 + x.rho14).real) / g3
    return (0.5 - w, 0.5 + w)


def _segment_at(x, ch, loc, p):
    fields = evolved_fields(x, ch, loc, np.asarray(p, dtype=float))
    return np.asarray(segment_code(*gamma_fields(*fields, canonical=True)))


def segment_trajectory(x: XState, ch, grid=None, location=None) -> SegmentTrajectory:
    if not x.has_real_coherences:
        raise ComplexCoherence("segment analysis needs real coherences")
    ch = _as_channel(ch)
    loc = as_label(location if location is not None else ch.location)
    grid = _grid(grid)
    codes = _segment_at(x, ch, loc, grid)
    crossings = []
    for i in np.nonzero(np.diff(codes))[0]:
        left = int(codes[i])
        pstar = _bisect(lambda p: int(_segment_at(x, ch, loc, p)) != left, grid[i], grid[i + 1])
        crossings.append((float(pstar), _SEGMENTS[left], _SEGMENTS[int(codes[i + 1])]))
    window = None
    if isinstance(ch, OneSidedChannel) and ch.kind is ChannelKind.BIT_FLIP:
        window = bitflip_persistence_window(x)
    return SegmentTrajectory(loc, grid, tuple(_SEGMENTS[int(c)] for c in codes),
                             tuple(crossings), window)


def correlated(fields) -> np.ndarray:
    """False where the state carries no two-body correlations (gamma1 = gamma3 = 0).

    There every segment condition holds with equality, so the A/B/C label is
    only the tie-break and carries no information.
    """
    g1, _, g3, _ = gamma_fields(*fields, canonical=True)
    return (np.abs(g1) > EPS_ELEM) | (np.abs(g3) > EPS_ELEM)


# -- time-invariant discord ----------------------------------------------------------

@dataclass(frozen=True)
class TimeInvariance:
    invariant: bool
    max_deviation: float
    family: str | None
    predicted: bool | None

    @property
    def agrees(self) -> bool | None:
        return None if self.predicted is None else self.predicted == self.invariant


def _invariance_family(x: XState, kind: ChannelKind, loc: QubitLabel):
    g1, g2, g3, xx = (float(v) for v in gamma_fields(*x.fields()))
    if kind is _DEP:
        return "depolarizing: never time-invariant", False
    if kind is ChannelKind.BIT_PHASE_FLIP:
        pred = abs(xx) <= EPS_ELEM and abs(g3) < abs(g2)
        return "bit-phase flip: x = 0 and |gamma3| < |gamma2|", pred
    if kind is ChannelKind.BIT_FLIP:
        if abs(g3) >= abs(g1) > EPS_ELEM:
            return "bit flip: |gamma3| >= |gamma1| > 0", True
        if abs(g3) <= EPS_ELEM and _eq(x.rho23.real, x.rho14.real) and abs(x.rho14) > EPS_ELEM:
            return "bit flip: gamma3 = 0 and rho23 = rho14 != 0 (L noise only)", \
                loc is QubitLabel.L
        return "bit flip: outside both invariant families", False
    return None, None


def time_invariance(x: XState, ch, location=None, grid=None) -> TimeInvariance:
    if not x.has_real_coherences:
        raise ComplexCoherence("time-invariance analysis needs real coherences")
    ch = _as_channel(ch)
    loc = as_label(location if location is not None else ch.location)
    grid = INVARIANCE_GRID if grid is None else _grid(grid)
    d = np.asarray(discord_fields(*evolved_fields(x, ch, loc, grid)))
    dev = float(np.max(np.abs(d - d[0])))
    invariant = dev < EPS_INV
    family, pred = (None, None)
    if isinstance(ch, OneSidedChannel):
        family, pred = _invariance_family(x, ch.kind, loc)
    if pred is not None and pred != invariant:
        log.info("time-invariance: family %r predicts %s, sweep gives %s (max dev %.3g)",
                 family, pred, invariant, dev)
    return TimeInvariance(invariant, dev, family, pred)


def time_invariant_discord(x: XState, ch, location=None) -> bool:
    return time_invariance(x, ch, location).invariant


# -- entropy classification ----------------------------------------------------------

@dataclass(frozen=True)
class SubsystemClassification:
    U: str
    L: str
    S_total: float
    S_U: float
    S_L: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def classify_subsystems(m) -> SubsystemClassification:
    """A subsystem is Classical iff its entropy is strictly below the total."""
    if isinstance(m, XState):
        m = m.to_dense()
    m = check_density_matrix(m, dim=4)
    s_tot = von_neumann_entropy(m)
    s_u = von_neumann_entropy(reduced_qubit(m, QubitLabel.U))
    s_l = von_neumann_entropy(reduced_qubit(m, QubitLabel.L))

    def label(s):
        return "Classical" if s < s_tot - EPS_ELEM else "Quantum"

    return SubsystemClassification(label(s_u), label(s_l), s_tot, s_u, s_l)


# -- channel discrimination -----------------------------------------------------------

PROBES = {
    "fig4_a": max_coherence_state(0.4, 0.0, 0.2, 0.4),
    "fig4_b": max_coherence_state(0.4, 0.2, 0.0, 0.4),
    "fig5_a": max_coherence_state(0.2, 0.65, 0.15, 0.0),
    "fig5_b": max_coherence_state(0.2, 0.15, 0.65, 0.0),
}

_SCREEN = np.linspace(0.0, 1.0, 1001)
CLASS_AC = "configs_ac"
CLASS_BD = "configs_bd"


@dataclass(frozen=True)
class Hypothesis:
    label: str               # channel kind value or config class
    location: QubitLabel
    channel: Channel          # template; p is fitted

    @property
    def is_config(self) -> bool:
        return isinstance(self.channel, ChannelConfig)


def hypotheses() -> list[Hypothesis]:
    """Single channels plus every mixed AD/Dep configuration, both orientations."""
    out = []
    for kind in (_DEP, _AD, ChannelKind.BIT_FLIP):
        for loc in QubitLabel:
            out.append(Hypothesis(kind.value, loc, OneSidedChannel(kind, loc)))
    for cfg in mixed_configs():
        label = CLASS_AC if cfg.layout in ("a", "c") else CLASS_BD
        # the mirror image of a mixed layout-a config is another layout-a config
        locs = (QubitLabel.U,) if cfg.layout == "a" else tuple(QubitLabel)
        for loc in locs:
            out.append(Hypothesis(label, loc, cfg.at(location=loc)))
    return out


@dataclass(frozen=True)
class DiscriminationResult:
    kind: str
    location: QubitLabel
    p_estimate: float
    residual: float
    channel: Channel
    concurrences: dict

    def to_json(self) -> dict:
        return {"kind": self.kind, "location": self.location.value,
                "p_estimate": self.p_estimate, "residual": self.residual,
                "channel": self.channel.at(p=self.p_estimate).to_json(),
                "concurrences": self.concurrences}


class SimulatedBlackBox:
    """Applies a hidden channel and returns the exact output density matrix."""

    def __init__(self, channel: Channel):
        self.__channel = channel

    def __call__(self, state: XState) -> np.ndarray:
        fields = channel_fields(state.fields(), self.__channel)
        return XState.from_fields(fields).to_dense()


def _probe_fields(names: Sequence[str]):
    states = [PROBES[n] for n in names]
    return tuple(np.array([s.fields()[k] for s in states]) for k in range(6))


def _stack(fields) -> np.ndarray:
    d = [np.real(np.asarray(f)) for f in fields[:4]]
    c = [np.asarray(f) for f in fields[4:]]
    return np.stack(d + [np.real(v) for v in c] + [np.imag(v) for v in c], axis=-1)


def _fit_p(resid: Callable[[np.ndarray], np.ndarray], n: int = 1001):
    """Global-then-local minimisation of a residual over p in [0, 1]."""
    grid = np.linspace(0.0, 1.0, n)
    r = resid(grid)
    order = np.argsort(r)[:3]
    best_p, best_r = float(grid[order[0]]), float(r[order[0]])
    for i in order:
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, n - 1)]
        res = minimize_scalar(lambda p: float(resid(np.array([p]))[0]), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-14})
        if res.fun < best_r:
            best_p, best_r = float(res.x), float(res.fun)
    return best_p, best_r


def discriminate_channel(blackbox: Callable[[XState], object], *,
                         candidates: Sequence[Hypothesis] | None = None,
                         eps_fit: float = EPS_FIT) -> DiscriminationResult:
    """Identify an unknown one-sided channel from its action on the four probes.

    Stage one matches the probe concurrences against every hypothesis with p
    free.  Concurrences alone cannot tell hypotheses apart once every probe has
    died, so survivors are refitted on the full tomographic output (the
    blackbox returns the whole state) and must match both.
    """
    names = tuple(PROBES)
    observed = []
    for name in names:
        out = blackbox(PROBES[name])
        observed.append(out if isinstance(out, XState) else from_dense(out))
    obs_fields = tuple(np.array([s.fields()[k] for s in observed]) for k in range(6))
    obs_c = np.asarray(concurrence_fields(*obs_fields))
    obs_s = _stack(obs_fields)
    probe = _probe_fields(names)
    cands = hypotheses() if candidates is None else list(candidates)

    accepted = []
    for hyp in cands:
        def fields_at(p, hyp=hyp):
            return channel_fields(probe, hyp.channel, p=np.asarray(p)[:, None])

        def resid_c(p):
            return np.sum((concurrence_fields(*fields_at(p)) - obs_c) ** 2, axis=-1)

        # cheap grid screen first; |dC/dp| is O(1), so a true match sits far below 0.02
        if math.sqrt(float(np.min(resid_c(_SCREEN)))) > 0.02:
            continue
        _, rc = _fit_p(resid_c)
        if math.sqrt(rc) >= eps_fit:
            continue

        def resid_s(p):
            return np.sum((_stack(fields_at(p)) - obs_s) ** 2, axis=(-1, -2))

        p_hat, _ = _fit_p(resid_s)
        at = fields_at(np.array([p_hat]))
        r_s = float(np.max(np.abs(_stack(at) - obs_s)))
        r_c = float(np.max(np.abs(concurrence_fields(*at) - obs_c)))
        residual = max(r_s, r_c)
        if residual < eps_fit:
            accepted.append((hyp, p_hat, residual))

    conc = {n: float(c) for n, c in zip(names, obs_c)}
    if not accepted:
        raise NoFit("no hypothesis reproduces the probe outputs")
    keys = {(h.label, h.location) for h, _, _ in accepted}
    spread = max(p for _, p, _ in accepted) - min(p for _, p, _ in accepted)
    if len(keys) > 1 or spread > 1e-6:
        raise Ambiguous("several hypotheses reproduce the probe outputs",
                        [(h.label, h.location.value, p) for h, p, _ in accepted])
    hyp, p_hat, residual = min(accepted, key=lambda t: t[2])
    return DiscriminationResult(hyp.label, hyp.location, p_hat, residual, hyp.channel, conc)


def concurrence_decision_tree(blackbox: Callable[[XState], object], tol: float = 1e-9) -> dict:
    """Two-pair decision rule between depolarizing and amplitude damping.

    Equal concurrences on the ``fig4`` pair mean depolarizing, unequal mean
    amplitude damping; the smaller member of the relevant pair gives the side.
    Only meaningful while the probes are still entangled.
    """
    c = {}
    for name, state in PROBES.items():
        out = blackbox(state)
        c[name] = float(concurrence_fields(*(out if isinstance(out, XState)
                                             else from_dense(out)).fields()))
    if abs(c["fig4_a"] - c["fig4_b"]) <= tol:
        kind, pair = _DEP, ("fig5_a", "fig5_b")
    else:
        kind, pair = _AD, ("fig4_a", "fig4_b")
    a, b = c[pair[0]], c[pair[1]]
    if abs(a - b) <= tol:
        location = None
    else:
        location = QubitLabel.U if a < b else QubitLabel.L
    return {"kind": kind, "location": location, "concurrences": c}


# -- report --------------------------------------------------------------------------

def symmetry_report(x: XState, ch, grid=None) -> dict:
    """Everything the classifier knows about one state/channel pair, as JSON."""
    ch = _as_channel(ch)
    grid = _grid(grid)
    single = isinstance(ch, OneSidedChannel)
    verdicts = {}
    for m, name in ((Measure.CONCURRENCE, "concurrence"), (Measure.BELL, "bell"),
                    (Measure.DISCORD, "discord")):
        if m is Measure.DISCORD and not x.has_real_coherences:
            verdicts[name] = None
            continue
        verdicts[name] = decay_symmetry(x, ch, m, np.union1d(grid, VERDICT_GRID)).to_json()
    report = {
        "swap_symmetric": is_swap_symmetric(x),
        "dynamics_symmetric": (dynamics_symmetric(x, ch.kind) if single
                               else dynamics_asymmetry(x, ch) < EPS_SYM),
        "verdicts": verdicts,
        "zero_set": {loc.value: [list(iv) for iv in zero_set(x, ch, loc).intervals]
                     for loc in QubitLabel},
        "time_invariant_discord": None,
        "segments": None,
    }
    if x.has_real_coherences:
        if single:
            report["time_invariant_discord"] = {
                loc.value: time_invariant_discord(x, ch, loc) for loc in QubitLabel}
        segs = {}
        for loc in QubitLabel:
            tr = segment_trajectory(x, ch, grid, loc)
            segs[loc.value] = {"initial": tr.segments[0].value,
                               "crossings": [[p, a.value, b.value] for p, a, b in tr.crossings]}
        report["segments"] = segs
    return report
