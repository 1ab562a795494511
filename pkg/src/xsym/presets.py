"""Named initial states and the data sets behind the figures and Table 1."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import SweepResult, classify_subsystems, decay_symmetry, sweep
from .channels import ChannelKind, OneSidedChannel
from .correlations import concurrence_x
from .qmat import XState, bell_state, max_coherence_state, maximally_mixed, random_x_state

_AD, _DEP = ChannelKind.AMPLITUDE_DAMPING, ChannelKind.DEPOLARIZING

STATES = {
    "bell": bell_state(),
    "mixed": maximally_mixed(),
    "fig3": max_coherence_state(0.35, 0.4, 0.05, 0.2),
    "fig4_a": max_coherence_state(0.4, 0.0, 0.2, 0.4),
    "fig4_b": max_coherence_state(0.4, 0.2, 0.0, 0.4),
    "fig5_a": max_coherence_state(0.2, 0.65, 0.15, 0.0),
    "fig5_b": max_coherence_state(0.2, 0.15, 0.65, 0.0),
    "fig6": max_coherence_state(0.9, 0.0, 0.08, 0.02),
    "fig7": max_coherence_state(0.0, 0.1875, 0.8125, 0.0),
    "worked": XState(0.5, 0.05, 0.05, 0.4, 0.1, 0.05),
}

FIGURES = {
    "3": (("fig3",), (_AD,), ("C",)),
    "4": (("fig4_a", "fig4_b"), (_DEP, _AD), ("C",)),
    "5": (("fig5_a", "fig5_b"), (_AD, _DEP), ("C",)),
    "6": (("fig6",), (_AD, _DEP), ("C",)),
    "7": (("fig7",), (_AD,), ("F", "C")),
}

FIGURE_GRID = np.linspace(0.0, 1.0, 501)


def preset_state(name: str) -> XState:
    try:
        return STATES[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(STATES)}") from None


@dataclass(frozen=True)
class FigurePanel:
    name: str
    state: XState
    kind: ChannelKind
    data: SweepResult


def figure_data(fig_id, grid=None) -> tuple[list[FigurePanel], dict]:
    """Sweeps for one figure plus any extra scalar data (entropies for 6)."""
    fig_id = str(fig_id)
    if fig_id not in FIGURES:
        raise KeyError(f"unknown figure {fig_id!r}; choose from {', '.join(FIGURES)}")
    names, kinds, measures = FIGURES[fig_id]
    grid = FIGURE_GRID if grid is None else grid
    panels = [FigurePanel(n, STATES[n], k, sweep(STATES[n], OneSidedChannel(k), measures, grid))
              for n in names for k in kinds]
    extra = {}
    if fig_id == "6":
        extra["entropies"] = classify_subsystems(STATES["fig6"]).to_json()
    return panels, extra


# -- Table 1 ----------------------------------------------------------------------

TABLE1_FAMILIES = {
    1: "rho22 = rho33",
    2: "rho22 != rho33, rho11 = rho44 != 0",
    3: "rho22 != rho33, rho11 = rho44 = 0",
    4: "rho22 != rho33, rho11 != rho44 = 0",
}

# (kind, measure) -> expected symmetric flag per family
TABLE1_EXPECTED = {
    (_DEP, "C"): (True, True, True, False),
    (_DEP, "F"): (True, True, True, True),
    (_AD, "C"): (True, False, True, True),
    (_AD, "F"): (True, False, False, False),
}

_MIN_GAP = 1e-2


def family_diag(rng: np.random.Generator, family: int) -> tuple:
    """Populations drawn uniformly inside one Table 1 column family."""
    while True:
        d = rng.dirichlet(np.ones(4))
        if family == 1:
            d[1] = d[2] = 0.5 * (d[1] + d[2])
            return tuple(d)
        if family == 2:
            d[0] = d[3] = 0.5 * (d[0] + d[3])
        elif family == 3:
            d[0] = d[3] = 0.0
        elif family == 4:
            d[3] = 0.0
        else:
            raise ValueError(f"family must be 1..4, got {family}")
        d = d / d.sum()
        if abs(d[1] - d[2]) < _MIN_GAP or (family == 4 and d[0] < _MIN_GAP):
            continue
        return tuple(d)


def family_state(rng: np.random.Generator, family: int, min_concurrence: float = 0.05) -> XState:
    """An entangled representative of a Table 1 family.

    Entanglement decay is only observable on states that start entangled, so
    samples below ``min_concurrence`` are rejected.
    """
    while True:
        x = random_x_state(rng, coherences="complex", frac=(0.5, 1.0), diag=family_diag(rng, family))
        if concurrence_x(x) >= min_concurrence:
            return x


def table1(n: int = 100, seed: int = 42, grid=None) -> list[dict]:
    """Verdict counts for every Table 1 cell over ``n`` sampled states per family."""
    rng = np.random.default_rng(seed)
    rows = []
    for family in TABLE1_FAMILIES:
        states = [family_state(rng, family) for _ in range(n)]
        for (kind, measure), expected in TABLE1_EXPECTED.items():
            verdicts = [decay_symmetry(x, OneSidedChannel(kind), measure, grid) for x in states]
            n_sym = sum(v.symmetric for v in verdicts)
            want = expected[family - 1]
            rows.append({"kind": kind.value, "measure": measure, "family": family,
                         "expected": "Symmetric" if want else "Asymmetric",
                         "n_symmetric": n_sym, "n": n,
                         "misclassified": n - n_sym if want else n_sym,
                         "inconsistent": sum(not v.consistent for v in verdicts)})
    return rows
