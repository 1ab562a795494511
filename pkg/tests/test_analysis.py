import logging

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import KINDS, x_states
from xsym.analysis import (CLASS_AC, CLASS_BD, DEFAULT_GRID, Measure, SimulatedBlackBox, Verdict,
                           bitflip_persistence_window, classify_subsystems,
                           concurrence_decision_tree, decay_symmetry, discriminate_channel,
                           dynamics_asymmetry, dynamics_symmetric, hypotheses,
                           is_swap_symmetric, segment_trajectory, sweep, symmetry_report,
                           time_invariance, time_invariant_discord, zero_set)
from xsym.channels import ChannelConfig, OneSidedChannel, mixed_configs
from xsym.correlations import DiscordSegment, concurrence_x
from xsym.errors import Ambiguous, ComplexCoherence, NoFit, UnsupportedCombination
from xsym.presets import STATES, TABLE1_EXPECTED, family_state, table1
from xsym.qmat import XState, bell_state, random_x_state

WORKED = STATES["worked"]


def entangled(rng, **kw):
    while True:
        x = random_x_state(rng, frac=(0.3, 1.0), **kw)
        if concurrence_x(x) >= 0.05:
            return x


# -- swap and dynamics symmetry --------------------------------------------------------

def test_swap_symmetry_examples():
    assert is_swap_symmetric(bell_state())
    assert not is_swap_symmetric(STATES["fig3"])
    assert not is_swap_symmetric(XState(0.25, 0.25, 0.25, 0.25, 0, 0.1j))


def test_dynamics_symmetry_examples():
    assert dynamics_symmetric(bell_state(), "dep")
    assert not dynamics_symmetric(bell_state(), "ad")
    assert dynamics_symmetric(XState(1, 0, 0, 0), "ad")
    assert not dynamics_symmetric(XState(0, 0, 0, 1), "ad")
    assert dynamics_symmetric(STATES["fig3"], "pd")


@given(x_states(), st.sampled_from(KINDS))
def test_dynamics_predicate_matches_sweep(x, kind):
    assert dynamics_symmetric(x, kind) == (dynamics_asymmetry(x, kind) < 1e-10)


@pytest.mark.parametrize("kind", ["dep", "bf", "bpf"])
def test_dynamics_predicate_inside_families(rng, kind):
    """Families where the predicate holds are measure-zero, so build them directly."""
    for _ in range(20):
        a, b = rng.dirichlet([1, 1])
        c14, c23 = rng.uniform(-1, 1) * a / 2, rng.uniform(-1, 1) * b / 2
        x = XState(a / 2, b / 2, b / 2, a / 2, c14, c23)
        assert dynamics_symmetric(x, kind)
        assert dynamics_asymmetry(x, kind) < 1e-10


# -- decay symmetry ----------------------------------------------------------------

def test_decay_symmetry_examples():
    a4 = STATES["fig4_a"]
    assert decay_symmetry(a4, "dep", "C").verdict is Verdict.SYMMETRIC
    assert decay_symmetry(a4, "ad", "C").verdict is Verdict.ASYMMETRIC
    assert decay_symmetry(STATES["fig3"], "dep", "F").symmetric


@pytest.mark.parametrize("kind", ["dep", "ad", "bf", "bpf", "pd"])
@pytest.mark.parametrize("measure", ["C", "F"])
def test_analytic_and_numeric_agree(rng, kind, measure):
    for i in range(60):
        x = entangled(rng, coherences="real" if i % 2 else "complex")
        v = decay_symmetry(x, kind, measure)
        assert v.consistent, (x, v)


@pytest.mark.parametrize("kind", ["dep", "bf", "bpf", "pd"])
def test_discord_co_segment_rule(rng, kind):
    for _ in range(60):
        v = decay_symmetry(random_x_state(rng, coherences="real"), kind, "D")
        assert v.analytic is not None and v.consistent


def test_discord_needs_co_segment():
    """Same gammas under dep on U or L; x != 0 inside segment C breaks symmetry."""
    x = XState(0.34, 0.06, 0.4, 0.2, -0.07, 0.04)
    v = decay_symmetry(x, "dep", "D")
    assert not v.symmetric and v.consistent and v.numeric_evidence > 1e-3
    y = XState(0.25, 0.25, 0.25, 0.25, 0.2, 0.05)  # x = 0
    assert decay_symmetry(y, "dep", "D").symmetric


@pytest.mark.parametrize("cfg", mixed_configs())
def test_config_rules(rng, cfg):
    for loc in "UL":
        for _ in range(15):
            x = entangled(rng)
            for m in "CF":
                assert decay_symmetry(x, cfg.at(location=loc), m).consistent


def test_config_bell_exception(rng):
    cfg = ChannelConfig("c", ("ad", "dep", "ad"))
    for _ in range(50):
        v = decay_symmetry(random_x_state(rng), cfg, "F")
        assert v.symmetric and v.analytic


def test_identical_copies_behave_like_single(rng):
    x = entangled(rng)
    for kind in ("ad", "dep"):
        single = decay_symmetry(x, kind, "C").symmetric
        for layout, n in (("b", 2), ("d", 3)):
            assert decay_symmetry(x, ChannelConfig(layout, (kind,) * n), "C").symmetric == single


def test_bitflip_conjectural(rng):
    x = XState(0.4, 0.1, 0.1, 0.4, 0.3j, 0.05 * np.exp(0.7j))
    assert concurrence_x(x) > 0.1
    v = decay_symmetry(x, "bf", "C")
    assert v.conjectural and not v.symmetric
    with pytest.raises(UnsupportedCombination):
        decay_symmetry(x, "bf", "F", require_analytic=True)


def test_bell_branch_switch_near_endpoints():
    """The F asymmetry under AD can hide in a sliver near p = 1 that a coarse grid misses."""
    x = XState(0.4011432847979972, 0.08106454175366644, 0.11664888865033916, 0.4011432847979972,
               0.34874780903281183 - 0.04200162475966126j, 0.047982608204358734 + 0.011619109346526001j)
    coarse = decay_symmetry(x, "ad", "F", grid=DEFAULT_GRID)
    fine = decay_symmetry(x, "ad", "F")
    assert fine.analytic is False and fine.consistent and not fine.symmetric
    assert coarse.numeric_evidence < fine.numeric_evidence


def test_discord_rejects_complex():
    with pytest.raises(ComplexCoherence):
        decay_symmetry(XState(0.25, 0.25, 0.25, 0.25, 0.1j), "dep", "D")


def test_inconsistency_is_logged(caplog, rng):
    x = family_state(rng, 2)
    with caplog.at_level(logging.WARNING, logger="xsym.analysis"):
        v = decay_symmetry(x, "ad", "C", grid=np.array([0.0, 1.0]))
    # both endpoints coincide for U and L, so the grid cannot see the asymmetry
    assert not v.consistent
    assert any("analytic rule" in r.message for r in caplog.records)


def test_table1_small():
    rows = table1(n=20, seed=7)
    assert len(rows) == 16
    assert all(r["misclassified"] == 0 and r["inconsistent"] == 0 for r in rows)


def test_no_hierarchy_witness(rng):
    x = family_state(rng, 4)
    dep = (decay_symmetry(x, "dep", "C").symmetric, decay_symmetry(x, "dep", "F").symmetric)
    ad = (decay_symmetry(x, "ad", "C").symmetric, decay_symmetry(x, "ad", "F").symmetric)
    assert dep == (False, True) and ad == (True, False)
    assert TABLE1_EXPECTED


# -- sweeps and zero sets ------------------------------------------------------------

def test_sweep_shapes():
    res = sweep(bell_state(), "pd", ("C", "D"))
    assert [n for n, _ in res.columns()] == ["p", "C_U", "C_L", "D_U", "D_L"]
    assert all(len(c) == len(DEFAULT_GRID) for _, c in res.columns())
    assert res.measures == [Measure.CONCURRENCE, Measure.DISCORD]
    with pytest.raises(ValueError):
        sweep(bell_state(), "pd", ("C",), grid=[0.5, 0.2])


def test_zero_set_fig3():
    zl = zero_set(STATES["fig3"], OneSidedChannel("ad", "L"))
    assert zl.sudden_death and zl.death_point == pytest.approx(0.625, abs=1e-8)
    zu = zero_set(STATES["fig3"], OneSidedChannel("ad"), "U")
    assert not zu.sudden_death and zu.intervals == ()


def test_zero_set_bell_depolarizing():
    for loc in "UL":
        z = zero_set(bell_state(), "dep", loc)
        assert len(z.intervals) == 1
        a, b = z.intervals[0]
        assert a == pytest.approx(2 / 3, abs=1e-8) and b == 1.0


def test_dephasing_touch_is_not_sudden_death():
    z = zero_set(bell_state(), "pd", "U")
    assert z.intervals == () and z.touches == pytest.approx((0.5,), abs=1e-9)
    assert not z.sudden_death


def test_zero_set_intervals_sorted(rng):
    for _ in range(30):
        z = zero_set(random_x_state(rng), "ad", "L", n=401)
        flat = [v for iv in z.intervals for v in iv]
        assert flat == sorted(flat)


# -- segments and time invariance ---------------------------------------------------------

def test_bitflip_persistence_window():
    lo, hi = bitflip_persistence_window(WORKED)
    assert lo == pytest.approx(0.5 - 0.15 / 0.8, abs=1e-12)
    assert hi == pytest.approx(0.5 + 0.15 / 0.8, abs=1e-12)
    tr = segment_trajectory(WORKED, OneSidedChannel("bf", "U"))
    assert [c[0] for c in tr.crossings] == pytest.approx([lo, hi], abs=1e-8)
    assert tr.at(0.2) is DiscordSegment.A and tr.at(0.5) is not DiscordSegment.A


def test_bell_state_stays_in_a():
    tr = segment_trajectory(bell_state(), OneSidedChannel("dep"))
    assert set(tr.segments[:-1]) == {DiscordSegment.A} and tr.crossings[:-1] == ()


def test_x_zero_gives_identical_segments(rng):
    for _ in range(20):
        x = random_x_state(rng, coherences="real", diag=(0.3, 0.2, 0.3, 0.2))
        u = segment_trajectory(x, "dep", location="U").segments
        lo = segment_trajectory(x, "dep", location="L").segments
        assert u == lo


def test_time_invariance_examples():
    assert not time_invariant_discord(WORKED, "dep")
    fam2 = XState(0.3, 0.25, 0.25, 0.2, 0.1, 0.1)
    assert time_invariant_discord(fam2, OneSidedChannel("bf", "L"))
    assert not time_invariant_discord(fam2, OneSidedChannel("bf", "U"))
    t = time_invariance(fam2, OneSidedChannel("bf", "U"))
    assert t.agrees


def test_bitphase_family_freezes_then_collapses():
    x = XState(0.25, 0.25, 0.25, 0.25, 0.05, 0.2)
    t = time_invariance(x, OneSidedChannel("bpf", "U"))
    assert not t.invariant and t.predicted and t.agrees is False


def test_bitflip_family_one_tension():
    """|g3| >= |g1| > 0: D is frozen only inside the persistence window."""
    t = time_invariance(WORKED, OneSidedChannel("bf", "U"))
    assert t.predicted and not t.invariant


def test_time_invariance_rejects_complex():
    with pytest.raises(ComplexCoherence):
        time_invariant_discord(XState(0.25, 0.25, 0.25, 0.25, 0.1j), "bf")


# -- entropy classification ---------------------------------------------------------

def test_classify_examples():
    c = classify_subsystems(bell_state())
    assert (c.U, c.L) == ("Quantum", "Quantum")
    c = classify_subsystems(STATES["fig6"])
    assert {c.U, c.L} == {"Classical", "Quantum"}
    assert c.S_total == pytest.approx(0.402, abs=1e-3)
    prod = classify_subsystems(XState(1, 0, 0, 0))
    assert (prod.U, prod.L) == ("Quantum", "Quantum")


# -- discrimination -----------------------------------------------------------------

@pytest.mark.parametrize("kind, loc, p", [("ad", "U", 0.3), ("dep", "L", 0.5), ("dep", "L", 0.7),
                                          ("bf", "U", 0.95), ("ad", "L", 0.05)])
def test_discrimination_recovers_channel(kind, loc, p):
    hidden = OneSidedChannel(kind, loc, p)
    r = discriminate_channel(SimulatedBlackBox(hidden))
    assert r.kind == hidden.kind.value and r.location.value == loc
    assert abs(r.p_estimate - p) < 1e-6 and r.residual < 1e-9


def test_discrimination_configs():
    r = discriminate_channel(SimulatedBlackBox(ChannelConfig("d", ("ad", "dep", "dep"), 0.4, "L")))
    assert r.kind == CLASS_BD and r.location.value == "L"
    r = discriminate_channel(SimulatedBlackBox(ChannelConfig("c", ("ad", "ad", "dep"), 0.3)))
    assert r.kind == CLASS_AC


def test_dephasing_is_rejected():
    with pytest.raises((NoFit, Ambiguous)):
        discriminate_channel(SimulatedBlackBox(OneSidedChannel("pd", "U", 0.4)))


def test_ambiguous_when_hypotheses_coincide():
    # at p = 0 every hypothesis reproduces the identity
    with pytest.raises(Ambiguous) as err:
        discriminate_channel(SimulatedBlackBox(OneSidedChannel("ad", "U", 0.0)))
    assert len(err.value.candidates) > 2


def test_blackbox_hides_channel():
    box = SimulatedBlackBox(OneSidedChannel("ad", "U", 0.3))
    assert not any("channel" in k for k in vars(box) if not k.startswith("_SimulatedBlackBox"))


def test_decision_tree():
    t = concurrence_decision_tree(SimulatedBlackBox(OneSidedChannel("ad", "U", 0.3)))
    assert t["kind"].value == "amplitude_damping" and t["location"].value == "U"
    t = concurrence_decision_tree(SimulatedBlackBox(OneSidedChannel("dep", "L", 0.2)))
    assert t["kind"].value == "depolarizing" and t["location"].value == "L"


# -- report -------------------------------------------------------------------------

def test_symmetry_report():
    r = symmetry_report(bell_state(), "dep")
    assert all(v["verdict"] == "Symmetric" for v in r["verdicts"].values())
    r = symmetry_report(STATES["fig3"], "ad")
    assert r["verdicts"]["concurrence"]["verdict"] == "Asymmetric"
    assert r["zero_set"]["L"] and not r["zero_set"]["U"]
