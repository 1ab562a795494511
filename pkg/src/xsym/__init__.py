"""Location symmetry of correlation decay for two-qubit X states under one-sided noise."""
from .analysis import (DiscriminationResult, Measure, SweepResult, SymmetryVerdict, ZeroSet,
                       classify_subsystems, concurrence_decision_tree, decay_symmetry,
                       discriminate_channel, dynamics_symmetric, is_swap_symmetric,
                       segment_trajectory, sweep, symmetry_report, time_invariant_discord,
                       zero_set)
from .channels import (ChannelConfig, ChannelKind, OneSidedChannel, apply_channel, apply_config,
                       apply_kraus, evolve_closed_form, evolve_kraus, kraus_ops)
from .correlations import (bell_f_x, bell_oracle, concurrence_oracle, concurrence_x,
                           discord_oracle, discord_x, gamma_coords)
from .errors import *  # noqa: F403
from .kernels import BACKEND_NAME
from .qmat import QubitLabel, XState, from_dense, max_coherence_state, random_x_state

__version__ = "0.1.0"
