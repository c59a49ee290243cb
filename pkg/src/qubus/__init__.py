"""Exact small-scale models of a bus-mediated entanglement repeater.

The package keeps every coherent amplitude symbolic so loss and phase
act on labels, not on truncated Fock vectors.  Layers, bottom up:

- states: branched superpositions of photon patterns and bus labels
- optics: beam splitters, phase shifts, cross-phase coupling, detectors
- qnd: nondemolition comparison modules and heralded sources
- parity: the two-photon sorting circuit and its invariant suite
- link: one repeater segment, exact and sampled
- chain: closed-form and Monte-Carlo distribution timing
- cli/config: reproducible command-line runs
"""

from .chain import (
    ChainParams,
    EventLog,
    EventRecord,
    McResult,
    ScheduleResult,
    connection_redundancy,
    final_fidelity,
    mc_distribute,
    memory_space,
    pc_from_efficiencies,
    schedule,
    t_tot,
    t_tot_geometric,
)
from .config import ConfigError, RunConfig, load_config, parse_config
from .link import (
    AttemptBatch,
    AttemptStatistics,
    LinkOutcome,
    LinkParams,
    PortOutcome,
    chi_squared,
    fig3_sweep,
    link_fidelity,
    mean_link_time,
    p_g_exact,
    p_g_from_fidelity,
    simulate_attempt,
    simulate_attempts,
    attempt_statistics,
)
from .optics import (
    DetectorParams,
    IDEAL_DETECTOR,
    beam_split,
    click_probability,
    phase_shift,
    xpm,
)
from .parity import (
    LocalUnitary,
    ModeMatrix,
    build_unitaries,
    full_transform,
    polarization_to_whichpath,
    verify_circuit,
)
from .qnd import (
    QndParams,
    SourceState,
    comparison_error,
    comparison_intensity,
    comparison_success,
    default_probe,
    m_module_outcome,
    port_discriminate,
    purify_source,
    threshold_click,
    weak_multiphoton_residual,
)
from .states import (
    BranchedDensity,
    BranchTerm,
    CoherentLabel,
    HybridKet,
    PhotonPattern,
    coherent_overlap,
    fidelity_with,
    ket,
    loss_channel,
    norm,
    photon_pattern,
    project_pattern,
)

__version__ = "0.1.0"
