"""Landau-Zener simulation of the Kibble-Zurek mechanism on a charge qubit."""

from lzkz.model import (
    HBAR,
    Hamiltonian2,
    PureState,
    QubitParams,
    adiabatic_basis,
    build_hamiltonian,
    energy_gap,
)
from lzkz.pulse import (
    Crossing,
    CrossingReport,
    Waveform,
    apply_lowpass,
    asymptotic_sweep,
    crossing_report,
    evaluate,
    make_double_passage,
)
from lzkz.propagator import (
    DensityMatrix,
    PropagationError,
    PropagationResult,
    prepare_ground,
    propagate_lindblad,
    propagate_unitary,
)
from lzkz.analytic import (
    LZPoint,
    double_passage_paper,
    double_passage_transfer_matrix,
    invert_visibility,
    lz_probability,
    stokes_phase,
    stuckelberg_phase,
    visibility,
)
from lzkz.kz import (
    KZQuench,
    classify_regime,
    defect_density,
    fit_alpha,
    freeze_out_kz,
    freeze_out_lz,
    kz_prediction_for_lz,
    map_lz_to_quench_ratio,
    relaxation_time,
)

__version__ = "0.1.0"
