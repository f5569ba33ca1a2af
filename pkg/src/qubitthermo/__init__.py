"""Open-system qubit dynamics with dual heat/work thermodynamic bookkeeping."""

from .dynamics import (
    IntegrationError,
    IntegratorConfig,
    LindbladModel,
    PositivityError,
    Trajectory,
    dephasing_model,
    exchange_unitary_model,
    integrate,
    lindblad_rhs,
    liouvillian_matrix,
    planck_occupation,
    thermal_bath_model,
    two_atom_model,
)
from .states import (
    BlochState,
    EffectiveField,
    PhysicalityError,
    Spectrum,
    UnitSystem,
    UNITS,
    bloch_to_density,
    density_to_bloch,
    eigendecompose,
    entropy_of_modulus,
    field_hamiltonian,
    internal_energy,
    l1_coherence,
    partial_trace,
    polar_angles,
    von_neumann_entropy,
)
from .thermo import (
    EnvironmentSpec,
    LedgerAudit,
    ThermoLedger,
    ThermoSample,
    annotate_trajectory,
    boundary_entropy_rate,
    entropy_production_p1_rate,
    equilibrium_bloch,
    heat_capacity_fd,
    heat_capacity_p1,
    heat_capacity_p2,
    p1_rates,
    p2_rates_bloch,
    p2_rates_spectral,
    rotational_work_rate,
    temperature_p1,
    temperature_p2,
)
from .scenarios import (
    BUILTIN_NAMES,
    ConfigError,
    RunReport,
    ScenarioConfig,
    audit_report,
    builtin_config,
    parse_config,
    run_scenario,
)
from .csvio import CSV_COLUMNS, read_csv, write_csv
from .svgchart import write_svg

__version__ = "0.1.0"
