"""Covariate adjustment audit: FWL residualization, Type III sums of squares,
variance-components ledgers and randomization-imbalance Monte Carlo."""

__version__ = "0.1.0"

from .dataset import Dataset, column_summary, load_csv, read_csv, write_csv
from .decomposition import (
    Audit,
    BallantineAreas,
    R2Routes,
    SSDecomposition,
    VarianceLedger,
    audit,
    ballantine_areas,
    r2_routes,
    type3_decomposition,
    variance_ledger,
)
from .errors import *  # noqa: F401,F403
from .linalg import cholesky, sample_covariance, solve_spd
from .randomization import (
    Policy,
    TrialConfig,
    imbalance_rejection_rate,
    replication_study,
    simulate_trial,
)
from .regression import (
    DesignSpec,
    FittedModel,
    ResidualizedRegressor,
    fit_ols,
    fwl_coefficient,
    residualize,
    standardized_coefficients,
)
from .simulate import (
    CovarianceSpec,
    SimulationConfig,
    generate_mvn,
    orthogonalize_columns,
    preset_scenario,
)
