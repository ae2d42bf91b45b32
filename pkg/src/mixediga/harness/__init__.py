"""Study runner: configuration, sweeps, table reproduction and result emission."""
from .config import ConfigError, StudyConfig, dump_config, load_config, parse_config_text
from .study import (
    HEADER,
    TABLE_OPERATORS,
    ErrorReport,
    ErrorRow,
    SpectrumCurve,
    TableReport,
    eigenfunction_error,
    mode_l2_error,
    multiplicity_audit,
    run_blend_search,
    run_convergence,
    run_dispersion,
    run_spectrum,
    table_config,
)
