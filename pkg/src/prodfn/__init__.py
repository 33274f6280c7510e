"""Aggregate production-function estimation on short annual series.

The package covers the full chain from raw annual data to an economic
reading of a fitted model: series construction (geometric interpolation,
perpetual-inventory capital), unit-root testing, Cobb-Douglas / translog
style functional forms, OLS and AR(1) estimation, residual diagnostics,
Engle-Granger residual tests, elasticities and a weighted model scan.

>>> import prodfn
>>> d = prodfn.generate_replication_dataset(prodfn.ReplicationParams(), seed=0)
>>> len(d)
31
"""

from . import errors
from .analysis import (
    ElasticityProfile,
    EngleGrangerResult,
    RegularityReport,
    ReplicationParams,
    ScanRow,
    ScanWeights,
    TechnicalChange,
    calibrate_innovation_sd,
    classify_rts,
    elasticities,
    engle_granger,
    generate_replication_dataset,
    model_selection_scan,
    regularity_check,
    returns_to_scale,
    technical_change,
)
from .construction import (
    BenchmarkTable,
    PerpetualInventoryConfig,
    assemble_dataset,
    capital_from_investment,
    extend_capital_stock,
    geometric_interpolate,
    implied_investment,
)
from .dataio import RawBundle, construct_dataset, load_dataset_csv, write_dataset_csv
from .diagnostics import (
    DiagnosticsReport,
    TestRecord,
    acf_pacf,
    breusch_godfrey,
    breusch_pagan_godfrey,
    collinearity_screen,
    jarque_bera,
    mean_residual,
    residual_regressor_correlation,
    run_diagnostics,
)
from .errors import ProdFnError
from .estimation import FitResult, durbin_watson, estimate_ar1, fit_model, hildreth_lu, ols, predict
from .forms import ALL_FORMS, DesignMatrix, FunctionalForm, ModelSpec, build_design
from .pipeline import PipelineConfig, ReportBundle, run_pipeline
from .report import emit_report, render_text
from .series import AnnualSeries, Dataset, cagr, difference, growth_rate, lag, log_transform, mean_growth
from .unitroot import (
    UnitRootResult,
    UnitRootSpec,
    adf_test,
    critical_values,
    integration_order,
    mackinnon_pvalue,
    pp_test,
    unit_root_test,
)

__version__ = "0.1.0"
