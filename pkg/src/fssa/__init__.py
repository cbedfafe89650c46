"""Functional singular spectrum analysis toolkit."""

from .basis import (
    BasisSystem,
    FunctionalTimeSeries,
    build_basis,
    gcv_select_dof,
    gram_matrix,
    inner_product,
    project_samples,
)
from .core import (
    Decomposition,
    Embedding,
    GroupedOperator,
    Grouping,
    build_normal_matrices,
    decompose,
    elementary_operator,
    embed,
    group_operator,
    hankelize,
    reconstruct,
)
from .diagnostics import (
    EigentripleSummary,
    WCorrelationMatrix,
    eigentriple_summary,
    w_inner,
    wcor_matrix,
)
from .errors import (
    ConfigurationError,
    DegenerateSeriesError,
    DimensionError,
    FSSAError,
    ProjectionError,
    WindowLengthError,
)
from .simulation import (
    BenchmarkReport,
    SimConfig,
    gen_noise,
    gen_periodic,
    mssa_reconstruct,
    rmse,
    run_benchmark,
)

__version__ = "0.1.0"

__all__ = [
    "BasisSystem",
    "FunctionalTimeSeries",
    "build_basis",
    "gram_matrix",
    "project_samples",
    "gcv_select_dof",
    "inner_product",
    "Embedding",
    "Decomposition",
    "Grouping",
    "GroupedOperator",
    "embed",
    "build_normal_matrices",
    "decompose",
    "elementary_operator",
    "group_operator",
    "hankelize",
    "reconstruct",
    "WCorrelationMatrix",
    "EigentripleSummary",
    "w_inner",
    "wcor_matrix",
    "eigentriple_summary",
    "SimConfig",
    "BenchmarkReport",
    "gen_periodic",
    "gen_noise",
    "rmse",
    "mssa_reconstruct",
    "run_benchmark",
    "FSSAError",
    "ConfigurationError",
    "DimensionError",
    "WindowLengthError",
    "ProjectionError",
    "DegenerateSeriesError",
    "__version__",
]
