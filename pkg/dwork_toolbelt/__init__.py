from .errors import (
    BudgetExceeded,
    ConfigError,
    DomainError,
    DworkError,
    IntegralityError,
    PrecisionExhausted,
    SlopeAnalysisError,
)
from .padic import PrecisionProfile, UnramifiedApprox, ZpApprox, ZpTSeries
from .series import AFFINE_LINE, TORUS, TSeriesPoly, XSeries
from .splitting import TowerInput, build_Ef
from .dwork import NuclearMatrix, assemble_matrix
from .fredholm import compare_lfunctions, trace_formula_lfun
from .oracle import exp_sum, oracle_lfun
from .slopes import newton_polygon, slope_decomposition
