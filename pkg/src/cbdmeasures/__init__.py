"""Degrees of contextuality for systems of dichotomous random variables."""

from .coupling import (
    IncidenceMatrix,
    build_complete_matrix,
    build_reduced_matrix,
    complete_vector,
    reduced_vector,
)
from .cyclic import CyclicSpec, cnt1_closed_form, cyclic_format, make_cyclic, random_cyclic_spec, s_odd
from .errors import *  # noqa: F401,F403
from .fileio import emit_system, parse_system_file, parse_system_text
from .lp import LpProblem, LpSolution, solve
from .measures import (
    MEASURES,
    MeasureReport,
    cnt1,
    cnt2,
    cnt3,
    cntf,
    is_contextual,
    measure,
    ncnt1_probe,
    ncnt2,
)
from .oracle import (
    CheckReport,
    column_elimination_noncontextuality,
    crosscheck_modes,
    named_systems,
    random_system,
)
from .system import (
    ConnectionCoupling,
    System,
    SystemFormat,
    bunch_marginal,
    multimaximal_distribution,
    multimaximal_marginal,
    validate_system,
)

__version__ = "0.1.0"
