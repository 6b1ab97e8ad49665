"""Linear term rewriting on bracketed words, with the averaging-operator
rewriting systems and the basis of the free averaging algebra."""

from .engine import (
    BudgetExceeded,
    ClosureReport,
    ConfluenceReport,
    Mode,
    NonTermination,
    RewriteSystem,
    RuleInstance,
    closure,
    find_redexes,
    gs_verdict,
    joinable,
    local_confluence_report,
    normalize,
    normalize_trace,
    one_step,
    reducts,
    rewrite_once,
)
from .linear import LinComb, monomial, parse_poly, show_poly
from .order import DEFAULT_ORDER, OrderHandle, Ordering, audit_orientation, compare, dt_order
from .terms import Placement, Relation, Variant, degree, enumerate_words, parse, show

__version__ = "0.1.0"
