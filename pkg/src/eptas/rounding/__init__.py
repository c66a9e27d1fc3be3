from .milp import emit_milp
from .optimize import SearchLimit, optimize_scheme, scheme_feasible
from .scheme import (RoundedInstance, RoundingScheme, VerifyReport, dump_scheme, interval_bound,
                     irreducible_configs, iter_configs, load_scheme, round_jobs, standard_scheme,
                     support_bound, verify_scheme)

__all__ = [
    "RoundedInstance", "RoundingScheme", "SearchLimit", "VerifyReport", "dump_scheme", "emit_milp",
    "interval_bound", "irreducible_configs", "iter_configs", "load_scheme", "optimize_scheme",
    "round_jobs", "scheme_feasible", "standard_scheme", "support_bound", "verify_scheme",
]
