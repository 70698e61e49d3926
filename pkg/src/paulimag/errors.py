"""Exception hierarchy.

Every domain failure derives from ``PauliError`` so the CLI can map it to a
structured error object with exit code 1.
"""


class PauliError(Exception):
    """Base class for domain errors."""

    reason = "error"


class UnsupportedShell(PauliError):
    reason = "unsupported_shell"


class InfeasibleSymmetry(PauliError):
    reason = "infeasible_symmetry"


class DimensionMismatch(PauliError):
    reason = "dimension_mismatch"


class Infeasible(PauliError):
    reason = "infeasible"


class Unbounded(PauliError):
    reason = "unbounded"


class UnboundedPolytope(Unbounded):
    reason = "unbounded_polytope"


class DegeneratePolytope(PauliError):
    reason = "degenerate_polytope"


class HighSpinInfeasible(Infeasible):
    reason = "high_spin_infeasible"


class CollapseToSingletState(PauliError):
    reason = "collapse_to_singlet"


class InvalidPopulations(PauliError):
    reason = "invalid_populations"


class RangeError(PauliError):
    reason = "out_of_range"


class NoRootAboveOne(PauliError):
    reason = "no_root_above_one"


class NonConvergence(PauliError):
    reason = "non_convergence"

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class EmptyPolytope(Infeasible):
    reason = "empty_polytope"


class OutOfRange(RangeError):
    reason = "out_of_range"


class DegenerateFit(PauliError):
    reason = "degenerate_fit"
