"""Exception hierarchy shared by all solver components."""


class DuctGRPError(Exception):
    """Base class for every error raised by :mod:`ductgrp`."""


class NonPhysicalState(DuctGRPError, ValueError):
    """Density, pressure or internal energy is not positive."""


class DegenerateState(DuctGRPError, ValueError):
    """Riemann invariants describe a vacuum (psi <= phi)."""


class VacuumFormation(DuctGRPError):
    """The Riemann problem opens a vacuum between the two waves."""


class NoConvergence(DuctGRPError):
    """An iterative solver did not reach its tolerance."""


class NewtonDivergence(NoConvergence):
    """Newton iteration for the sonic characteristic foot failed."""


class StiffnessFailure(NoConvergence):
    """Adaptive ODE integration gave up."""


class NoRoot(DuctGRPError, ValueError):
    """A bracketed root does not exist (for instance area below the throat)."""


class OutOfFan(DuctGRPError, ValueError):
    """A fan parameter lies outside the rarefaction."""


class NearVacuumFan(DuctGRPError):
    """The fan tail reaches the vacuum limit psi_L - beta -> 0."""


class BranchUnsupported(DuctGRPError):
    """No tabulated closed form exists for the requested gamma branch."""


class SingularSystem(DuctGRPError, ArithmeticError):
    """Gauss-Jordan elimination met a negligible pivot."""
