class SolverError(RuntimeError):
    """An eigen- or linear solve did not meet its residual tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class IdentityNotExcludedError(ValueError):
    """The subspace contains the identity field (numerically)."""

    def __init__(self, residual):
        super().__init__(f"identity not excluded: H^s distance of id to the subspace is {residual:.3e}")
        self.residual = residual
