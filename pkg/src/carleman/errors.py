"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the region where the operation is defined."""


class SingularityError(ValueError):
    """Kernel evaluation requested at (or too close to) a pole."""


class OracleFailure(RuntimeError):
    """The reference integrator failed to reach the requested accuracy."""
