"""Exception types shared across the package."""


class BipcheckError(Exception):
    """Base class for all library errors."""


class InvalidDescriptor(BipcheckError):
    pass


class ClosureTooLarge(BipcheckError):
    pass


class DirectedResult(BipcheckError):
    """A builder produced an asymmetric adjacency matrix."""


class NotRegular(BipcheckError):
    pass


class NotInvariant(BipcheckError):
    pass


class TooLarge(BipcheckError):
    """An exhaustive enumeration would exceed its configured vertex cap."""

    def __init__(self, what: str, n: int, cap: int):
        super().__init__(f"{what}: n={n} exceeds cap {cap}")
        self.what = what
        self.n = n
        self.cap = cap


class NoMatching(BipcheckError):
    """No perfect matching exists; ``certificate`` is a Hall-violating row set."""

    def __init__(self, certificate):
        super().__init__(f"no perfect matching; Hall violator rows {sorted(certificate)}")
        self.certificate = frozenset(certificate)


class NotSymmetric(BipcheckError):
    pass


class NoConvergence(BipcheckError):
    pass


class HypothesisViolated(BipcheckError):
    def __init__(self, failures):
        super().__init__("hypothesis violated: " + "; ".join(failures))
        self.failures = list(failures)


class InapplicableBipartite(BipcheckError):
    pass


class InternalError(BipcheckError):
    pass
