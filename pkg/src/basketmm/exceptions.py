"""Exception hierarchy shared by all modules."""


class BasketError(ValueError):
    """Base class for every error raised by basketmm."""


class InvalidBasketError(BasketError):
    pass


class NotPSDError(InvalidBasketError):
    pass


class DegenerateBasketError(BasketError):
    """Basket variance came out negative beyond rounding tolerance."""


class ZeroVarianceError(BasketError):
    pass


class DegenerateSkewError(BasketError):
    """Skewness too close to zero for the shifted log-normal calibration."""


class MgfDomainError(BasketError):
    def __init__(self, argument, bound, label=""):
        self.argument = argument
        self.bound = bound
        where = f" of law {label!r}" if label else ""
        super().__init__(
            f"MGF argument {argument!r} is outside the finiteness domain{where} "
            f"(must be < {bound!r})"
        )


class UnknownLawError(BasketError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)


class NoRootError(BasketError):
    def __init__(self, message, g_range=None):
        self.g_range = g_range
        super().__init__(message)


class DomainEmptyError(BasketError):
    pass


class QuadratureError(BasketError):
    pass


class BoundaryError(BasketError):
    """Strike sits on a pricing-branch boundary where derivatives are one-sided."""


class WrongBranchError(BasketError):
    pass


class SamplerError(BasketError):
    def __init__(self, message, path_index=None):
        self.path_index = path_index
        super().__init__(message)


class EmptyCasesError(BasketError):
    pass


class ZeroBenchmarkError(BasketError):
    pass


class ScenarioParseError(BasketError):
    def __init__(self, message, line=None, field=None, scenario=None):
        self.line = line
        self.field = field
        self.scenario = scenario
        ctx = []
        if scenario is not None:
            ctx.append(f"scenario {scenario!r}")
        if field is not None:
            ctx.append(f"field {field!r}")
        if line is not None:
            ctx.append(f"line {line}")
        prefix = f"[{', '.join(ctx)}] " if ctx else ""
        super().__init__(prefix + message)
