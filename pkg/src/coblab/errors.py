class CoblabError(Exception):
    def __init__(self, message: str):
        super().__init__(f"coblab: {message}")


class SpaceMismatchError(CoblabError):
    def __init__(self, left, right):
        super().__init__(f"index spaces differ: {left} vs {right}.")


class NotContractionError(CoblabError):
    def __init__(self, norm: float):
        super().__init__(f"operator norm exceeds 1 (largest singular value {norm!r}).")


class NotIsometryError(CoblabError):
    def __init__(self, kind: str):
        super().__init__(
            f"operator '{kind}' is not an isometry; use solve_contraction instead."
        )


class InsufficientDataError(CoblabError):
    def __init__(self, found: int, needed: int):
        super().__init__(
            f"insufficient data: {found} nonzero levels, at least {needed} needed."
        )


class InexactSplitError(CoblabError):
    def __init__(self, j_max: int):
        super().__init__(
            "split not exact: the adjoint orbit was truncated after "
            f"component {j_max}."
        )


class LimitNotComputableError(CoblabError):
    def __init__(self):
        super().__init__(
            "limit not exactly computable: the adjoint orbit does not terminate."
        )


class ZeroModeError(CoblabError):
    def __init__(self):
        super().__init__("Fourier mode 0 is not allowed (zero-mean subspace).")


class ConfigurationError(CoblabError):
    pass
