"""Exception hierarchy shared by every module of the package."""


class KQIError(Exception):
    """Base class for all domain errors raised by this package."""


class GraphError(KQIError):
    pass


class CycleError(GraphError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("graph contains a cycle: " + " -> ".join(map(str, self.cycle)))


class DuplicateEdgeError(GraphError):
    def __init__(self, citing, cited):
        self.edge = (citing, cited)
        super().__init__(f"duplicate edge: {citing!r} cites {cited!r} more than once")


class MalformedLineError(GraphError):
    def __init__(self, path, lineno, reason):
        self.path = path
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {reason}")


class AlreadyAugmentedError(GraphError):
    pass


class NotAugmentedError(GraphError):
    pass


class MissingYearError(GraphError):
    def __init__(self, node_id):
        self.node_id = node_id
        super().__init__(f"node {node_id!r} has no publication year")


class ZeroInStrengthError(KQIError):
    def __init__(self, node_id):
        self.node_id = node_id
        super().__init__(f"node {node_id!r} has zero weighted in-strength")


class MismatchedTableError(KQIError):
    pass


class FragmentExplosionError(KQIError):
    pass


class UnknownGroupKindError(KQIError):
    pass


class DegenerateInputError(KQIError):
    pass


class TooFewPointsError(KQIError):
    pass


class AllZeroError(KQIError):
    pass


class NonconvergenceError(KQIError):
    pass


class KeyMismatchError(KQIError):
    pass


class EmptySelectionError(KQIError):
    pass


class ValidityGuardError(KQIError):
    pass
