"""Exception hierarchy shared by all modules."""


class StackelError(Exception):
    pass


class PoleError(StackelError, ZeroDivisionError):
    """A coefficient function is singular at the requested base point."""

    def __init__(self, msg="pole at base point"):
        super().__init__(msg)


class CoincidentAxesError(StackelError, ValueError):
    def __init__(self, msg="coincident semi-axes"):
        super().__init__(msg)


class ChartError(StackelError, ValueError):
    def __init__(self, msg="not in coordinate chart"):
        super().__init__(msg)


class NotApplicableError(StackelError, ValueError):
    def __init__(self, msg="identity not applicable"):
        super().__init__(msg)


class OrderError(StackelError, ValueError):
    pass


class StiffSegmentError(StackelError, RuntimeError):
    """Step size underflow; ``partial`` carries the trajectory computed so far."""

    def __init__(self, msg="stiff segment", partial=None):
        super().__init__(msg)
        self.partial = partial
