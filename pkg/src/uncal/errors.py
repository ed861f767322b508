"""Exception hierarchy shared by every module of the package."""


class UncalError(Exception):
    """Base class for all errors raised by :mod:`uncal`."""


class UncalTypeError(UncalError, TypeError):
    """A term violates one of the typing rules.

    ``rule`` names the violated rule (``Com``, ``Pair``, ``Mark`` ...) and
    ``term`` is the offending subterm when one is available.
    """

    def __init__(self, rule, message, term=None):
        self.rule = rule
        self.term = term
        super().__init__(f"[{rule}] {message}")


class SubstError(UncalError):
    pass


class UncalSyntaxError(UncalError, SyntaxError):
    def __init__(self, message, line=0, col=0, expected=None):
        self.line = line
        self.col = col
        self.expected = expected
        text = f"{line}:{col}: {message}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text)


class ArityError(UncalError):
    pass


class CompileError(UncalError):
    pass


class FuelExhausted(UncalError, RuntimeError):
    """The normaliser ran out of rewrite steps.

    The rewrite system terminates, so hitting the budget points at a bug
    rather than at a diverging input.
    """
