"""Exception types shared by the engines and mapped to CLI exit codes."""


class ParseError(SyntaxError):
    """Input text does not follow the surface grammar."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class ValidityError(ValueError):
    """A value is well-formed but violates a domain invariant."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class ResourceError(RuntimeError):
    """A search or recursion budget was exhausted."""


class PreconditionError(ValueError):
    """An operation was called on input that fails its precondition."""


class IllFormedPair(ValueError):
    """A partial map offered as a pair is not an isomorphism of substructures."""


class NotAutomorphism(ValueError):
    """A proposed generator does not preserve the structure."""

    def __init__(self, message, generator=None):
        super().__init__(message)
        self.generator = generator
