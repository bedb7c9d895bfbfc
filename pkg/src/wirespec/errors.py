"""Exception hierarchy shared across the toolchain."""


class WirespecError(Exception):
    pass


# --- bit buffers -----------------------------------------------------------

class IncompleteInput(WirespecError):
    """Decoding ran out of input; more bytes may still arrive."""


class Underrun(IncompleteInput):
    pass


class MissingTerminator(IncompleteInput):
    """A terminated field's terminator was not found in the available input."""


class NotByteAligned(WirespecError):
    pass


# --- specification language ------------------------------------------------

class SpecSyntaxError(WirespecError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class ResolutionError(WirespecError):
    pass


class UnknownName(ResolutionError):
    pass


class DuplicateName(ResolutionError):
    pass


class ForwardReference(ResolutionError):
    pass


class CyclicDependency(ResolutionError):
    pass


# --- expression evaluation ---------------------------------------------------

class EvalError(WirespecError):
    pass


class UnboundName(EvalError):
    pass


class TypeMismatch(EvalError):
    pass


class DivisionByZero(EvalError):
    pass


# --- codecs ------------------------------------------------------------------

class ConstraintViolation(WirespecError):
    """A decoded or supplied value fails its type constraints."""


class Unrepresentable(WirespecError):
    """Value cannot be expressed in the codec's width or alphabet."""


class TerminatorInPayload(WirespecError):
    pass


# --- generation --------------------------------------------------------------

class UnsatisfiableConstraint(WirespecError):
    pass


# --- transport ---------------------------------------------------------------

class ChannelError(WirespecError):
    pass
