import config


class ChowError(Exception):
    """
    Base class for every error raised by the engine.

    Each subclass names its failure in ``msg`` and the process exit code the CLI maps it to in
    ``exit_code``. The optional ``detail`` says which basis symbol, pair, triple or name failed.
    """
    msg = 'Chow ring engine error'
    exit_code = config.EXIT_EVALUATION_ERROR
    line = None
    column = None

    def __init__(self, detail=None):
        self.detail = detail
        super().__init__(self.msg if detail is None else f'{self.msg}: {detail}')

    def located(self, line, column=1):
        """Attaches a source position unless one is already known; returns self for re-raising."""
        if self.line is None:
            self.line, self.column = line, column
            self.args = (f'{self.args[0]} (line {line}, column {column})',)
        return self


# Parse and validation errors (exit code 2)

class ValidationError(ChowError):
    msg = 'Model validation failed'
    exit_code = config.EXIT_PARSE_ERROR


class DuplicateBasisName(ValidationError):
    msg = 'Duplicate basis name'


class DegreeMismatch(ValidationError):
    msg = 'Degree mismatch'


class NotRingHomomorphism(ValidationError):
    msg = 'Pullback is not a ring homomorphism'


class ProjectionFormulaViolation(ValidationError):
    msg = 'Projection formula violated'


class CompositionMismatch(ValidationError):
    msg = 'Morphisms are not composable'


class ForwardReference(ValidationError):
    msg = 'Reference to a declaration that appears later in the file'


class UnknownModel(ValidationError):
    msg = 'Unknown model'


class DslSyntaxError(ChowError):
    """Syntax error with a 1-based source position and the set of tokens that would have been accepted."""
    msg = 'Syntax error'
    exit_code = config.EXIT_PARSE_ERROR

    def __init__(self, detail, line=1, column=1, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        where = f'line {line}, column {column}'
        if self.expected:
            detail = f'{detail} at {where} (expected one of: {", ".join(self.expected)})'
        else:
            detail = f'{detail} at {where}'
        super().__init__(detail)


# Evaluation errors (exit code 3)

class RingMismatch(ChowError):
    msg = 'Classes live on different rings'


class NonNilpotentInput(ChowError):
    msg = 'Truncated exponential needs a class without codimension-0 part'


class NoPointClass(ChowError):
    msg = 'Ring has no designated point class'


class UnboundName(ChowError):
    msg = 'Unbound name'


class UnsupportedModel(ChowError):
    msg = 'Operation not supported on this model'


class EvaluationError(ChowError):
    """Wraps an error raised while evaluating an expression, adding the position of the failing node."""
    msg = 'Evaluation failed'

    def __init__(self, inner, line=1, column=1):
        self.inner = inner
        self.line = line
        self.column = column
        self.exit_code = getattr(inner, 'exit_code', config.EXIT_EVALUATION_ERROR)
        super().__init__(f'{inner} (at line {line}, column {column})')


# Precondition errors (exit code 4)

class PreconditionError(ChowError):
    msg = 'Precondition violated'
    exit_code = config.EXIT_PRECONDITION


class InvalidRank(PreconditionError):
    msg = 'Rank d must be a positive integer'


class NotAbelianFamily(PreconditionError):
    msg = 'Family fibres are not abelian'


class NotACurveFamily(PreconditionError):
    msg = 'Family is not a family of curves (n != 1)'


class InvalidGenus(PreconditionError):
    msg = 'Invalid genus'


class NotPositiveInteger(PreconditionError):
    msg = 'Class is not a valid polarization: rank is not a positive integer'


class InvalidScalingFactor(PreconditionError):
    msg = 'Scaling factor must be non-negative'
