"""Exception types shared across the lexforge modules."""


class LexforgeError(Exception):
    """Base class for all lexforge errors."""


# corpus
class MalformedAct(LexforgeError):
    pass


class EmptyDocument(LexforgeError):
    pass


class DuplicateCelex(LexforgeError):
    pass


class StorageFailure(LexforgeError):
    pass


class SchemaViolation(LexforgeError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NotFound(LexforgeError):
    pass


class NonHtmlFormat(LexforgeError):
    pass


class NetworkFailure(LexforgeError):
    pass


# definitions
class UnsupportedInstrument(LexforgeError):
    pass


# retrieval
class DuplicateFragmentId(LexforgeError):
    pass


# generation
class EmptyContext(LexforgeError):
    pass


class ContextOverflow(LexforgeError):
    pass


class EndpointFailure(LexforgeError):
    def __init__(self, message: str, status: int | None = None):
        self.status = status
        super().__init__(message)


class NoJsonFound(LexforgeError):
    pass


class MissingKey(LexforgeError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"missing key: {key}")


class UnresolvableTarget(LexforgeError):
    pass


class DuplicateTerm(LexforgeError):
    pass


# evaluation
class EmptyReference(LexforgeError):
    pass


# service
class UnknownSession(LexforgeError):
    pass


class ValidationFailure(LexforgeError):
    pass
