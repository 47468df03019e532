"""Exception hierarchy for the event store.

Two families matter for exit-code mapping in the CLI: UserError (bad input,
misuse of the API, exit code 1) and DataError (corruption, dangling
references, I/O trouble, exit code 2).
"""


class EvstoreError(Exception):
    pass


class UserError(EvstoreError):
    """Caller mistake: invalid input, misuse, or a denied operation."""


class DataError(EvstoreError):
    """Broken or missing persistent state."""


# --- core-model ---

class IllegalCharacterError(UserError):
    pass


class DuplicateEntryError(UserError):
    pass


class MalformedLayoutError(UserError):
    pass


# --- tags ---

class DuplicateAttributeNameError(UserError):
    pass


class UnknownAttributeError(UserError):
    pass


class KindMismatchError(UserError):
    pass


class KindConflictError(UserError):
    """Same attribute name used with two different kinds."""


class HashCollisionError(DataError):
    """Two distinct canonical encodings hashed to the same 64-bit id."""


class UnknownDescriptorError(DataError):
    pass


# --- commons ---

class UnknownCommonObjectError(DataError):
    pass


# --- storage ---

class WriterBusyError(UserError):
    pass


class TransactionRequiredError(UserError):
    pass


class IoFailureError(DataError):
    pass


class UnknownRefError(DataError):
    pass


class CorruptRecordError(DataError):
    pass


class CorruptJournalError(DataError):
    pass


# --- collections ---

class BadNameError(UserError):
    pass


class NameExistsError(UserError):
    pass


class UnknownCollectionError(UserError):
    pass


class AccessDeniedError(UserError):
    pass


class AlreadyOwnedError(UserError):
    pass


class UnknownPathError(UserError):
    pass


class BadPatternError(UserError):
    pass


class PredicateSyntaxError(UserError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


# --- bench ---

class BadSpecError(UserError):
    pass
