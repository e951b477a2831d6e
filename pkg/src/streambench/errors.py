"""Exception hierarchy shared across the harness."""


class BenchError(Exception):
    """Base class for all harness errors."""


class FieldCountError(BenchError):
    """A CSV line has the wrong number of fields."""


class DuplicateTopic(BenchError):
    """Topic name already registered in the catalog."""


class OffsetOutOfRange(BenchError):
    """Read offset is past the end of the log."""


class StorageError(BenchError):
    """Persistence layer failure (missing file/directory, bad framing)."""


class SchemaError(BenchError):
    """CSV line does not match the table's column schema."""


class DuplicateKey(BenchError):
    """Insert would violate a table's unique-key constraint."""


class ReferentialError(BenchError):
    """Insert would violate referential integrity."""


class UnknownWorkplace(BenchError):
    """Workplace id not present in the WORKPLACE table."""


class UnknownKey(BenchError):
    """Composite key not present in PRODUCTION_ORDER_LINE."""


class UnknownTable(BenchError):
    """Table name not part of the business schema."""


class TopicMissing(BenchError):
    """Sender was pointed at a topic that does not exist."""


class MissingTopic(BenchError):
    """Validator input topic absent from the persisted catalog."""


class DegenerateWindow(BenchError):
    """Outlier window where every point is identical; no score is defined."""


class DanglingAnchor(BenchError):
    """Output record references an input offset that does not exist."""


class EmptySamples(BenchError):
    """Latency aggregation over zero samples."""


class RunExists(BenchError):
    """Run directory already present and --force not given."""


class MissingInput(BenchError):
    """Run directory lacks generated data required by this command."""
