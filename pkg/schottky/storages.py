"""Definition of schottky storage classes.

Storage defines an abstract base class using the built-in ABC of python. It
requires read and write operations and guards them with access-mode checks.
JSONStorage holds one JSON document (a matrix file or a report file),
CSVStorage holds a table with a header row (sweep results) and MemoryStorage
keeps a document in memory for tests.

Matrix files carry {"g", "re", "im"} with optional "name" and
"stated_accuracy".  Report files carry {"verdict", "config", "precision",
"wall_time", "reduction"}.  Floats are written at repr precision so both
round-trip exactly.  Reports of runs with the same matrix, configuration and
seed differ only in their timing keys; report_body drops them.

Usage:
    >>> storage = JSONStorage("matrix.json", access_mode="w")
    >>> write_matrix(storage, embedded("bring"))
    >>> read_matrix(JSONStorage("matrix.json", access_mode="r"))
"""

from abc import ABC, abstractmethod
import csv
import json
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from .errors import NotSquare
from .riemann import RiemannMatrix
from .solver import SolverConfig, SweepRow, Verdict
from .zoo import EXACT_ACCURACY, MatrixRecord

SWEEP_HEADER = ("s", "best_residual", "delta_min", "converged_fraction")
TIMING_KEYS = ("wall_time",)


def create_file(path: Union[str, Path], create_dirs: bool) -> None:
    """Create a file if it doesn't exist yet.

    Args:
        path: The file to create.
        create_dirs: Whether to create all missing parent directories.
    """
    if create_dirs:
        base_dir = os.path.dirname(path)

        if base_dir and not os.path.exists(base_dir):
            os.makedirs(base_dir)

    # Mode 'a' creates the file without touching existing contents.
    with open(path, "a"):
        pass

    return


class Storage(ABC):  # pragma: no cover
    """The abstract base class for all schottky storage types.

    Custom storage classes should inherit like so:
        >>> from schottky.storages import Storage
        >>> class MyStorageClass(Storage):
                ...
    """

    @property
    def can_read(self) -> bool:
        """Can read the store."""
        return True

    @property
    def can_write(self) -> bool:
        """Can write to the store."""
        return True

    @abstractmethod
    def read(self) -> Any:
        """Read the stored document."""
        ...

    @abstractmethod
    def write(self, document: Any) -> None:
        """Overwrite the store with a document."""
        ...


class _FileStorage(Storage):
    """A storage backed by a single file."""

    _path: Union[str, Path]
    _mode: str
    _encoding: Optional[str]

    def __init__(
        self,
        path: Union[str, Path],
        create_dirs: bool = False,
        encoding: Optional[str] = "utf-8",
        access_mode: str = "r+",
    ) -> None:
        """Init a file storage.

        Args:
            path: Path to file.
            create_dirs: Create parent subdirectories.
            encoding: File encoding.
            access_mode: File access mode.
        """
        super().__init__()
        self._path = path
        self._mode = access_mode
        self._encoding = encoding

        if any(i in self._mode for i in ("+", "w", "a")):
            create_file(path, create_dirs=create_dirs)

    @property
    def path(self) -> Union[str, Path]:
        """Get the file path."""
        return self._path

    @property
    def can_read(self) -> bool:
        """Return whether or not reads can occur."""
        if self._mode not in ("r+", "r", "w+", "a+"):
            raise IOError(
                f'Cannot read from the storage. Access mode is "{self._mode}"'
            )

        return True

    @property
    def can_write(self) -> bool:
        """Return whether or not writes can occur."""
        if self._mode not in ("r+", "w", "w+"):
            raise IOError(
                f'Cannot write to the storage. Access mode is "{self._mode}"'
            )

        return True


class JSONStorage(_FileStorage):
    """A storage holding one JSON document.

    Usage:
        >>> JSONStorage("report.json", access_mode="w").write({"a": 1})
    """

    def read(self) -> Dict[str, Any]:
        """Read and parse the document.

        Raises:
            ValueError: The file is not valid JSON.
        """
        assert self.can_read

        with open(self._path, "r", encoding=self._encoding) as f:
            return json.load(f)

    def write(self, document: Dict[str, Any]) -> None:
        """Overwrite the file with a document."""
        assert self.can_write

        with open(self._path, "w", encoding=self._encoding) as f:
            json.dump(document, f, indent=2)
            f.write("\n")

        return


class CSVStorage(_FileStorage):
    """A storage holding a table with a header row.

    Usage:
        >>> CSVStorage("sweep.csv", access_mode="w").write(rows)
    """

    def read(self) -> List[Dict[str, str]]:
        """Read the rows as header-keyed mappings of strings."""
        assert self.can_read

        with open(self._path, "r", encoding=self._encoding, newline="") as f:
            return list(csv.DictReader(f))

    def write(self, document: Sequence[Dict[str, Any]]) -> None:
        """Overwrite the file with rows; the header is taken from the first."""
        assert self.can_write
        rows = list(document)

        with open(self._path, "w", encoding=self._encoding, newline="") as f:
            if rows:
                w = csv.DictWriter(f, fieldnames=list(rows[0]))
                w.writeheader()
                w.writerows(rows)

        return


class MemoryStorage(Storage):
    """An in-memory storage.

    Attributes:
        _memory: The stored document.
    """

    _memory: Any

    def __init__(self) -> None:
        """Init a MemoryStorage instance."""
        super().__init__()
        self._memory = None

    def read(self) -> Any:
        """Return the stored document."""
        return self._memory

    def write(self, document: Any) -> None:
        """Replace the stored document."""
        self._memory = document

        return


def write_matrix(storage: Storage, record: MatrixRecord) -> None:
    """Write a matrix record as a matrix file.

    Args:
        storage: Target storage.
        record: A record carrying a matrix.
    """
    if record.matrix is None:
        raise ValueError("Record carries no matrix.")

    doc = record.matrix._serialize_to_dict()
    doc["name"] = record.name
    doc["stated_accuracy"] = record.stated_accuracy
    storage.write(doc)

    return


def read_matrix(storage: Storage) -> MatrixRecord:
    """Read a matrix file.

    Args:
        storage: Source storage.

    Returns:
        A MatrixRecord; accuracy defaults to the exact-formula accuracy.

    Raises:
        InvalidMatrix: The document does not describe a Riemann matrix.
    """
    doc = storage.read()

    if not isinstance(doc, dict):
        raise NotSquare("Matrix file must hold a JSON object.")

    matrix = RiemannMatrix._deserialize_from_dict(doc)

    return MatrixRecord(
        name=str(doc.get("name", "matrix")),
        genus=matrix.g,
        source=str(doc.get("source", "file")),
        stated_accuracy=float(doc.get("stated_accuracy", EXACT_ACCURACY)),
        matrix=matrix,
    )


def write_report(
    storage: Storage,
    verdict: Verdict,
    config: SolverConfig,
    wall_time: float,
) -> None:
    """Write a verdict report.

    Args:
        storage: Target storage.
        verdict: The verdict.
        config: The configuration it was produced with.
        wall_time: Elapsed seconds.
    """
    doc = verdict._serialize_to_dict()
    reduction = doc.pop("reduction")
    storage.write(
        {
            "verdict": doc,
            "config": config._serialize_to_dict(),
            "precision": verdict.precision,
            "wall_time": wall_time,
            "reduction": reduction,
        }
    )

    return


def report_body(doc: Dict[str, Any]) -> Dict[str, Any]:
    """Return a report document without its timing keys.

    Args:
        doc: A report document as written by write_report.

    Returns:
        The deterministic part of the report.
    """
    return {k: v for k, v in doc.items() if k not in TIMING_KEYS}


def read_report(storage: Storage) -> Dict[str, Any]:
    """Read a verdict report.

    Returns:
        A mapping with "verdict" (a Verdict), "config" (a SolverConfig),
        "precision" and "wall_time".
    """
    doc = storage.read()
    verdict_doc = dict(doc["verdict"])
    verdict_doc["reduction"] = doc.get("reduction")

    return {
        "verdict": Verdict._deserialize_from_dict(verdict_doc),
        "config": SolverConfig._deserialize_from_dict(doc["config"]),
        "precision": float(doc["precision"]),
        "wall_time": float(doc["wall_time"]),
    }


def write_sweep(storage: Storage, rows: Sequence[SweepRow]) -> None:
    """Write sweep rows as a table with columns SWEEP_HEADER."""
    storage.write(
        [{k: repr(float(getattr(r, k))) for k in SWEEP_HEADER} for r in rows]
    )

    return


def read_sweep(storage: Storage) -> List[SweepRow]:
    """Read sweep rows written by write_sweep."""
    return [
        SweepRow(**{k: float(row[k]) for k in SWEEP_HEADER})
        for row in storage.read()
    ]
