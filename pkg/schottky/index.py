"""Definition of the schottky lattice Index.

Class descriptions for Index and LatticeTable.  Every theta evaluation sums
over the hypercube [-N, N]^g of integer points N shifted by a characteristic
p, and needs the quadratic form ⟨N+p, B(N+p)⟩ at each of them.  That table
depends only on (B, N, p), so an Index holds the tables built so far and hands
them out to theta evaluations that share a matrix.

A LatticeTable materializes its points and quadratic terms when they fit in
the term budget and otherwise regenerates them chunk by chunk on demand, so
that large genera stream instead of exhausting memory.  Chunks are always
produced in the same order, which pins the order in which partial sums are
reduced.

Usage:
    >>> index = Index()
    >>> table = index.get(B, radius=5)
    >>> for points, quad in table.chunks(max_rows=4096):
    ...     ...
"""

from collections import OrderedDict
import threading
from typing import Hashable, Iterator, Optional, Tuple

import numpy as np

from .riemann import RiemannMatrix
from .utils import freeze

DEFAULT_MAX_TERMS = 2**22
DEFAULT_MAX_TABLES = 32


class LatticeTable:
    """Points N + p of the hypercube [-N, N]^g and their quadratic terms.

    Attributes:
        g: The genus.
        radius: The hypercube half-width N.
        shift: The real shift p.
        size: Number of lattice points, (2N + 1)^g.
        materialized: Points and terms are held in memory.

    Usage:
        >>> LatticeTable(B, radius=3)
    """

    _matrix: np.ndarray
    _radius: int
    _shift: np.ndarray
    _size: int
    _points: Optional[np.ndarray]
    _quad: Optional[np.ndarray]

    def __init__(
        self,
        B: RiemannMatrix,
        radius: int,
        shift: Optional[np.ndarray] = None,
        max_terms: int = DEFAULT_MAX_TERMS,
    ) -> None:
        """Init a LatticeTable.

        Args:
            B: The Riemann matrix of the quadratic form.
            radius: Hypercube half-width, at least 0.
            shift: Real g-vector added to every point. Defaults to zero.
            max_terms: Largest number of points held in memory at once.
        """
        if int(radius) != radius or radius < 0:
            raise ValueError("Radius must be a non-negative integer.")

        g = B.g
        self._matrix = B.matrix
        self._radius = int(radius)
        self._shift = (
            np.zeros(g) if shift is None else np.asarray(shift, dtype=float)
        )
        self._size = (2 * self._radius + 1) ** g
        self._points = None
        self._quad = None

        if self._size * g <= max_terms:
            self._points = self._make_points(0, self._size)
            self._quad = self._make_quad(self._points)

    @property
    def g(self) -> int:
        """Get the genus."""
        return int(self._matrix.shape[0])

    @property
    def radius(self) -> int:
        """Get the radius."""
        return self._radius

    @property
    def shift(self) -> np.ndarray:
        """Get the shift."""
        return self._shift

    @property
    def size(self) -> int:
        """Get the number of lattice points."""
        return self._size

    @property
    def materialized(self) -> bool:
        """Return True if the table is held in memory."""
        return self._points is not None

    def __len__(self) -> int:
        """Return number of lattice points."""
        return self._size

    def __repr__(self) -> str:
        """Return printable representation of the table."""
        args = [
            f"g={self.g}",
            f"radius={self._radius}",
            f"size={self._size}",
            f"materialized={self.materialized}",
        ]

        return f'<{type(self).__name__} {", ".join(args)}>'

    def chunks(self, max_rows: int) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        """Yield (points, quad) blocks covering the table in a fixed order.

        Args:
            max_rows: Largest number of points per block.

        Yields:
            Real (m, g) point arrays and complex (m,) quadratic terms.
        """
        step = max(1, int(max_rows))

        for start in range(0, self._size, step):
            stop = min(start + step, self._size)

            if self._points is not None and self._quad is not None:
                yield self._points[start:stop], self._quad[start:stop]
            else:
                points = self._make_points(start, stop)
                yield points, self._make_quad(points)

    def _make_points(self, start: int, stop: int) -> np.ndarray:
        """Generate points for flat indices [start, stop)."""
        g = self.g
        side = 2 * self._radius + 1
        flat = np.arange(start, stop, dtype=np.int64)
        digits = np.stack(np.unravel_index(flat, (side,) * g), axis=1)

        return digits.astype(float) - self._radius + self._shift

    def _make_quad(self, points: np.ndarray) -> np.ndarray:
        """Return ⟨P, B P⟩ for each row P."""
        return np.sum((points @ self._matrix) * points, axis=1)


class Index:
    """An in-memory index of lattice tables keyed on (B, N, p).

    Tables are built on first request and kept in least-recently-used order up
    to a fixed count.  Population is guarded by a lock; lookups of existing
    tables are safe from any thread.

    Attributes:
        valid: Index may be used.
        empty: Index holds no tables.
    """

    _tables: "OrderedDict[Hashable, LatticeTable]"
    _lock: threading.Lock
    _max_tables: int
    _max_terms: int
    _valid: bool

    def __init__(
        self,
        max_tables: int = DEFAULT_MAX_TABLES,
        max_terms: int = DEFAULT_MAX_TERMS,
        valid: bool = True,
    ) -> None:
        """Initialize an Index.

        Args:
            max_tables: Largest number of tables retained.
            max_terms: Term budget passed on to every table.
            valid: Index may be used.
        """
        self._tables = OrderedDict()
        self._lock = threading.Lock()
        self._max_tables = max_tables
        self._max_terms = max_terms
        self._valid = valid

    @property
    def empty(self) -> bool:
        """Return True if index holds no tables."""
        return not self._tables

    @property
    def valid(self) -> bool:
        """Return True if the index may be used."""
        return self._valid

    @property
    def max_terms(self) -> int:
        """Get the term budget."""
        return self._max_terms

    def __len__(self) -> int:
        """Return number of tables in the index."""
        return len(self._tables)

    def __repr__(self) -> str:
        """Return printable representation of Index."""
        args = [
            f"_tables={len(self._tables)}",
            f"_max_tables={self._max_tables}",
            f"_max_terms={self._max_terms}",
        ]

        return f'<{type(self).__name__} {", ".join(args)}>'

    def build(
        self,
        B: RiemannMatrix,
        radius: int,
        shift: Optional[np.ndarray] = None,
    ) -> LatticeTable:
        """Build a table and store it, replacing any existing entry.

        Args:
            B: The Riemann matrix.
            radius: Hypercube half-width.
            shift: Real g-vector shift.

        Returns:
            The new LatticeTable.
        """
        table = LatticeTable(B, radius, shift, max_terms=self._max_terms)
        key = self._key(B, radius, table.shift)

        with self._lock:
            self._tables[key] = table
            self._tables.move_to_end(key)

            while len(self._tables) > self._max_tables:
                self._tables.popitem(last=False)

        return table

    def get(
        self,
        B: RiemannMatrix,
        radius: int,
        shift: Optional[np.ndarray] = None,
    ) -> LatticeTable:
        """Return the table for (B, radius, shift), building it if missing.

        Args:
            B: The Riemann matrix.
            radius: Hypercube half-width.
            shift: Real g-vector shift. Defaults to zero.

        Returns:
            A LatticeTable.

        Raises:
            RuntimeError: The index was invalidated.
        """
        if not self._valid:
            raise RuntimeError("Index has been invalidated.")

        s = np.zeros(B.g) if shift is None else np.asarray(shift, dtype=float)
        key = self._key(B, radius, s)

        with self._lock:
            table = self._tables.get(key)

            if table is not None:
                self._tables.move_to_end(key)
                return table

        return self.build(B, radius, s)

    def invalidate(self) -> None:
        """Invalidate the Index and drop every table.

        Usage:
            >>> i = Index()
            >>> i.invalidate()
        """
        self._reset()
        self._valid = False

        return

    def _key(
        self, B: RiemannMatrix, radius: int, shift: np.ndarray
    ) -> Hashable:
        """Return the cache key of a table."""
        return (freeze(B.matrix), int(radius), freeze(np.asarray(shift)))

    def _reset(self) -> None:
        """Reset the index.

        Empty the index out.
        """
        with self._lock:
            self._tables = OrderedDict()

        self._valid = True

        return


DEFAULT_INDEX = Index()
