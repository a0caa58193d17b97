from typing import Iterable, List, Sequence, Tuple

from app.utils.exceptions import InputMismatch

Vector = Tuple[int, ...]


class IntMatrix:
    """Dense integer matrix with arbitrary-precision entries.

    Instances are immutable; every operation returns a new matrix. Shapes with a
    zero dimension are allowed (a 0×n matrix keeps its column count).
    """

    __slots__ = ("_rows", "_cols", "_entries")

    def __init__(self, rows: int, cols: int, entries: Iterable[Iterable[int]] = ()):
        data = tuple(tuple(int(x) for x in row) for row in entries)
        if rows < 0 or cols < 0:
            raise InputMismatch(f"Negative matrix shape {rows}x{cols}")
        if not data:
            data = tuple((0,) * cols for _ in range(rows))
        if len(data) != rows or any(len(row) != cols for row in data):
            raise InputMismatch(f"Entry count does not match shape {rows}x{cols}")
        self._rows = rows
        self._cols = cols
        self._entries = data

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int = None) -> "IntMatrix":
        """Build from a list of rows; cols is needed only when there are no rows"""
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def rows(self) -> int:
        return self._rows

    @property
    def cols(self) -> int:
        return self._cols

    @property
    def shape(self) -> Tuple[int, int]:
        return self._rows, self._cols

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self._entries[i][j]

    def row(self, i: int) -> Vector:
        return self._entries[i]

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self._entries)

    def to_lists(self) -> List[List[int]]:
        return [list(row) for row in self._entries]

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self) -> int:
        return hash((self._rows, self._cols, self._entries))

    def __repr__(self) -> str:
        return f"IntMatrix({self._rows}, {self._cols}, {self.to_lists()})"

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self._cols != other.rows:
            raise InputMismatch(f"Cannot multiply {self.shape} by {other.shape}")
        columns = [other.column(j) for j in range(other.cols)]
        return IntMatrix(
            self._rows,
            other.cols,
            [[sum(a * b for a, b in zip(row, col)) for col in columns] for row in self._entries],
        )

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise InputMismatch(f"Cannot add {self.shape} and {other.shape}")
        return IntMatrix(
            self._rows,
            self._cols,
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._entries, other._entries)],
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise InputMismatch(f"Cannot subtract {other.shape} from {self.shape}")
        return IntMatrix(
            self._rows,
            self._cols,
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self._entries, other._entries)],
        )

    def apply(self, vector: Sequence[int]) -> Vector:
        """Matrix-vector product M·x"""
        if len(vector) != self._cols:
            raise InputMismatch(f"Vector of length {len(vector)} does not fit {self.shape} matrix")
        return tuple(sum(a * int(b) for a, b in zip(row, vector)) for row in self._entries)

    def minus_identity(self) -> "IntMatrix":
        """M − I for a square matrix"""
        if self._rows != self._cols:
            raise InputMismatch(f"M − I needs a square matrix, got {self.shape}")
        return self - IntMatrix.identity(self._rows)

    def is_diagonal(self) -> bool:
        return all(
            value == 0
            for i, row in enumerate(self._entries)
            for j, value in enumerate(row)
            if i != j
        )

    def diagonal(self) -> Vector:
        return tuple(self._entries[i][i] for i in range(min(self._rows, self._cols)))

    def determinant(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination"""
        if self._rows != self._cols:
            raise InputMismatch(f"Determinant needs a square matrix, got {self.shape}")
        n = self._rows
        if n == 0:
            return 1
        a = self.to_lists()
        sign = 1
        previous = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // previous
            previous = a[k][k]
        return sign * a[n - 1][n - 1]
