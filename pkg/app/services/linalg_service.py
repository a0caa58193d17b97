import logging
from functools import reduce
from math import gcd
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from app.config import Config
from app.models.matrix import IntMatrix, Vector
from app.utils.exceptions import InputMismatch, InternalAssertionFailed

logger = logging.getLogger(__name__)


class SmithDecomposition(BaseModel):
    """U·M·V = S with U, V unimodular and S diagonal with d_1 | d_2 | … ≥ 0"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: IntMatrix
    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    operations: int = 0

    @property
    def diagonal(self) -> Vector:
        return self.S.diagonal()

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    def verify(self) -> None:
        """Raise InternalAssertionFailed unless every decomposition invariant holds"""
        if self.U @ self.matrix @ self.V != self.S:
            raise InternalAssertionFailed("U·M·V does not reproduce S")
        if not self.S.is_diagonal():
            raise InternalAssertionFailed("S has a nonzero off-diagonal entry")
        diagonal = self.diagonal
        if any(d < 0 for d in diagonal):
            raise InternalAssertionFailed("S has a negative diagonal entry")
        for d, e in zip(diagonal, diagonal[1:]):
            if (d == 0 and e != 0) or (d != 0 and e % d != 0):
                raise InternalAssertionFailed(f"Divisibility chain broken at {d}, {e}")
        # Larger transforms are unimodular by construction: every recorded step is
        # a swap, a negation or the addition of a multiple of another line.
        for name, transform in (("U", self.U), ("V", self.V)):
            if transform.rows <= Config.DET_CHECK_LIMIT and abs(transform.determinant()) != 1:
                raise InternalAssertionFailed(f"{name} is not unimodular")


class SmithNormalForm:
    """Smith normal form of an integer matrix with its transforms.

    Each round moves the nonzero entry of least absolute value to the pivot
    position, clears its row and column with integer row/column operations, and
    repeats until the pivot divides every remaining entry.

    Usage
    -----
    snf = SmithNormalForm(matrix)
    decomposition = snf.run()
    """

    def __init__(self, matrix: IntMatrix):
        self.matrix = matrix
        self._rows, self._cols = matrix.shape
        self._A = matrix.to_lists()
        self._U = IntMatrix.identity(self._rows).to_lists()
        self._V = IntMatrix.identity(self._cols).to_lists()
        self._operations = 0

    def run(self) -> SmithDecomposition:
        """Calculate the decomposition"""
        for t in range(min(self._rows, self._cols)):
            if not self._place_pivot(t):
                break
            while not self._clear_cross(t):
                pass
            if self._A[t][t] < 0:
                self._negate_column(t)

        decomposition = SmithDecomposition(
            matrix=self.matrix,
            U=IntMatrix(self._rows, self._rows, self._U),
            S=IntMatrix(self._rows, self._cols, self._A),
            V=IntMatrix(self._cols, self._cols, self._V),
            operations=self._operations,
        )
        logger.debug(f"SNF of {self._rows}x{self._cols} matrix done in {self._operations} operations: diagonal {list(decomposition.diagonal)}")
        return decomposition

    def _trace(self, message: str) -> None:
        self._operations += 1
        if self._operations <= Config.SNF_TRACE_LIMIT:
            logger.debug(f"SNF step {self._operations}: {message}")

    def _place_pivot(self, t: int) -> bool:
        """Move the smallest nonzero entry of the trailing block to (t, t)"""
        best = None
        for i in range(t, self._rows):
            for j in range(t, self._cols):
                value = self._A[i][j]
                if value != 0 and (best is None or abs(value) < abs(self._A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            return False
        i, j = best
        if i != t:
            self._swap_rows(t, i)
        if j != t:
            self._swap_columns(t, j)
        return True

    def _clear_cross(self, t: int) -> bool:
        """One reduction pass on row and column t; True once the pivot is final"""
        A = self._A
        for i in range(t + 1, self._rows):
            if A[i][t] != 0:
                self._add_row(i, t, -(A[i][t] // A[t][t]))
        for j in range(t + 1, self._cols):
            if A[t][j] != 0:
                self._add_column(j, t, -(A[t][j] // A[t][t]))

        leftover = any(A[i][t] != 0 for i in range(t + 1, self._rows)) or any(
            A[t][j] != 0 for j in range(t + 1, self._cols)
        )
        if leftover:
            self._place_pivot(t)
            return False

        pivot = A[t][t]
        for i in range(t + 1, self._rows):
            for j in range(t + 1, self._cols):
                if A[i][j] % pivot != 0:
                    # Pull the offending row into the pivot row and go again.
                    self._add_row(t, i, 1)
                    return False
        return True

    def _swap_rows(self, a: int, b: int) -> None:
        self._A[a], self._A[b] = self._A[b], self._A[a]
        self._U[a], self._U[b] = self._U[b], self._U[a]
        self._trace(f"swap rows {a} and {b}")

    def _swap_columns(self, a: int, b: int) -> None:
        for row in self._A:
            row[a], row[b] = row[b], row[a]
        for row in self._V:
            row[a], row[b] = row[b], row[a]
        self._trace(f"swap columns {a} and {b}")

    def _add_row(self, target: int, source: int, factor: int) -> None:
        """row_target += factor · row_source"""
        for matrix in (self._A, self._U):
            src = matrix[source]
            matrix[target] = [x + factor * y for x, y in zip(matrix[target], src)]
        self._trace(f"row {target} += {factor} * row {source}")

    def _add_column(self, target: int, source: int, factor: int) -> None:
        """column_target += factor · column_source"""
        for matrix in (self._A, self._V):
            for row in matrix:
                row[target] += factor * row[source]
        self._trace(f"column {target} += {factor} * column {source}")

    def _negate_column(self, j: int) -> None:
        for matrix in (self._A, self._V):
            for row in matrix:
                row[j] = -row[j]
        self._trace(f"negate column {j}")


class CokernelPresentation(BaseModel):
    """coker(M) = Z^rows / im(M) ≅ ⊕ Z/d_i ⊕ Z^free_rank"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    invariant_factors: Tuple[int, ...]
    free_rank: int
    decomposition: SmithDecomposition
    rows: int
    cols: int

    @property
    def matrix(self) -> IntMatrix:
        return self.decomposition.matrix

    def same_group(self, other: "CokernelPresentation") -> bool:
        """Abstract isomorphism type agrees"""
        return self.invariant_factors == other.invariant_factors and self.free_rank == other.free_rank

    def describe(self) -> str:
        """Human-readable group, e.g. "Z/2 ⊕ Z^2" or "0" """
        parts = [f"Z/{d}" for d in self.invariant_factors]
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        return " ⊕ ".join(parts) if parts else "0"

    def coordinates(self, vector: Sequence[int]) -> Vector:
        """Canonical coordinates of [vector]: torsion residues then free coordinates"""
        if len(vector) != self.rows:
            raise InputMismatch(f"Vector of length {len(vector)} does not fit coker of {self.rows}x{self.cols} matrix")
        y = self.decomposition.U.apply(vector)
        diagonal = self.decomposition.diagonal
        rank = self.decomposition.rank
        torsion = tuple(y[i] % diagonal[i] for i in range(rank) if diagonal[i] > 1)
        return torsion + tuple(y[rank:])

    def element(self, vector: Sequence[int]) -> "CokerElement":
        if len(vector) != self.rows:
            raise InputMismatch(f"Vector of length {len(vector)} does not fit coker of {self.rows}x{self.cols} matrix")
        return CokerElement(representative=tuple(int(x) for x in vector), presentation=self)

    def zero(self) -> "CokerElement":
        return self.element((0,) * self.rows)


class CokerElement(BaseModel):
    """A class [x] in coker(M), carried by one integer representative"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    representative: Tuple[int, ...]
    presentation: CokernelPresentation

    def _require_same(self, other: "CokerElement") -> None:
        if self.presentation.matrix != other.presentation.matrix:
            raise InputMismatch("Classes belong to different cokernels")

    def __eq__(self, other) -> bool:
        if not isinstance(other, CokerElement):
            return NotImplemented
        if self.presentation.matrix != other.presentation.matrix:
            return False
        return self.coordinates() == other.coordinates()

    def __hash__(self) -> int:
        return hash((self.presentation.matrix, self.coordinates()))

    def __add__(self, other: "CokerElement") -> "CokerElement":
        self._require_same(other)
        return self.presentation.element(tuple(a + b for a, b in zip(self.representative, other.representative)))

    def __neg__(self) -> "CokerElement":
        return self.presentation.element(tuple(-a for a in self.representative))

    def __sub__(self, other: "CokerElement") -> "CokerElement":
        return self + (-other)

    def coordinates(self) -> Vector:
        return self.presentation.coordinates(self.representative)

    def is_zero(self) -> bool:
        return not any(self.coordinates())

    def order(self) -> Optional[int]:
        """Order of the class in the group; None when it is infinite"""
        factors = self.presentation.invariant_factors
        coordinates = self.coordinates()
        if any(coordinates[len(factors):]):
            return None
        orders = [d // gcd(c, d) for c, d in zip(coordinates, factors)]
        return reduce(lambda a, b: a * b // gcd(a, b), orders, 1)


class LinalgService:
    """Exact integer linear algebra over Z"""

    def smith_normal_form(self, matrix: IntMatrix) -> SmithDecomposition:
        return SmithNormalForm(matrix).run()

    def cokernel(self, matrix: IntMatrix) -> CokernelPresentation:
        decomposition = self.smith_normal_form(matrix)
        diagonal = decomposition.diagonal
        factors = tuple(d for d in diagonal if d > 1)
        rank = decomposition.rank
        presentation = CokernelPresentation(
            invariant_factors=factors,
            free_rank=matrix.rows - rank,
            decomposition=decomposition,
            rows=matrix.rows,
            cols=matrix.cols,
        )
        logger.debug(f"coker of {matrix.rows}x{matrix.cols} matrix: {presentation.describe()}")
        return presentation

    def solve_with(self, decomposition: SmithDecomposition, vector: Sequence[int]) -> Optional[Vector]:
        """n with M·n = vector, from an existing decomposition of M; None if vector ∉ im M"""
        matrix = decomposition.matrix
        if len(vector) != matrix.rows:
            raise InputMismatch(f"Vector of length {len(vector)} does not fit {matrix.rows}x{matrix.cols} matrix")
        y = decomposition.U.apply(vector)
        diagonal = decomposition.diagonal
        rank = decomposition.rank
        m: List[int] = [0] * matrix.cols
        for i in range(rank):
            if y[i] % diagonal[i] != 0:
                return None
            m[i] = y[i] // diagonal[i]
        if any(y[rank:]):
            return None
        solution = decomposition.V.apply(m)
        if matrix.apply(solution) != tuple(int(x) for x in vector):
            raise InternalAssertionFailed("Image solution does not reproduce the target vector")
        return solution

    def solve_in_image(self, matrix: IntMatrix, vector: Sequence[int]) -> Optional[Vector]:
        """n with M·n = vector, or None when vector is not in the image of M"""
        if len(vector) != matrix.rows:
            raise InputMismatch(f"Vector of length {len(vector)} does not fit {matrix.rows}x{matrix.cols} matrix")
        return self.solve_with(self.smith_normal_form(matrix), vector)

    def coker_equal(self, matrix: IntMatrix, x: Sequence[int], y: Sequence[int]) -> bool:
        """[x] = [y] in coker(M)"""
        if len(x) != len(y):
            raise InputMismatch(f"Vectors of lengths {len(x)} and {len(y)} cannot be compared")
        return self.solve_in_image(matrix, [a - b for a, b in zip(x, y)]) is not None
