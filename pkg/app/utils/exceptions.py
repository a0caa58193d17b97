from typing import List, Optional


class GraphExtError(Exception):
    """Base error for graphext; carries the CLI exit code"""

    exit_code = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class ParseError(GraphExtError):
    """Input file could not be parsed"""

    exit_code = 2


class HypothesisViolated(GraphExtError):
    """The graph does not satisfy the hypotheses of the Ext computation"""

    exit_code = 3

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("Hypothesis violated: " + "; ".join(self.violations))


class InputMismatch(GraphExtError):
    """Inputs do not fit together (base graphs, presentations, dimensions)"""

    exit_code = 4


class UnknownVertex(InputMismatch):
    def __init__(self, vertex: str):
        self.vertex = vertex
        super().__init__(f"Unknown vertex: {vertex}")


class InternalAssertionFailed(GraphExtError):
    """A construction produced a value that fails its own certificate"""

    exit_code = 5
