"""Joint distributions over two binary evidence variables and a conclusion."""
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import DegenerateSlice, InvalidTable

EPS_MASS = 1e-12
SUM_TOL = 1e-12
LOAD_SUM_TOL = 1e-9

VARIABLES = ("E1", "E2", "C")

#: (e1, e2, c) triples in serialized order.
CELL_ORDER = tuple(product((0, 1), repeat=3))
CELL_NAMES = tuple("p%d%d%d" % idx for idx in CELL_ORDER)


def cell_index(e1, e2, c):
    return 4 * e1 + 2 * e2 + c


@dataclass(frozen=True, eq=False)
class JointTable:
    """Eight joint probabilities ``P(e1, e2, c)`` in ``(e1, e2, c)`` order.

    Use :meth:`from_cells` to build one; it validates and freezes the array.
    """

    cells: np.ndarray

    @classmethod
    def from_cells(cls, cells, renormalize_tol=SUM_TOL):
        """Validate ``cells`` and wrap them.

        Sums within ``SUM_TOL`` of one are kept bit-for-bit. Sums further
        off but within ``renormalize_tol`` are divided through by their
        total; anything beyond that raises :class:`InvalidTable`.
        """
        arr = np.array(cells, dtype=np.float64).reshape(-1)
        if arr.shape != (8,):
            raise InvalidTable("expected 8 cells, got %d" % arr.size)
        if not np.all(np.isfinite(arr)):
            raise InvalidTable("cells must be finite")
        if np.any(arr < 0.0):
            raise InvalidTable("cells must be non-negative")
        total = arr.sum()
        dev = abs(total - 1.0)
        if dev > max(renormalize_tol, SUM_TOL):
            raise InvalidTable("cells sum to %.17g" % total)
        if dev > SUM_TOL:
            arr = arr / total
        arr.setflags(write=False)
        return cls(arr)

    @classmethod
    def uniform(cls):
        return cls.from_cells(np.full(8, 0.125))

    @classmethod
    def from_factors(cls, p_e1, p_e2, p_c_given):
        """Table with E1 independent of E2 and ``P(C|e1,e2) = p_c_given[e1][e2]``."""
        cells = np.empty(8)
        for e1, e2, c in CELL_ORDER:
            w = (p_e1 if e1 else 1.0 - p_e1) * (p_e2 if e2 else 1.0 - p_e2)
            pc = p_c_given[e1][e2]
            cells[cell_index(e1, e2, c)] = w * (pc if c else 1.0 - pc)
        return cls.from_cells(cells)

    def __getitem__(self, idx):
        return self.cells[cell_index(*idx)]

    def __eq__(self, other):
        if not isinstance(other, JointTable):
            return NotImplemented
        return bool(np.array_equal(self.cells, other.cells))

    def __hash__(self):
        return hash(self.cells.tobytes())

    def slice_mass(self, e1, e2):
        i = cell_index(e1, e2, 0)
        return self.cells[i] + self.cells[i + 1]

    def evidence_joint(self):
        """2x2 array of ``P(e1, e2)``."""
        return self.cells.reshape(2, 2, 2).sum(axis=2)


@dataclass(frozen=True)
class ConditionalProfile:
    """Conditionals of C on each evidence state, plus the three base rates."""

    p_c_given: tuple  # ((P(C|~E1~E2), P(C|~E1E2)), (P(C|E1~E2), P(C|E1E2)))
    prior_e1: float
    prior_e2: float
    prior_c: float

    def __getitem__(self, idx):
        e1, e2 = idx
        return self.p_c_given[e1][e2]


def marginal(table, variable):
    """Probability that ``variable`` (``"E1"``, ``"E2"`` or ``"C"``) is true."""
    axis = VARIABLES.index(variable)
    cube = table.cells.reshape(2, 2, 2)
    return float(np.take(cube, 1, axis=axis).sum())


def conditional_c(table, e1, e2):
    mass = table.slice_mass(e1, e2)
    if mass < EPS_MASS:
        raise DegenerateSlice("slice (e1=%d, e2=%d) has mass %.3g" % (e1, e2, mass))
    return float(table[e1, e2, 1] / mass)


def conditional_profile(table):
    p = tuple(tuple(conditional_c(table, e1, e2) for e2 in (0, 1)) for e1 in (0, 1))
    return ConditionalProfile(
        p_c_given=p,
        prior_e1=marginal(table, "E1"),
        prior_e2=marginal(table, "E2"),
        prior_c=marginal(table, "C"),
    )


def additivity_defect(table):
    """Signed ``P(C|E1E2) - P(C|E1~E2) - P(C|~E1E2) + P(C|~E1~E2)``.

    Zero exactly when the conclusion responds additively to the two
    pieces of evidence.
    """
    return (
        conditional_c(table, 1, 1)
        - conditional_c(table, 1, 0)
        - conditional_c(table, 0, 1)
        + conditional_c(table, 0, 0)
    )


def additivity_factor(table):
    """Absolute additivity defect; lies in [0, 2]."""
    return abs(additivity_defect(table))
