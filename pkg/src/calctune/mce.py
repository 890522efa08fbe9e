"""Minimum cross-entropy updating of a joint table on new evidence marginals.

The posterior minimises ``sum Q log(Q / P)`` subject to ``Q(E1) = p1`` and
``Q(E2) = p2``. Both constraints act on the evidence variables only, so the
solution rescales each ``(e1, e2)`` slice by a single factor and every
``P(C | e1, e2)`` survives the update. Iterative proportional fitting finds
those factors.
"""
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import kernels
from .core import JointTable, marginal
from .errors import InvalidProbe, NoConvergence

TOL_IPF = 1e-10
MAX_ITER = 100_000

#: New-evidence values assigned to each evidence node.
DEFAULT_GRID = (0.999, 0.75, 0.50, 0.25, 0.001)


@dataclass(frozen=True)
class EvidenceProbe:
    p1: float
    p2: float

    def __post_init__(self):
        for name in ("p1", "p2"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise InvalidProbe("%s=%r outside [0, 1]" % (name, v))


@dataclass(frozen=True)
class MceSolution:
    posterior_table: JointTable
    posterior_c: float
    iterations: int
    residual: float


def probe_grid(values=DEFAULT_GRID):
    """Cartesian product of ``values`` over (E1, E2), E1 varying slowest."""
    return [EvidenceProbe(float(a), float(b)) for a, b in product(values, repeat=2)]


def _check_support(prior, probe):
    m1 = marginal(prior, "E1")
    m2 = marginal(prior, "E2")
    for name, p, m in (("p1", probe.p1, m1), ("p2", probe.p2, m2)):
        if (p > 0.0 and m <= 0.0) or (p < 1.0 and m >= 1.0):
            raise InvalidProbe(
                "%s=%r needs mass the prior does not have (marginal %r)" % (name, p, m))


def mce_update(prior, probe, tol=TOL_IPF, max_iter=MAX_ITER):
    """Minimum cross-entropy posterior of ``prior`` given ``probe``.

    Parameters
    ----------
    prior : JointTable
    probe : EvidenceProbe
    tol : float
        Maximum absolute mismatch allowed in either evidence marginal.
    max_iter : int
        Sweep budget; each sweep fits E1 then E2.

    Returns
    -------
    MceSolution

    Raises
    ------
    InvalidProbe
        A probe value is positive (or below one) where the prior has no
        mass to carry it.
    NoConvergence
        The residual is still above ``tol`` after ``max_iter`` sweeps.
    """
    _check_support(prior, probe)
    q, iterations, residual = kernels.ipf_update(
        np.asarray(prior.cells), float(probe.p1), float(probe.p2), tol, max_iter)
    if residual >= tol:
        raise NoConvergence(
            "residual %.3g after %d sweeps for probe (%r, %r)"
            % (residual, iterations, probe.p1, probe.p2))
    post = JointTable.from_cells(q, renormalize_tol=1e-9)
    return MceSolution(
        posterior_table=post,
        posterior_c=marginal(post, "C"),
        iterations=int(iterations),
        residual=float(residual),
    )


def norm_targets(prior, probes, tol=TOL_IPF, max_iter=MAX_ITER):
    """Posterior ``P'(C)`` for each probe, as a float array."""
    return np.array([mce_update(prior, p, tol, max_iter).posterior_c for p in probes])
