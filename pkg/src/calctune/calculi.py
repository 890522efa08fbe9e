"""The four inference calculi: parameter containers, evaluators, translations.

Each parameter class round-trips through a flat float vector (the order the
kernels use) and through the JSON form ``{"calculus": name, "values": {...}}``.
"""
from dataclasses import astuple, dataclass, fields

import numpy as np

from . import kernels
from .core import conditional_profile

CALCULI = ("linear", "independence", "mycin", "prospector")
CALC_IDS = {name: i for i, name in enumerate(CALCULI)}


class _Params:
    calculus = None

    def to_array(self):
        return np.array(astuple(self), dtype=np.float64)

    @classmethod
    def from_array(cls, values):
        return cls(*(float(v) for v in values))

    @classmethod
    def field_names(cls):
        return tuple(f.name for f in fields(cls))

    def to_json(self):
        return {"calculus": self.calculus,
                "values": {k: float(v) for k, v in zip(self.field_names(), astuple(self))}}


@dataclass(frozen=True)
class LinearParams(_Params):
    a: float
    b1: float
    b2: float

    calculus = "linear"

    def __post_init__(self):
        if not np.all(np.isfinite(astuple(self))):
            raise ValueError("linear parameters must be finite")


@dataclass(frozen=True)
class IndependenceParams(_Params):
    q00: float
    q10: float
    q01: float
    q11: float

    calculus = "independence"

    def __post_init__(self):
        _require_unit(self, closed=True)


@dataclass(frozen=True)
class MycinParams(_Params):
    prior_e1: float
    prior_e2: float
    prior_c: float
    cf1: float
    cf2: float

    calculus = "mycin"

    def __post_init__(self):
        for name in ("prior_e1", "prior_e2", "prior_c"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError("%s=%r must lie strictly inside (0, 1)" % (name, v))
        for name in ("cf1", "cf2"):
            v = getattr(self, name)
            if not -1.0 <= v <= 1.0:
                raise ValueError("%s=%r must lie in [-1, 1]" % (name, v))


@dataclass(frozen=True)
class ProspectorParams(_Params):
    prior_e1: float
    prior_e2: float
    prior_c: float
    like1_t: float
    like1_f: float
    like2_t: float
    like2_f: float

    calculus = "prospector"

    def __post_init__(self):
        _require_unit(self, closed=True)


PARAM_TYPES = {
    "linear": LinearParams,
    "independence": IndependenceParams,
    "mycin": MycinParams,
    "prospector": ProspectorParams,
}


def _require_unit(params, closed):
    for f in fields(params):
        v = getattr(params, f.name)
        ok = 0.0 <= v <= 1.0 if closed else 0.0 < v < 1.0
        if not ok:
            raise ValueError("%s=%r outside [0, 1]" % (f.name, v))


def params_from_json(obj):
    cls = PARAM_TYPES[obj["calculus"]]
    values = obj["values"]
    missing = set(cls.field_names()) - set(values)
    if missing:
        raise ValueError("missing %s fields: %s" % (obj["calculus"], sorted(missing)))
    return cls(**{k: float(values[k]) for k in cls.field_names()})


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def evaluate(params, p1, p2, mycin_clamp=False):
    """Vectorised ``P'(C)`` for probe arrays ``p1``, ``p2``."""
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    scalar = p1.ndim == 0 and p2.ndim == 0
    p1, p2 = np.broadcast_arrays(np.atleast_1d(p1), np.atleast_1d(p2))
    out = kernels.evaluate(CALC_IDS[params.calculus], params.to_array(),
                           np.ascontiguousarray(p1), np.ascontiguousarray(p2),
                           bool(mycin_clamp))
    return float(out[0]) if scalar else out


def linear_eval(params, probe):
    """``a + b1*p1 + b2*p2``, deliberately not clipped to [0, 1]."""
    return evaluate(params, probe.p1, probe.p2)


def independence_eval(params, probe):
    return evaluate(params, probe.p1, probe.p2)


def mycin_eval(params, probe, clamp=False):
    """Incremental certainty-factor update of the conclusion.

    With ``clamp`` set, evidence that moved below its base rate contributes
    nothing (MYCIN's historical convention); otherwise it attenuates the
    rule's certainty factor with a sign flip.
    """
    return evaluate(params, probe.p1, probe.p2, mycin_clamp=clamp)


def prospector_eval(params, probe):
    return evaluate(params, probe.p1, probe.p2)


# ---------------------------------------------------------------------------
# translation from a joint table
# ---------------------------------------------------------------------------


def _certainty_factor(p_c_given_e, p_c):
    delta = p_c_given_e - p_c
    return delta / (1.0 - p_c) if delta >= 0.0 else delta / p_c


def theoretical_init(table, calculus):
    """Parameters obtained by reading ``table`` through a calculus's definitions.

    Raises :class:`~calctune.errors.DegenerateSlice` when a conditional the
    calculus needs is undefined.
    """
    prof = conditional_profile(table)
    if calculus == "linear":
        a = prof[0, 0]
        return LinearParams(a, prof[1, 0] - a, prof[0, 1] - a)
    if calculus == "independence":
        return IndependenceParams(prof[0, 0], prof[1, 0], prof[0, 1], prof[1, 1])

    cube = table.cells.reshape(2, 2, 2)
    p_c = prof.prior_c
    if calculus == "mycin":
        # P(C|E1) and P(C|E2)
        pc_e1 = cube[1, :, 1].sum() / cube[1].sum()
        pc_e2 = cube[:, 1, 1].sum() / cube[:, 1].sum()
        return MycinParams(
            prof.prior_e1, prof.prior_e2, p_c,
            float(np.clip(_certainty_factor(pc_e1, p_c), -1.0, 1.0)),
            float(np.clip(_certainty_factor(pc_e2, p_c), -1.0, 1.0)),
        )
    if calculus == "prospector":
        c_true = cube[:, :, 1].sum()
        c_false = cube[:, :, 0].sum()
        return ProspectorParams(
            prof.prior_e1, prof.prior_e2, p_c,
            float(cube[1, :, 1].sum() / c_true), float(cube[1, :, 0].sum() / c_false),
            float(cube[:, 1, 1].sum() / c_true), float(cube[:, 1, 0].sum() / c_false),
        )
    raise ValueError("unknown calculus %r" % (calculus,))
