"""Per-network parameter tuning by conjugate-gradient descent.

Bounded parameters are searched in an unconstrained space: probabilities
through log-odds, certainty factors through ``atanh``; linear coefficients
are left as they are. Gradients are central differences in that space.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .calculi import CALC_IDS, PARAM_TYPES, theoretical_init
from .errors import OptimizerFailure

_BOUND_EPS = 1e-9
_CF_EPS = 1e-12


@dataclass(frozen=True)
class ProblemSet:
    """Probe points of one network and the norm posterior at each."""

    p1: np.ndarray
    p2: np.ndarray
    targets: np.ndarray

    @classmethod
    def from_probes(cls, probes, targets):
        p1 = np.array([p.p1 for p in probes], dtype=np.float64)
        p2 = np.array([p.p2 for p in probes], dtype=np.float64)
        return cls(p1, p2, np.asarray(targets, dtype=np.float64))

    def __post_init__(self):
        n = len(self.targets)
        if n == 0 or len(self.p1) != n or len(self.p2) != n:
            raise ValueError("probe and target arrays must be non-empty and aligned")
        if np.any(self.targets < 0.0) or np.any(self.targets > 1.0):
            raise ValueError("targets must lie in [0, 1]")
        for arr in (self.p1, self.p2, self.targets):
            arr.setflags(write=False)

    def __len__(self):
        return len(self.targets)


@dataclass(frozen=True)
class TunerConfig:
    restarts: int = 4
    seed: int = 0
    mycin_clamp: bool = False
    fd_step: float = 1e-5
    max_iter: int = 500
    ftol_rel: float = 1e-12
    gtol: float = 1e-8
    armijo_c: float = 1e-4
    shrink: float = 0.5
    start_box: float = 3.0
    agree_tol: float = 1e-6


@dataclass(frozen=True)
class StartResult:
    z0: np.ndarray
    z: np.ndarray
    f0: float
    f: float
    grad_norm: float
    iterations: int
    stop: str
    history: tuple = field(repr=False)


@dataclass(frozen=True)
class TuneResult:
    params: object
    mse: float
    rmse: float
    starts_agreeing: int
    init_mse: float
    starts: tuple = field(repr=False)


def objective(calculus, params, problems, mycin_clamp=False):
    """Mean squared error of ``params`` over ``problems``."""
    return float(kernels.mse(CALC_IDS[calculus], params.to_array(),
                             problems.p1, problems.p2, problems.targets,
                             bool(mycin_clamp)))


def to_search(calculus, params):
    """Search-space image of ``params``; bounded values are pulled inside first."""
    calc = CALC_IDS[calculus]
    theta = params.to_array()
    if calc != kernels.LINEAR:
        lo = np.full(theta.size, _BOUND_EPS)
        hi = 1.0 - lo
        if calc == kernels.MYCIN:
            lo[3:] = -1.0 + _CF_EPS
            hi[3:] = 1.0 - _CF_EPS
        theta = np.clip(theta, lo, hi)
    return kernels.to_search(calc, theta)


def to_model(calculus, z):
    calc = CALC_IDS[calculus]
    return PARAM_TYPES[calculus].from_array(kernels.to_model(calc, np.asarray(z, dtype=np.float64)))


def _parabolic_refine(f, z, d, f0, slope, alpha, f_alpha):
    """Move a trial step to the vertex of the parabola through it, if better."""
    curv = (f_alpha - f0 - slope * alpha) / (alpha * alpha)
    if not curv > 0.0:
        return alpha, f_alpha
    vertex = -slope / (2.0 * curv)
    if not (0.0 < vertex < 1e3 * alpha) or abs(vertex - alpha) <= 1e-3 * alpha:
        return alpha, f_alpha
    f_vertex = f(z + vertex * d)
    if f_vertex < f_alpha:
        return vertex, f_vertex
    return alpha, f_alpha


def conjugate_gradient(f, grad, z0, config=TunerConfig()):
    """Minimise ``f`` from ``z0`` with restarted Polak-Ribiere directions.

    Each iteration tries one step along the current direction, moves it to
    the vertex of the interpolating parabola when that is lower, and then
    backtracks until the Armijo condition holds. The direction is reset to steepest descent every ``n``
    iterations (``n = len(z0)``) and whenever it stops being a descent
    direction. Stops on relative objective change below ``config.ftol_rel``,
    gradient norm below ``config.gtol``, or ``config.max_iter`` iterations.
    """
    z = np.array(z0, dtype=np.float64)
    n = z.size
    fz = f(z)
    g = grad(z)
    d = -g
    f0 = fz
    history = [fz]
    prev_slope = None
    prev_step = None
    stop = "max_iter"
    it = 0
    since_restart = 0
    while it < config.max_iter:
        gnorm = math.sqrt(float(g @ g))
        if gnorm < config.gtol:
            stop = "gtol"
            break
        slope = float(g @ d)
        if slope >= 0.0 or since_restart >= n:
            d = -g
            slope = -gnorm * gnorm
            since_restart = 0

        # initial trial step from the previous iteration's decrease
        if prev_step is None:
            alpha = min(1.0, 1.0 / gnorm)
        else:
            alpha = prev_step * prev_slope / slope
            alpha = min(max(alpha, 1e-12), 1e6)
        f_new = f(z + alpha * d)
        alpha, f_new = _parabolic_refine(f, z, d, fz, slope, alpha, f_new)
        while not f_new <= fz + config.armijo_c * alpha * slope:
            alpha *= config.shrink
            if alpha * math.sqrt(float(d @ d)) < 1e-16 * (1.0 + math.sqrt(float(z @ z))):
                break
            f_new = f(z + alpha * d)
        else:
            z_new = z + alpha * d
            g_new = grad(z_new)
            it += 1
            since_restart += 1
            history.append(f_new)
            change = fz - f_new
            y = g_new - g
            beta = max(0.0, float(g_new @ y) / float(g @ g))
            prev_step, prev_slope = alpha, slope
            z, fz, g = z_new, f_new, g_new
            d = -g + beta * d
            if change <= config.ftol_rel * abs(fz) or fz == 0.0:
                stop = "ftol"
                break
            continue

        # line search failed along d
        if since_restart == 0:
            stop = "linesearch"
            break
        d = -g
        since_restart = n
        prev_step = None

    return StartResult(
        z0=np.array(z0, dtype=np.float64), z=z, f0=f0, f=fz,
        grad_norm=math.sqrt(float(g @ g)), iterations=it, stop=stop,
        history=tuple(history),
    )


def start_points(calculus, table, config, key=0):
    """Theoretical translation first, then ``config.restarts`` seeded draws."""
    calc = CALC_IDS[calculus]
    n = kernels.N_PARAMS[calc]
    ss = np.random.SeedSequence(entropy=int(config.seed) & (2**64 - 1),
                                spawn_key=(int(key), calc))
    rng = np.random.default_rng(ss)
    starts = [to_search(calculus, theoretical_init(table, calculus))]
    for _ in range(config.restarts):
        starts.append(rng.uniform(-config.start_box, config.start_box, n))
    return starts


def tune(calculus, problems, table, config=TunerConfig(), key=0):
    """Fit one calculus to one network's norm posteriors.

    Parameters
    ----------
    calculus : str
        One of ``linear``, ``independence``, ``mycin``, ``prospector``.
    problems : ProblemSet
    table : JointTable
        Source network; supplies the theoretical starting point.
    config : TunerConfig
    key : int
        Stream key (normally the network index) for the random starts.

    Returns
    -------
    TuneResult
    """
    calc = CALC_IDS[calculus]
    p1, p2, t = problems.p1, problems.p2, problems.targets
    clamp = bool(config.mycin_clamp)
    h = config.fd_step

    def f(z):
        return float(kernels.search_objective(calc, z, p1, p2, t, clamp))

    def grad(z):
        return kernels.search_gradient(calc, z, p1, p2, t, clamp, h)

    init = theoretical_init(table, calculus)
    init_mse = objective(calculus, init, problems, clamp)

    runs = tuple(conjugate_gradient(f, grad, z0, config)
                 for z0 in start_points(calculus, table, config, key))
    finite = [r for r in runs if math.isfinite(r.f)]
    if not finite:
        raise OptimizerFailure("%s: no start produced a finite objective" % calculus)
    if all(r.iterations == 0 and r.stop == "linesearch" for r in finite):
        raise OptimizerFailure("%s: line search failed from every start" % calculus)

    best = min(finite, key=lambda r: r.f)
    params = to_model(calculus, best.z)
    mse = objective(calculus, params, problems, clamp)
    if init_mse < mse:
        params, mse = init, init_mse
    agreeing = sum(1 for r in finite if r.f - best.f <= config.agree_tol)
    return TuneResult(params=params, mse=mse, rmse=math.sqrt(mse),
                      starts_agreeing=agreeing, init_mse=init_mse, starts=runs)
