"""Hot numeric kernels.

Everything here is written in the subset of numpy that numba compiles, so
the same source serves as the jitted path and as the pure-numpy fallback
(see :mod:`calctune._accel`). Higher-level modules wrap these with
validation and typed containers; callers outside the package should not
need them directly.

Cell layout for a joint table is ``index = 4*e1 + 2*e2 + c``.
"""
import math

import numpy as np

from ._accel import njit

LINEAR = 0
INDEPENDENCE = 1
MYCIN = 2
PROSPECTOR = 3

N_PARAMS = (3, 4, 5, 7)

EPS_P = 1e-9


# ---------------------------------------------------------------------------
# minimum cross-entropy update
# ---------------------------------------------------------------------------


@njit
def _e1_mass(q):
    return q[4] + q[5] + q[6] + q[7]


@njit
def _e2_mass(q):
    return q[2] + q[3] + q[6] + q[7]


@njit
def ipf_update(prior, p1, p2, tol, max_iter):
    """Fit the E1 and E2 marginals of ``prior`` to ``(p1, p2)``.

    Returns ``(cells, iterations, residual)`` where residual is the larger
    absolute mismatch of the two evidence marginals after the last sweep.
    """
    q = prior.copy()
    residual = max(abs(_e1_mass(q) - p1), abs(_e2_mass(q) - p2))
    it = 0
    while residual >= tol and it < max_iter:
        m1 = _e1_mass(q)
        m0 = q[0] + q[1] + q[2] + q[3]
        s1 = p1 / m1 if m1 > 0.0 else 0.0
        s0 = (1.0 - p1) / m0 if m0 > 0.0 else 0.0
        for k in range(4):
            q[k] *= s0
            q[k + 4] *= s1

        m1 = _e2_mass(q)
        m0 = q[0] + q[1] + q[4] + q[5]
        s1 = p2 / m1 if m1 > 0.0 else 0.0
        s0 = (1.0 - p2) / m0 if m0 > 0.0 else 0.0
        for k in (0, 1, 4, 5):
            q[k] *= s0
            q[k + 2] *= s1

        it += 1
        residual = max(abs(_e1_mass(q) - p1), abs(_e2_mass(q) - p2))
    return q, it, residual


# ---------------------------------------------------------------------------
# calculus evaluators, vectorised over probe arrays
# ---------------------------------------------------------------------------


@njit
def linear_eval(theta, p1, p2):
    return theta[0] + theta[1] * p1 + theta[2] * p2


@njit
def independence_eval(theta, p1, p2):
    n1 = 1.0 - p1
    n2 = 1.0 - p2
    return n1 * n2 * theta[0] + p1 * n2 * theta[1] + n1 * p2 * theta[2] + p1 * p2 * theta[3]


@njit
def _clip_p(x):
    return min(max(x, EPS_P), 1.0 - EPS_P)


@njit
def _evidence_certainty(p, prior):
    up = (p - prior) / (1.0 - prior)
    down = (p - prior) / prior
    return np.where(p >= prior, up, down)


@njit
def cf_combine(c1, c2):
    """Parallel combination of two certainty-factor arrays."""
    both_pos = c1 + c2 - c1 * c2
    both_neg = c1 + c2 + c1 * c2
    denom = 1.0 - np.minimum(np.abs(c1), np.abs(c2))
    safe = np.where(denom > 0.0, denom, 1.0)
    mixed = np.where(denom > 0.0, (c1 + c2) / safe, 0.0)
    return np.where((c1 >= 0.0) & (c2 >= 0.0), both_pos,
                    np.where((c1 <= 0.0) & (c2 <= 0.0), both_neg, mixed))


@njit
def mycin_eval(theta, p1, p2, clamp):
    pe1 = _clip_p(theta[0])
    pe2 = _clip_p(theta[1])
    pc = _clip_p(theta[2])
    u1 = _evidence_certainty(p1, pe1)
    u2 = _evidence_certainty(p2, pe2)
    if clamp:
        u1 = np.maximum(u1, 0.0)
        u2 = np.maximum(u2, 0.0)
    c = cf_combine(theta[3] * u1, theta[4] * u2)
    return np.where(c >= 0.0, pc + c * (1.0 - pc), pc * (1.0 + c))


@njit
def _odds(x):
    return x / (1.0 - x)


@njit
def _interpolated_posterior(p, pe, pc, like_t, like_f):
    p_true = _clip_p(like_t * pc / (like_t * pc + like_f * (1.0 - pc)))
    p_false = _clip_p((1.0 - like_t) * pc
                      / ((1.0 - like_t) * pc + (1.0 - like_f) * (1.0 - pc)))
    below = p_false + (p / pe) * (pc - p_false)
    above = pc + ((p - pe) / (1.0 - pe)) * (p_true - pc)
    post = np.where(p <= pe, below, above)
    return np.minimum(np.maximum(post, EPS_P), 1.0 - EPS_P)


@njit
def prospector_eval(theta, p1, p2):
    pe1 = _clip_p(theta[0])
    pe2 = _clip_p(theta[1])
    pc = _clip_p(theta[2])
    post1 = _interpolated_posterior(p1, pe1, pc, _clip_p(theta[3]), _clip_p(theta[4]))
    post2 = _interpolated_posterior(p2, pe2, pc, _clip_p(theta[5]), _clip_p(theta[6]))
    prior_odds = _odds(pc)
    lam1 = _odds(post1) / prior_odds
    lam2 = _odds(post2) / prior_odds
    o = prior_odds * lam1 * lam2
    return o / (1.0 + o)


@njit
def evaluate(calc, theta, p1, p2, clamp):
    if calc == LINEAR:
        return linear_eval(theta, p1, p2)
    elif calc == INDEPENDENCE:
        return independence_eval(theta, p1, p2)
    elif calc == MYCIN:
        return mycin_eval(theta, p1, p2, clamp)
    return prospector_eval(theta, p1, p2)


# ---------------------------------------------------------------------------
# search-space transforms
# ---------------------------------------------------------------------------


@njit
def _expit(z):
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@njit
def _logit(p):
    return math.log(p) - math.log1p(-p)


@njit
def _is_cf_slot(calc, i):
    return calc == MYCIN and i >= 3


@njit
def to_model(calc, z):
    """Map a search-space vector to natural parameters."""
    theta = np.empty(z.shape[0])
    for i in range(z.shape[0]):
        if calc == LINEAR:
            theta[i] = z[i]
        elif _is_cf_slot(calc, i):
            theta[i] = math.tanh(z[i])
        else:
            theta[i] = _expit(z[i])
    return theta


@njit
def to_search(calc, theta):
    """Inverse of :func:`to_model`; bounded values must be interior."""
    z = np.empty(theta.shape[0])
    for i in range(theta.shape[0]):
        if calc == LINEAR:
            z[i] = theta[i]
        elif _is_cf_slot(calc, i):
            z[i] = math.atanh(theta[i])
        else:
            z[i] = _logit(theta[i])
    return z


# ---------------------------------------------------------------------------
# tuning objective
# ---------------------------------------------------------------------------


@njit
def mse(calc, theta, p1, p2, targets, clamp):
    r = evaluate(calc, theta, p1, p2, clamp) - targets
    return np.mean(r * r)


@njit
def search_objective(calc, z, p1, p2, targets, clamp):
    return mse(calc, to_model(calc, z), p1, p2, targets, clamp)


@njit
def search_gradient(calc, z, p1, p2, targets, clamp, h):
    """Central-difference gradient of :func:`search_objective` at ``z``."""
    n = z.shape[0]
    g = np.empty(n)
    zp = z.copy()
    for i in range(n):
        zp[i] = z[i] + h
        fp = search_objective(calc, zp, p1, p2, targets, clamp)
        zp[i] = z[i] - h
        fm = search_objective(calc, zp, p1, p2, targets, clamp)
        zp[i] = z[i]
        g[i] = (fp - fm) / (2.0 * h)
    return g
