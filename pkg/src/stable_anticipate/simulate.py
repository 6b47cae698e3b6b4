"""Path simulation for the anticipative stable process models.

Innovations come from the Chambers-Mallows-Stuck sampler of
:mod:`.stable`.  The anticipative recursions are run backward from a
right endpoint seeded by one truncated moving-average sum, so the
defining equations hold exactly at every interior index and the cost is
O(n + K) for a truncation depth K chosen from ``trunc_eps``.  The OU
generator uses the exact backward transition instead, so its grid
values carry no discretization error at all.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.signal import lfilter, lfiltic

from .errors import ParameterError
from .models import AR1, AR2, Aggregated, OU, PathConfig
from .spectral import ar2_ma_coefficients
from .stable import make_stable_params, sample_stable

__all__ = [
    "rng_stream", "simulate_agg", "simulate_ar1", "simulate_ar2",
    "simulate_ou",
]


def rng_stream(seed: int, *branch: int) -> np.random.Generator:
    """Independent generator for one simulation stream.

    Streams are split by (seed, branch) through numpy SeedSequence spawn
    keys: component paths and Monte Carlo batches derived from the same
    user seed never share state, and every stream is reproducible from
    the (seed, branch) pair alone.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=branch))


def _check_model(model, expected):
    if not isinstance(model, expected):
        raise ParameterError(
            "model", f"expected {expected.__name__}, got {type(model).__name__}")


def _check_cfg(cfg) -> None:
    if not isinstance(cfg, PathConfig):
        raise ParameterError("cfg", f"expected PathConfig, got {type(cfg).__name__}")


def _ma_truncation(alpha: float, ratio: float, trunc_eps: float) -> int:
    """Depth K with relative neglected scale mass below trunc_eps.

    The moving-average tail from lag K carries scale mass
    ratio^(alpha K) / (1 - ratio^alpha) in units of the innovation
    scale, which is below trunc_eps once
    K >= ln(trunc_eps (1 - ratio^alpha)) / (alpha ln ratio).
    """
    k = math.log(trunc_eps * (1.0 - ratio ** alpha)) / (alpha * math.log(ratio))
    return max(1, math.ceil(k))


def _backward_ar1(rho: float, seed_value: float, eps: np.ndarray) -> np.ndarray:
    """Run X_t = rho X_{t+1} + eps_t down from a seeded right endpoint."""
    n = eps.shape[0] + 1
    path = np.empty(n)
    path[-1] = seed_value
    if n > 1:
        y, _ = lfilter([1.0], [1.0, -rho], eps[::-1],
                       zi=np.array([rho * seed_value]))
        path[:-1] = y[::-1]
    return path


def simulate_ar1(model: AR1, cfg: PathConfig, rng=None) -> np.ndarray:
    """Stationary path of the anticipative AR(1) X_t = rho X_{t+1} + eps_t.

    One truncated moving-average sum seeds the right endpoint; running
    the defining recursion backward then extends it to a path whose
    consecutive sums share the same future-noise buffer.  The neglected
    tail has scale mass below cfg.trunc_eps relative to the innovation
    scale.
    """
    _check_model(model, AR1)
    _check_cfg(cfg)
    if rng is None:
        rng = rng_stream(cfg.seed, 0)
    n = cfg.n_points
    depth = _ma_truncation(model.alpha, abs(model.rho), cfg.trunc_eps)
    params = make_stable_params(model.alpha, model.beta, model.sigma, 0.0)
    eps = sample_stable(params, n - 1 + depth, rng)
    seed_value = float(model.rho ** np.arange(depth) @ eps[n - 1:])
    return _backward_ar1(model.rho, seed_value, eps[:n - 1])


def simulate_ou(model: OU, cfg: PathConfig, rng=None) -> np.ndarray:
    """Exact grid values of the anticipative stable OU process.

    The terminal point is drawn from the stationary marginal and the
    remaining values follow the backward transition
    X(s) = e^{-lambda dt} X(s+dt) + xi with xi the stable integral of
    the kernel over one step, so the joint law at the grid points
    {0, dt, ...} is exact.  At alpha = 1 both the marginal and the
    one-step integral carry logarithmic location terms.
    """
    _check_model(model, OU)
    _check_cfg(cfg)
    if rng is None:
        rng = rng_stream(cfg.seed, 0)
    n, dt = cfg.n_points, cfg.dt
    alpha, beta, lam = model.alpha, model.beta, model.lambda_rate
    decay = math.exp(-lam * dt)
    marg_scale = (1.0 / (alpha * lam)) ** (1.0 / alpha)
    step_scale = ((1.0 - decay ** alpha) / (alpha * lam)) ** (1.0 / alpha)
    if alpha == 1.0:
        marg_loc = 2.0 * beta / (math.pi * lam)
        step_loc = (2.0 * beta / (math.pi * lam)
                    * (1.0 - (1.0 + lam * dt) * decay))
    else:
        marg_loc = step_loc = 0.0
    terminal = sample_stable(make_stable_params(alpha, beta, marg_scale,
                                                marg_loc), 1, rng)[0]
    xi = sample_stable(make_stable_params(alpha, beta, step_scale, step_loc),
                       n - 1, rng)
    return _backward_ar1(decay, float(terminal), xi)


def simulate_agg(model: Aggregated, cfg: PathConfig, rng=None) -> np.ndarray:
    """Path of the linear aggregation c * sum_j pi_j X_{j,t}.

    Component paths are independent AR(1) simulations; component j uses
    the stream (cfg.seed, j) unless a generator is passed, in which
    case its spawned children are used in component order.
    """
    _check_model(model, Aggregated)
    _check_cfg(cfg)
    if rng is None:
        streams = [rng_stream(cfg.seed, j)
                   for j in range(len(model.components))]
    else:
        streams = rng.spawn(len(model.components))
    path = np.zeros(cfg.n_points)
    for component, stream in zip(model.components, streams):
        part = simulate_ar1(AR1(model.alpha, component.beta, component.sigma,
                                component.rho), cfg, rng=stream)
        path += component.pi * part
    return model.c * path


def simulate_ar2(model: AR2, cfg: PathConfig, rng=None) -> np.ndarray:
    """Stationary path of X_t = psi1 X_{t+1} + psi2 X_{t+2} + eps_t.

    Two adjacent right-endpoint values are seeded by truncated
    moving-average sums over a shared noise buffer (their joint law
    needs the shared terms), and the second-order recursion extends
    them backward.  Root validation and the d_k come from
    ar2_ma_coefficients.
    """
    _check_model(model, AR2)
    _check_cfg(cfg)
    if rng is None:
        rng = rng_stream(cfg.seed, 0)
    n = cfg.n_points
    alpha = model.alpha
    depth = _ar2_truncation(model, cfg.trunc_eps)
    weights = ar2_ma_coefficients(model.psi1, model.psi2, depth - 1)
    params = make_stable_params(alpha, model.beta, model.sigma, 0.0)
    eps = sample_stable(params, n + depth - 1, rng)
    last = float(weights @ eps[n - 1:])
    prev = float(weights @ eps[n - 2:n - 2 + depth])
    path = np.empty(n)
    path[-1] = last
    path[-2] = prev
    if n > 2:
        zi = lfiltic([1.0], [1.0, -model.psi1, -model.psi2], y=[prev, last])
        y, _ = lfilter([1.0], [1.0, -model.psi1, -model.psi2],
                       eps[n - 3::-1], zi=zi)
        path[:n - 2] = y[::-1]
    return path


def _ar2_truncation(model: AR2, trunc_eps: float) -> int:
    """Truncation depth for the AR(2) moving average.

    Starts from the depth the dominant inverse root would need on its
    own, then doubles until the bound |d_K|^alpha * sum_j (j+1)^alpha
    a^(alpha j) on the neglected scale mass (|d_{K+j}| <= |d_K| (j+1)
    a^j for real roots) falls below trunc_eps of the retained mass.
    """
    disc = math.sqrt(max(model.psi1 ** 2 + 4.0 * model.psi2, 0.0))
    a = max(abs(0.5 * (model.psi1 + disc)), abs(0.5 * (model.psi1 - disc)))
    if a == 0.0:
        return 1
    alpha = model.alpha
    depth = _ma_truncation(alpha, a, trunc_eps)
    a_alpha = a ** alpha
    tail_const = 0.0
    term, j = 1.0, 0
    while term > 1e-16 * max(tail_const, 1.0):
        term = (j + 1.0) ** alpha * a_alpha ** j
        tail_const += term
        j += 1
    while True:
        weights = ar2_ma_coefficients(model.psi1, model.psi2, depth - 1)
        mass = float(np.sum(np.abs(weights) ** alpha))
        if abs(weights[-1]) ** alpha * tail_const <= trunc_eps * mass:
            return depth
        depth *= 2
