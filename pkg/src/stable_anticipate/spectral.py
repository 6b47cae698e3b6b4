"""Spectral representations of (X_t, X_{t+h}) and their derived constants.

Each process model maps to a finite discrete measure Gamma_h on the unit
circle plus a shift vector mu0 (nonzero only when alpha = 1).  All the
conditional-moment machinery downstream consumes only the scalar
constants sigma1^alpha, beta1, kappa_p, lambda_p (and q0, mu1 when
alpha = 1) reduced from that measure, computed here twice: once as
spectral sums and once in closed form, so the two paths can be checked
against each other.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import (DegenerateModelError, DomainError, MomentExistenceError,
                     ParameterError, UnsupportedError)
from .models import (AR1, AR2, Aggregated, BivariateConstants, OU,
                     ProcessModel, SpectralRep)

_MERGE_TOL = 1e-12


def _signed_power(value: float, power: float) -> float:
    """Signed power v^<p> = sign(v) |v|^p."""
    if value == 0.0:
        return 0.0
    return math.copysign(abs(value) ** power, value)


def _merge_atoms(points: np.ndarray, masses: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge atoms whose directions coincide within the merge tolerance.

    Masses that are negative by no more than roundoff (1e-14 of the
    total) are clamped to zero; exact cancellations like theta beta_bar
    = -1 otherwise leave -1e-17 residues behind.
    """
    total = float(np.abs(masses).sum())
    roundoff = (masses < 0.0) & (masses >= -1e-14 * max(total, 1.0))
    masses = np.where(roundoff, 0.0, masses)
    keep = masses != 0.0
    points, masses = points[keep], masses[keep]
    if points.shape[0] == 0:
        return points.reshape(0, 2), masses
    order = np.lexsort((points[:, 1], points[:, 0]))
    points, masses = points[order], masses[order]
    out_pts: list[np.ndarray] = [points[0]]
    out_mass: list[float] = [float(masses[0])]
    for pt, m in zip(points[1:], masses[1:]):
        if np.hypot(*(pt - out_pts[-1])) <= _MERGE_TOL:
            out_mass[-1] += float(m)
        else:
            out_pts.append(pt)
            out_mass.append(float(m))
    return np.array(out_pts), np.array(out_mass)


def _check_h_integer(h) -> int:
    if not float(h).is_integer() or h < 1:
        raise DomainError(f"horizon must be an integer >= 1, got {h!r}")
    return int(h)


def ar1_spectral(alpha: float, beta: float, sigma: float, rho: float,
                 h: int) -> SpectralRep:
    """Spectral measure of (X_t, X_{t+h}) for the anticipative AR(1).

    Atoms sit at (+-1, 0) and +-(rho^h, 1)/sqrt(1 + rho^{2h}); the shift
    is zero unless alpha = 1.
    """
    model = AR1(alpha, beta, sigma, rho)
    h = _check_h_integer(h)
    sig_bar_a = sigma ** alpha / (1.0 - abs(rho) ** alpha)
    beta_bar = beta * (1.0 - abs(rho) ** alpha) / (1.0 - _signed_power(rho, alpha))
    r_ah = abs(rho) ** (alpha * h)
    signed_r_h = _signed_power(rho, alpha) ** h
    rho_h = rho ** h
    norm = math.sqrt(1.0 + rho ** (2 * h))
    direction = np.array([rho_h / norm, 1.0 / norm])

    points, masses = [], []
    for theta in (1.0, -1.0):
        axis_mass = 0.5 * sig_bar_a * (1.0 - r_ah + (1.0 - signed_r_h) * theta * beta_bar)
        points.append(np.array([theta, 0.0]))
        masses.append(axis_mass)
        off_mass = 0.5 * sig_bar_a * (1.0 + rho ** (2 * h)) ** (alpha / 2.0) \
            * (1.0 + theta * beta_bar)
        points.append(theta * direction)
        masses.append(off_mass)
    points_arr, masses_arr = _merge_atoms(np.array(points), np.array(masses))

    shift = np.zeros(2)
    if alpha == 1.0:
        sb = sig_bar_a * beta_bar  # sigma_bar * beta_bar, equals sigma beta / (1 - rho)
        log_term = math.log(1.0 + rho ** (-2 * h))
        mu_bar = -(sb / math.pi) * rho_h * log_term
        shift = np.array([
            mu_bar - (2.0 / math.pi) * sb * rho * math.log(abs(rho)) / (1.0 - rho),
            rho ** (-h) * mu_bar
            - (2.0 / math.pi) * sb * math.log(abs(rho)) * (h + rho / (1.0 - rho)),
        ])
    del model
    return SpectralRep(alpha, points_arr, masses_arr, shift)


def ou_spectral(alpha: float, beta: float, lambda_rate: float, h: float) -> SpectralRep:
    """Spectral measure of (X_t, X_{t+h}) for the stable Ornstein-Uhlenbeck flow."""
    model = OU(alpha, beta, lambda_rate)
    if h <= 0.0:
        raise DomainError(f"horizon must be positive, got {h}")
    lam = lambda_rate
    decay = math.exp(-lam * h)
    norm = math.sqrt(1.0 + decay ** 2)
    direction = np.array([decay / norm, 1.0 / norm])
    base = 1.0 / (alpha * lam)

    points, masses = [], []
    for theta in (1.0, -1.0):
        weight = base * 0.5 * (1.0 + theta * beta)
        points.append(np.array([theta, 0.0]))
        masses.append(weight * (1.0 - math.exp(-alpha * lam * h)))
        points.append(theta * direction)
        masses.append(weight * (1.0 + decay ** 2) ** (alpha / 2.0))
    points_arr, masses_arr = _merge_atoms(np.array(points), np.array(masses))

    shift = np.zeros(2)
    if alpha == 1.0:
        log_term = math.log(1.0 + math.exp(2.0 * lam * h))
        mu_bar = -(beta / (lam * math.pi)) * decay * log_term
        shift = np.array([
            mu_bar + (2.0 / (lam * math.pi)) * beta,
            math.exp(lam * h) * mu_bar + (2.0 / (lam * math.pi)) * beta * (1.0 + lam * h),
        ])
    del model
    return SpectralRep(alpha, points_arr, masses_arr, shift)


def agg_spectral(alpha: float, c: float, components, h: int) -> SpectralRep:
    """Spectral measure of an aggregation of independent AR(1) components.

    ``components`` is an iterable of (pi_j, rho_j, beta_j, sigma_j); the
    measure is the mass-scaled union of the component measures with
    coinciding directions merged.
    """
    model = _as_aggregated(alpha, c, components)
    h = _check_h_integer(h)
    all_points, all_masses = [], []
    shift = np.zeros(2)
    for comp in model.components:
        rep = ar1_spectral(alpha, comp.beta, comp.sigma, comp.rho, h)
        scale = (c * comp.pi) ** alpha
        all_points.append(rep.points)
        all_masses.append(rep.masses * scale)
        if alpha == 1.0:
            cons = closed_form_constants(
                AR1(alpha, comp.beta, comp.sigma, comp.rho), h)
            sigma1j = cons.sigma1_alpha
            correction = np.array([cons.beta1, cons.lam[0]]) \
                * sigma1j * math.log(abs(c * comp.pi)) * (2.0 / math.pi)
            shift += c * comp.pi * (rep.shift - correction)
    points_arr, masses_arr = _merge_atoms(
        np.concatenate(all_points), np.concatenate(all_masses))
    return SpectralRep(alpha, points_arr, masses_arr, shift)


def ma_spectral(alpha: float, beta: float, sigma: float, mu: float,
                coefficients, drop_tol: float = 0.0) -> SpectralRep:
    """Spectral measure of a bivariate slice of a stable moving average.

    ``coefficients`` is an array-like of shape (K, 2): the aligned
    coefficient vectors d_k multiplying a common innovation sequence.
    Each nonzero d_k contributes the atom pair +-d_k/||d_k|| with masses
    sigma^alpha (1 +- beta)/2 ||d_k||^alpha; for alpha = 1 each also
    contributes the logarithmic location correction.  Atoms with
    relative mass below ``drop_tol`` are discarded before merging.
    """
    if not (0.0 < alpha < 2.0):
        raise ParameterError("alpha", f"must lie in (0, 2), got {alpha}")
    if not (-1.0 <= beta <= 1.0):
        raise ParameterError("beta", f"must lie in [-1, 1], got {beta}")
    if sigma <= 0.0:
        raise ParameterError("sigma", f"must be positive, got {sigma}")
    d = np.atleast_2d(np.asarray(coefficients, dtype=float))
    if d.shape[1] != 2:
        raise ParameterError("coefficients", f"expected shape (K, 2), got {d.shape}")
    norms = np.hypot(d[:, 0], d[:, 1])
    nonzero = norms > 0.0
    if not nonzero.any():
        raise DegenerateModelError("all moving-average coefficient vectors are zero")
    d, norms = d[nonzero], norms[nonzero]
    directions = d / norms[:, None]

    weights = sigma ** alpha * norms ** alpha
    pts = np.concatenate([directions, -directions])
    mass = np.concatenate([weights * 0.5 * (1.0 + beta), weights * 0.5 * (1.0 - beta)])
    if drop_tol > 0.0:
        keep = mass >= drop_tol * mass.sum()
        pts, mass = pts[keep], mass[keep]
    points_arr, masses_arr = _merge_atoms(pts, mass)

    shift = d.sum(axis=0) * mu
    if alpha == 1.0:
        shift = shift - (2.0 / math.pi) * sigma * beta * (
            d * np.log(norms)[:, None]).sum(axis=0)
    return SpectralRep(alpha, points_arr, masses_arr, shift)


def ar2_ma_coefficients(psi1: float, psi2: float, count: int) -> np.ndarray:
    """Moving-average coefficients d_0..d_count of the anticipative AR(2).

    The lag polynomial 1 - psi1 z - psi2 z^2 must factor as
    (1 - a1 z)(1 - a2 z) with real a1, a2 of modulus below 1; then
    d_k = (a1^{k+1} - a2^{k+1})/(a1 - a2), or (k+1) a^k for a repeated
    root.
    """
    if psi1 == 0.0:
        raise ParameterError("psi1", "psi1 = 0 collapses to a pure lag-2 model")
    if count < 0:
        raise ParameterError("count", f"must be >= 0, got {count}")
    disc = psi1 ** 2 + 4.0 * psi2
    if disc < 0.0:
        raise DomainError(
            f"lag polynomial has complex roots (discriminant {disc}); "
            "only real-root models are supported")
    root = math.sqrt(disc)
    a1 = 0.5 * (psi1 + root)
    a2 = 0.5 * (psi1 - root)
    for a in (a1, a2):
        if abs(a) >= 1.0:
            raise DomainError(
                f"inverse root {a} has modulus >= 1; no stationary solution")
    k = np.arange(count + 1)
    if abs(a1 - a2) <= 1e-12 * max(abs(a1), abs(a2)):
        return (k + 1.0) * a1 ** k
    return (a1 ** (k + 1) - a2 ** (k + 1)) / (a1 - a2)


def bivariate_constants(rep: SpectralRep) -> BivariateConstants:
    """Reduce a spectral representation to the derived scalar constants.

    Raises a moment-existence error if positive mass sits at s1 = 0,
    since every kappa_p/lambda_p integrand then diverges.
    """
    s1 = rep.points[:, 0]
    s2 = rep.points[:, 1]
    m = rep.masses
    at_axis = s1 == 0.0
    if np.any(m[at_axis] > 0.0):
        raise MomentExistenceError(
            "spectral mass at s1 = 0: conditioning on X_t is degenerate and "
            "the kappa_p integrals diverge")
    s1, s2, m = s1[~at_axis], s2[~at_axis], m[~at_axis]

    abs_s1_a = np.abs(s1) ** rep.alpha
    signed_s1_a = np.sign(s1) * abs_s1_a
    sigma1_alpha = float((abs_s1_a * m).sum())
    if sigma1_alpha <= 0.0:
        raise MomentExistenceError("spectral measure carries no mass with s1 != 0")
    beta1 = float((signed_s1_a * m).sum()) / sigma1_alpha

    ratio = s2 / s1
    kappa, lam = [], []
    for p in range(1, 5):
        kappa.append(float((ratio ** p * abs_s1_a * m).sum()) / sigma1_alpha)
        lam.append(float((ratio ** p * signed_s1_a * m).sum()) / sigma1_alpha)

    q0 = mu1 = None
    if rep.alpha == 1.0:
        log_s1 = np.log(np.abs(s1))
        sigma1 = sigma1_alpha
        q0 = float((s2 * log_s1 * m).sum()) / sigma1
        mu1 = -(2.0 / math.pi) * float((s1 * log_s1 * m).sum())
    return BivariateConstants(rep.alpha, sigma1_alpha, beta1,
                              tuple(kappa), tuple(lam), q0, mu1)


def _as_aggregated(alpha: float, c: float, components) -> Aggregated:
    from .models import AggComponent
    comps = tuple(
        comp if isinstance(comp, AggComponent) else AggComponent(*comp)
        for comp in components)
    return Aggregated(alpha, c, comps)


def _ar1_closed_form(model: AR1, h: int) -> BivariateConstants:
    alpha, beta, sigma, rho = model.alpha, model.beta, model.sigma, model.rho
    sigma1_alpha = sigma ** alpha / (1.0 - abs(rho) ** alpha)
    beta1 = beta * (1.0 - abs(rho) ** alpha) / (1.0 - _signed_power(rho, alpha))
    r_ah = abs(rho) ** (alpha * h)
    signed_r_h = _signed_power(rho, alpha) ** h
    kappa = tuple(r_ah * rho ** (-h * p) for p in range(1, 5))
    lam = tuple(beta1 * signed_r_h * rho ** (-h * p) for p in range(1, 5))
    q0 = mu1 = None
    if alpha == 1.0:
        log_term = math.log(1.0 + rho ** (-2 * h))
        q0 = -0.5 * beta1 * log_term
        mu1 = (1.0 / math.pi) * sigma1_alpha * beta1 * rho ** h * log_term
    return BivariateConstants(alpha, sigma1_alpha, beta1, kappa, lam, q0, mu1)


def _ou_closed_form(model: OU, h: float) -> BivariateConstants:
    alpha, beta, lam_rate = model.alpha, model.beta, model.lambda_rate
    sigma1_alpha = 1.0 / (alpha * lam_rate)
    kappa = tuple(math.exp(-lam_rate * h * (alpha - p)) for p in range(1, 5))
    lam = tuple(beta * k for k in kappa)
    q0 = mu1 = None
    if alpha == 1.0:
        log_term = math.log(1.0 + math.exp(2.0 * lam_rate * h))
        q0 = -0.5 * beta * log_term
        mu1 = (beta / (lam_rate * math.pi)) * math.exp(-lam_rate * h) * log_term
    return BivariateConstants(alpha, sigma1_alpha, beta, kappa, lam, q0, mu1)


def closed_form_constants(model: ProcessModel, h) -> BivariateConstants:
    """Derived constants straight from the model parameters.

    Identical (to rounding) to bivariate_constants applied to the
    model's spectral representation; kept as an independent code path
    so the two can cross-validate each other.
    """
    if isinstance(model, AR1):
        return _ar1_closed_form(model, _check_h_integer(h))
    if isinstance(model, OU):
        if h <= 0.0:
            raise DomainError(f"horizon must be positive, got {h}")
        return _ou_closed_form(model, float(h))
    if isinstance(model, Aggregated):
        h = _check_h_integer(h)
        alpha, c = model.alpha, model.c
        comps = [ _ar1_closed_form(AR1(alpha, comp.beta, comp.sigma, comp.rho), h)
                  for comp in model.components ]
        raw = np.array([ (c * comp.pi) ** alpha * cons.sigma1_alpha
                         for comp, cons in zip(model.components, comps) ])
        sigma1_alpha = float(raw.sum())
        w = raw / sigma1_alpha
        beta1 = float(sum(wj * cons.beta1 for wj, cons in zip(w, comps)))
        kappa = tuple(float(sum(wj * cons.kappa[p] for wj, cons in zip(w, comps)))
                      for p in range(4))
        lam = tuple(float(sum(wj * cons.lam[p] for wj, cons in zip(w, comps)))
                    for p in range(4))
        q0 = mu1 = None
        if alpha == 1.0:
            q0 = float(sum(wj * cons.q0 for wj, cons in zip(w, comps)))
            mu1 = float(sum(c * comp.pi * cons.mu1
                            for comp, cons in zip(model.components, comps)))
        return BivariateConstants(alpha, sigma1_alpha, beta1, kappa, lam, q0, mu1)
    if isinstance(model, AR2):
        raise UnsupportedError(
            "no closed-form constants exist for the AR(2); build its spectral "
            "representation from ar2_ma_coefficients and use bivariate_constants")
    raise ParameterError("model", f"unknown process model {type(model).__name__}")


def spectral_rep(model: ProcessModel, h, ar2_count: int | None = None) -> SpectralRep:
    """Spectral representation of (X_t, X_{t+h}) for any supported model."""
    if isinstance(model, AR1):
        return ar1_spectral(model.alpha, model.beta, model.sigma, model.rho, h)
    if isinstance(model, OU):
        return ou_spectral(model.alpha, model.beta, model.lambda_rate, h)
    if isinstance(model, Aggregated):
        return agg_spectral(model.alpha, model.c,
                            [(comp.pi, comp.rho, comp.beta, comp.sigma)
                             for comp in model.components], h)
    if isinstance(model, AR2):
        h = _check_h_integer(h)
        if ar2_count is None:
            ar2_count = ar2_truncation_count(model.psi1, model.psi2, 1e-12) + h
        d = ar2_ma_coefficients(model.psi1, model.psi2, ar2_count)
        shifted = np.concatenate([np.zeros(h), d[:-h]]) if h <= len(d) - 1 \
            else np.zeros_like(d)
        pairs = np.column_stack([d, shifted])
        return ma_spectral(model.alpha, model.beta, model.sigma, 0.0, pairs)
    raise ParameterError("model", f"unknown process model {type(model).__name__}")


def ar2_truncation_count(psi1: float, psi2: float, tail_mass: float) -> int:
    """Truncation index K with geometric coefficient tail below tail_mass."""
    disc = psi1 ** 2 + 4.0 * psi2
    if disc < 0.0:
        raise DomainError("lag polynomial has complex roots")
    a_max = max(abs(0.5 * (psi1 + math.sqrt(disc))),
                abs(0.5 * (psi1 - math.sqrt(disc))))
    if a_max == 0.0:
        return 1
    return max(8, int(math.ceil(math.log(tail_mass * (1.0 - a_max))
                                / math.log(a_max))) + 2)


def nu_integral(rep: SpectralRep, nu: float):
    """The integral of |s1|^{-nu} against the spectral measure.

    Returns +inf when positive mass sits at s1 = 0 and nu > 0; for
    nu = 0 this is the total mass.
    """
    if nu < 0.0:
        raise ParameterError("nu", f"must be >= 0, got {nu}")
    s1 = np.abs(rep.points[:, 0])
    m = rep.masses
    if nu == 0.0:
        return float(m.sum())
    if np.any(m[s1 == 0.0] > 0.0):
        return math.inf
    active = m > 0.0
    return float((m[active] * s1[active] ** (-nu)).sum())


__all__ = [
    "agg_spectral", "ar1_spectral", "ar2_ma_coefficients",
    "ar2_truncation_count", "bivariate_constants", "closed_form_constants",
    "ma_spectral", "nu_integral", "ou_spectral", "spectral_rep",
]
