"""Conditional moments of anticipative stable processes.

Assembles E[X_{t+h}^p | X_t = x] for p = 1..4 from the model's
bivariate constants and the kernel integrals of :mod:`.quadrature`,
together with the derived summary moments (mean, variance, skewness,
excess kurtosis), their large-|x| limits, and the two-point law that
the conditional distribution approaches far in the tail.

Existence of the p-th moment is gated by the sufficient ranges
p = 1: alpha in (0, 2); p = 2: (1/2, 2); p = 3: (1, 2); p = 4:
(3/2, 2).  alpha = 1 is served by a separate branch (orders 1 and 2
only) built on the logarithmic kernels of the shift-cancelled process.
"""

from __future__ import annotations

import math
from math import comb

from .errors import (DomainError, MomentExistenceError, NumericalError,
                     ParameterError, UnsupportedError)
from .models import (AR1, AR2, Aggregated, BivariateConstants, MomentResult,
                     OU, ProcessModel, Regime, ThetaPair, ThetaSet)
from .quadrature import eval_HcHs, eval_U, eval_V, eval_W, moment_basis
from .spectral import bivariate_constants, closed_form_constants, spectral_rep
from .stable import marginal_tail_density

__all__ = [
    "asymptotic_moments", "bernoulli_summary", "build_thetas", "cond_moment",
    "cond_summary", "kurtosis_min_horizon", "linearity_check",
]

# Sufficient alpha range for existence of the p-th conditional moment.
_ALPHA_RANGE = {1: (0.0, 2.0), 2: (0.5, 2.0), 3: (1.0, 2.0), 4: (1.5, 2.0)}

# Below this marginal density the exact formulas divide by a vanishing
# f_X(x) and the large-|x| slope is returned instead.
_FAR_TAIL_DENSITY = 1e-12

# Relative error heuristic attached to far-tail asymptotic values.
_ASYMPTOTIC_REL_ERR = 0.02


def _spectral_factor(q: int, constants: BivariateConstants, a: float) -> complex:
    """Complex factor kappa_q - i a lambda_q, with kappa_0 = 1, lambda_0 = beta1."""
    if q == 0:
        return complex(1.0, -a * constants.beta1)
    return complex(constants.kappa[q - 1], -a * constants.lam[q - 1])


def _product_theta(qs, extra_i: bool, constants: BivariateConstants,
                   a: float) -> ThetaPair:
    """Coefficient pair of a product of spectral factors.

    ``extra_i`` marks products that carry a leftover imaginary unit,
    which swaps the roles of the cosine and sine kernels: the pair is
    then (-Im P, Re P) instead of (Re P, Im P).
    """
    prod = complex(1.0, 0.0)
    for q in qs:
        prod *= _spectral_factor(q, constants, a)
    if extra_i:
        return ThetaPair(-prod.imag, prod.real)
    return ThetaPair(prod.real, prod.imag)


def _combine(*terms) -> ThetaPair:
    t1 = sum(c * th.t1 for c, th in terms)
    t2 = sum(c * th.t2 for c, th in terms)
    return ThetaPair(t1, t2)


def build_thetas(constants: BivariateConstants, alpha: float) -> ThetaSet:
    """Coefficient pairs weighting the kernel integrals for p = 2..4.

    ``theta1`` feeds the second conditional moment, ``theta2``/``theta3``
    the third, and ``theta4``..``theta6`` the fourth.  The fourth-order
    pairs are assembled from products of the complex spectral factors
    kappa_q - i a lambda_q; the ratio r = (alpha-1)/(2 alpha-3) they
    contain is only meaningful where the fourth moment exists
    (alpha > 3/2), so at exactly alpha = 3/2 the fourth-order pairs are
    filled with zeros rather than left infinite.
    """
    if alpha == 1.0:
        raise DomainError("theta coefficients are defined for alpha != 1")
    a = math.tan(math.pi * alpha / 2.0)
    b1 = constants.beta1
    k1, k2, k3, _ = constants.kappa
    l1, l2, l3, _ = constants.lam

    theta1 = ThetaPair(k1 ** 2 - a ** 2 * l1 ** 2 + a ** 2 * b1 * l2 - k2,
                       a * (l2 + b1 * k2) - 2.0 * a * l1 * k1)

    # third order; kk/ll pair the first- and second-order constants
    kk = k1 * l2 + k2 * l1
    ll = k1 * k2 - a ** 2 * l1 * l2
    theta2 = ThetaPair(3.0 * (ll + a ** 2 * b1 * l3 - k3),
                       3.0 * a * (l3 + b1 * k3 - kk))
    theta3 = ThetaPair(
        a * (l3 * (1.0 - a ** 2 * b1 ** 2) + 2.0 * b1 * k3
             + 2.0 * l1 * (3.0 * k1 ** 2 - a ** 2 * l1 ** 2)
             - 3.0 * (kk + b1 * ll)),
        k3 * (1.0 - a ** 2 * b1 ** 2) - 2.0 * a ** 2 * b1 * l3
        + 2.0 * (k1 ** 3 - 3.0 * a ** 2 * k1 * l1 ** 2)
        + 3.0 * (a ** 2 * b1 * kk - ll))

    # fourth order: each pair below is a product of spectral factors,
    # indexed by the orders q of the factors it contains
    j1 = _product_theta((2, 1, 1), True, constants, a)
    j2 = _product_theta((3, 0, 1), True, constants, a)
    j3 = _product_theta((4, 0), True, constants, a)
    j4 = _product_theta((3, 1), True, constants, a)
    j6 = _product_theta((3, 1), False, constants, a)
    j7 = _product_theta((4,), False, constants, a)
    j8 = _product_theta((3, 0, 1), False, constants, a)
    j10 = _product_theta((4, 0, 0), False, constants, a)
    j11 = _product_theta((2, 1, 1), False, constants, a)
    j14 = _product_theta((3, 1), False, constants, a)
    j15 = _product_theta((2, 2), False, constants, a)
    j16 = _product_theta((4, 0), False, constants, a)
    j17 = _product_theta((2, 0, 1, 1), False, constants, a)
    j18 = _product_theta((1, 1, 1, 1), False, constants, a)
    j19 = _product_theta((3, 0, 0, 1), False, constants, a)

    kc1 = _combine((3.0, j1), (-2.0, j2))
    kc2 = _combine((2.0, j3), (-2.0, j4))
    kc3 = _combine((1.0, j10), (-3.0, j11), (-1.0, j8))
    kc4 = _combine((4.0, j14), (-3.0, j15), (-1.0, j16))
    kc5 = _combine((3.0, j17), (-1.0, j18), (-1.0, j19))
    kc6 = j6
    kc7 = j7

    denom = 2.0 * alpha - 3.0
    r = (alpha - 1.0) / denom if denom != 0.0 else 0.0
    ab = a * b1
    theta4 = ThetaPair(
        -kc2.t2 + 2.0 * kc6.t1 - 2.0 * (kc7.t1 + ab * kc7.t2) - r * kc4.t1,
        kc2.t1 + 2.0 * kc6.t2 - 2.0 * (kc7.t2 - ab * kc7.t1) - r * kc4.t2)
    theta5 = ThetaPair(
        6.0 * kc1.t1 + 3.0 * (kc2.t1 + ab * kc2.t2) - 2.0 * kc3.t2
        + 5.0 * r * (ab * kc4.t1 - kc4.t2),
        6.0 * kc1.t2 + 3.0 * (kc2.t2 - ab * kc2.t1) + 2.0 * kc3.t1
        + 5.0 * r * (kc4.t1 + ab * kc4.t2))
    theta6 = ThetaPair(
        kc3.t1 + ab * kc3.t2
        + r * (kc4.t1 * (1.0 - ab ** 2) + 2.0 * ab * kc4.t2) + 3.0 * kc5.t1,
        kc3.t2 - ab * kc3.t1
        + r * (kc4.t2 * (1.0 - ab ** 2) - 2.0 * ab * kc4.t1) + 3.0 * kc5.t2)

    return ThetaSet(theta1, theta2, theta3, theta4, theta5, theta6)


def _gate_order(p, alpha: float) -> None:
    if isinstance(p, bool) or not isinstance(p, int) or not 1 <= p <= 4:
        raise ParameterError("p", f"moment order must be an integer in 1..4, got {p!r}")
    if alpha == 1.0:
        if p >= 3:
            raise UnsupportedError(
                f"conditional moments of order {p} are not available at "
                "alpha = 1 (only orders 1 and 2 have closed forms)")
        return
    lo, hi = _ALPHA_RANGE[p]
    if not lo < alpha < hi:
        raise MomentExistenceError(p=p, alpha=alpha, required=f"({lo}, {hi})")


def _gate_halfline(x: float, alpha: float, beta1: float) -> None:
    # with alpha < 1 and a totally skewed conditioning marginal the
    # moment is only defined on the support half-line
    if alpha < 1.0 and abs(beta1) == 1.0 and beta1 * x < 0.0:
        side = "x >= 0" if beta1 > 0 else "x <= 0"
        raise DomainError(
            f"conditional moments with alpha < 1 and beta1 = {beta1:+g} are "
            f"defined only for {side}; got x = {x}")


def _tail_moment(p: int, x: float, constants: BivariateConstants,
                 density: float) -> MomentResult:
    """Large-|x| evaluation: E[X_{t+h}^p | X_t = x] ~ slope_p * x^p."""
    direction = math.copysign(1.0, x)
    denom = 1.0 + direction * constants.beta1
    if denom <= 0.0:
        raise NumericalError(
            f"marginal density {density:.3e} at x = {x} is below the exact-"
            f"regime floor {_FAR_TAIL_DENSITY:g} on the thin side of a "
            "totally skewed marginal; no moment expansion is available there")
    slope = (constants.kappa[p - 1] + direction * constants.lam[p - 1]) / denom
    value = slope * x ** p
    return MomentResult(value, _ASYMPTOTIC_REL_ERR * abs(value),
                        Regime.ASYMPTOTIC)


def _kernel_term(theta: ThetaPair, basis, n: int):
    cres, sres = basis.c[n - 1], basis.s[n - 1]
    value = theta.t1 * cres.value + theta.t2 * sres.value
    err = (abs(theta.t1) * cres.abs_err_estimate
           + abs(theta.t2) * sres.abs_err_estimate)
    return value, err


def _assemble(p: int, x: float, constants: BivariateConstants, alpha: float,
              thetas: ThetaSet | None, basis):
    """Exact-regime moment value and propagated error for alpha != 1."""
    a = math.tan(math.pi * alpha / 2.0)
    b1 = constants.beta1
    sig_a = constants.sigma1_alpha
    kap = constants.kappa[p - 1]
    lam = constants.lam[p - 1]

    pf, pf_err = basis.h0_cos.value, basis.h0_cos.abs_err_estimate
    hx, hx_err = basis.h0_sin.value, basis.h0_sin.abs_err_estimate
    if pf <= 0.0:
        raise NumericalError(
            f"kernel quadrature returned a nonpositive marginal density at x = {x}",
            partial_value=pf, err_estimate=pf_err)

    g = a * b1 * x + (1.0 - x * hx) / pf
    g_err = (abs(x) * hx_err + abs(1.0 - x * hx) * pf_err / pf) / pf
    amp = a * (lam - b1 * kap) / (1.0 + (a * b1) ** 2)
    value = kap * x ** p + amp * x ** (p - 1) * g
    err = abs(amp * x ** (p - 1)) * g_err
    if p == 1:
        return value, err

    scale2 = alpha ** 2 * sig_a ** 2
    if p == 2:
        kv, ke = _kernel_term(thetas.theta1, basis, 2)
        kern, kern_err = scale2 * kv, scale2 * ke
    elif p == 3:
        kv2, ke2 = _kernel_term(thetas.theta2, basis, 2)
        kv3, ke3 = _kernel_term(thetas.theta3, basis, 3)
        w3 = alpha * sig_a
        kern = 0.5 * scale2 * (x * kv2 + w3 * kv3)
        kern_err = 0.5 * scale2 * (abs(x) * ke2 + w3 * ke3)
    else:
        kv2, ke2 = _kernel_term(thetas.theta4, basis, 2)
        kv3, ke3 = _kernel_term(thetas.theta5, basis, 3)
        kv4, ke4 = _kernel_term(thetas.theta6, basis, 4)
        w3 = alpha * sig_a / 6.0
        w4 = alpha ** 2 * sig_a ** 2 / 3.0
        kern = scale2 * (0.5 * x ** 2 * kv2 + w3 * x * kv3 + w4 * kv4)
        kern_err = scale2 * (0.5 * x ** 2 * ke2 + w3 * abs(x) * ke3 + w4 * ke4)
    value -= kern / pf
    err += kern_err / pf + abs(kern) * pf_err / pf ** 2
    return value, err


def _tail_moment_alpha1(p: int, xt: float, constants: BivariateConstants,
                        mu20: float, density: float) -> MomentResult:
    direction = math.copysign(1.0, xt)
    denom = 1.0 + direction * constants.beta1
    if denom <= 0.0:
        raise NumericalError(
            f"marginal density {density:.3e} is below the exact-regime floor "
            f"{_FAR_TAIL_DENSITY:g} on the thin side of a totally skewed "
            "marginal; no moment expansion is available there")
    shifted = [(constants.kappa[j - 1] + direction * constants.lam[j - 1])
               / denom * xt ** j for j in range(1, p + 1)]
    value = mu20 ** p + sum(comb(p, j) * mu20 ** (p - j) * shifted[j - 1]
                            for j in range(1, p + 1))
    return MomentResult(value, _ASYMPTOTIC_REL_ERR * abs(value),
                        Regime.ASYMPTOTIC)


def _alpha1_shifted_moments(p: int, z: float, constants: BivariateConstants,
                            xt: float, pf: float, pf_err: float, tol: float):
    """Moments of the shift-cancelled process, orders 1..p, as (value, err)."""
    a = 2.0 / math.pi
    sigma1 = constants.sigma1_alpha
    b1 = constants.beta1
    q0 = constants.q0
    k1, k2 = constants.kappa[0], constants.kappa[1]
    l1, l2 = constants.lam[0], constants.lam[1]
    out = []

    # The skewed-marginal form divides by beta1, so kernel noise in it
    # grows like tol / |beta1|.  Below sqrt(tol) that exceeds the
    # O(beta1) skew corrections dropped by the symmetric form, which
    # therefore takes over; the dropped corrections are charged to the
    # error estimate.  (Weighted-average constants of aggregated models
    # can leave beta1 at roundoff size instead of exactly 0.0.)
    if abs(b1) > math.sqrt(tol):
        u_res = eval_U(xt, constants, tol)
        upf = u_res.value / pf
        upf_err = (u_res.abs_err_estimate + abs(upf) * pf_err) / pf
        m1 = (-a * sigma1 * q0 + k1 * z
              + (l1 - b1 * k1) / b1 * (z - sigma1 * upf))
        e1 = abs((l1 - b1 * k1) / b1) * sigma1 * upf_err
        out.append((m1, e1))
        if p == 2:
            w_res = eval_W(xt, constants, tol)
            base = (sigma1 ** 2 * (a ** 2 * q0 ** 2 - k1 ** 2)
                    + 2.0 * sigma1 * l1 / b1 * (sigma1 * k1 - a * q0 * z)
                    + l2 / b1 * (z ** 2 - sigma1 ** 2))
            cu = (a * sigma1 * q0 * (l1 - b1 * k1)
                  + (k1 * l1 - l2) * z) * 2.0 * sigma1 / b1
            cw = a ** 2 * sigma1 * b1 * (l1 ** 2 - b1 * l2)
            bracket = l2 + b1 * k2 - 2.0 * k1 * l1 + cw * w_res.value
            m2 = base + cu * upf + bracket * sigma1 / (b1 * pf)
            e2 = (abs(cu) * upf_err
                  + abs(cw) * sigma1 / abs(b1) / pf * w_res.abs_err_estimate
                  + abs(bracket) * sigma1 / abs(b1) / pf ** 2 * pf_err)
            out.append((m2, e2))
    else:
        # beta1 = 0: the conditioning marginal is Cauchy(mu1, sigma1),
        # so pf and the distribution function are exact closed forms
        v_res = eval_V(xt, constants, tol)
        m1 = -a * sigma1 * q0 + k1 * z - a * sigma1 * l1 * v_res.value / pf
        e1 = (a * sigma1 * abs(l1) * v_res.abs_err_estimate / pf
              + abs(b1) * (abs(m1) + sigma1 + abs(z)))
        out.append((m1, e1))
        if p == 2:
            w_res = eval_W(xt, constants, tol)
            fdens = pf / math.pi
            cdf_gap = math.atan2(z, sigma1) / math.pi  # F(x) - 1/2
            m2 = (sigma1 ** 2 * (k2 + a ** 2 * q0 ** 2 - k1 ** 2)
                  - 2.0 * a * sigma1 * k1 * q0 * z + k2 * z ** 2
                  + a * sigma1 * (l2 - 2.0 * l1 * k1) * cdf_gap / fdens
                  + a * sigma1 * l1 / pf
                  * (2.0 * (a * sigma1 * q0 - k1 * z) * v_res.value
                     + a * sigma1 * l1 * w_res.value))
            e2 = (a * sigma1 * abs(l1) / pf
                  * (2.0 * abs(a * sigma1 * q0 - k1 * z) * v_res.abs_err_estimate
                     + a * sigma1 * abs(l1) * w_res.abs_err_estimate)
                  + abs(b1) * (abs(m2) + (sigma1 + abs(z)) ** 2))
            out.append((m2, e2))
    return out


def _cond_moment_alpha1(p: int, x: float, model: ProcessModel, h,
                        constants: BivariateConstants, tol: float,
                        shifted: bool) -> MomentResult:
    if shifted:
        mu10 = mu20 = 0.0
    else:
        rep = spectral_rep(model, h)
        mu10, mu20 = float(rep.shift[0]), float(rep.shift[1])
    xt = x - mu10
    z = xt - constants.mu1
    sigma1 = constants.sigma1_alpha
    b1 = constants.beta1
    direction = math.copysign(1.0, xt)
    skew = 1.0 + direction * b1

    # cheap pre-screen on the power tail (see cond_moment)
    if z != 0.0 and skew >= 1e-3:
        tail = marginal_tail_density(1.0, sigma1, b1, z)
        if tail < 0.5 * _FAR_TAIL_DENSITY:
            return _tail_moment_alpha1(p, xt, constants, mu20, tail)

    if abs(b1) <= math.sqrt(tol):
        pf, pf_err = sigma1 / (sigma1 ** 2 + z ** 2), 0.0
    else:
        hc0, _ = eval_HcHs(0, xt, constants, tol)
        pf, pf_err = hc0.value, hc0.abs_err_estimate
    if pf <= 0.0:
        raise NumericalError(
            f"kernel quadrature returned a nonpositive marginal density at x = {x}",
            partial_value=pf, err_estimate=pf_err)
    density = pf / math.pi
    if density < _FAR_TAIL_DENSITY:
        if z == 0.0 or skew == 0.0:
            raise NumericalError(
                f"marginal density {density:.3e} at x = {x} is below the "
                f"exact-regime floor {_FAR_TAIL_DENSITY:g} and no asymptotic "
                "expansion applies at this point",
                partial_value=None, err_estimate=pf_err / math.pi)
        return _tail_moment_alpha1(p, xt, constants, mu20, density)

    moments = _alpha1_shifted_moments(p, z, constants, xt, pf, pf_err, tol)
    value = mu20 ** p
    err = 0.0
    for j in range(1, p + 1):
        co = comb(p, j) * mu20 ** (p - j)
        value += co * moments[j - 1][0]
        err += abs(co) * moments[j - 1][1]
    return MomentResult(value, err, Regime.EXACT)


def cond_moment(p: int, x: float, model: ProcessModel, h,
                tol: float = 1e-10, *, shifted: bool = False) -> MomentResult:
    """Conditional moment E[X_{t+h}^p | X_t = x].

    Returns the kernel-integral evaluation with a propagated error
    estimate (regime ``exact``).  Once the marginal density at the
    conditioning point falls below 1e-12 the exact formula's division
    by f_X(x) amplifies quadrature noise past usefulness and the
    large-|x| slope is returned instead (regime ``asymptotic`` with a
    2% error heuristic).

    For alpha = 1 the moment is computed on the shift-cancelled process
    and mapped back through the binomial expansion in the shift;
    ``shifted=True`` skips the mapping and interprets ``x`` as a
    coordinate of the shift-cancelled process.  For alpha != 1 the flag
    has no effect because the processes carry no shift.

    Raises
    ------
    MomentExistenceError
        order p outside its alpha existence range.
    UnsupportedError
        AR2 models, or alpha = 1 with p >= 3.
    DomainError
        alpha < 1, |beta1| = 1 and x on the wrong half-line.
    NumericalError
        density too small on the thin side of a totally skewed
        marginal, or quadrature failure.
    """
    if isinstance(model, AR2):
        raise UnsupportedError(
            "conditional moments of the AR(2) are not implemented; "
            "use the Monte Carlo oracle instead")
    if not (isinstance(tol, (int, float)) and tol > 0.0):
        raise ParameterError("tol", f"must be positive, got {tol!r}")
    x = float(x)
    if not math.isfinite(x):
        raise ParameterError("x", f"conditioning point must be finite, got {x!r}")
    constants = closed_form_constants(model, h)
    alpha = constants.alpha
    _gate_order(p, alpha)
    if alpha == 1.0:
        return _cond_moment_alpha1(p, x, model, h, constants, tol, shifted)
    _gate_halfline(x, alpha, constants.beta1)
    thetas = build_thetas(constants, alpha) if p >= 2 else None

    # cheap pre-screen: when even the power tail puts the marginal
    # density below half the switch threshold, skip the quadrature
    # entirely.  The leading-order tail estimate is accurate to a few
    # percent once the density has fallen this far, so the factor-two
    # margin cannot misclassify a point whose true density is above
    # the floor.  (Guarded away from the thin side of nearly totally
    # skewed marginals, where the power-tail estimate is void.)
    direction = math.copysign(1.0, x)
    skew = 1.0 + direction * constants.beta1
    if x != 0.0 and skew >= 1e-3:
        tail = marginal_tail_density(alpha, constants.sigma1_alpha,
                                     constants.beta1, x)
        if tail < 0.5 * _FAR_TAIL_DENSITY:
            return _tail_moment(p, x, constants, tail)

    basis = moment_basis(x, constants, alpha, tol,
                         max_order=0 if p == 1 else p)
    if basis.density < _FAR_TAIL_DENSITY:
        if x == 0.0 or skew == 0.0:
            raise NumericalError(
                f"marginal density {basis.density:.3e} at x = {x} is below "
                f"the exact-regime floor {_FAR_TAIL_DENSITY:g} and no "
                "asymptotic expansion applies at this point",
                partial_value=None, err_estimate=basis.density_err)
        return _tail_moment(p, x, constants, basis.density)
    value, err = _assemble(p, x, constants, alpha, thetas, basis)
    return MomentResult(value, err, Regime.EXACT)


def _worst_regime(*results: MomentResult) -> Regime:
    for res in results:
        if res.regime is Regime.ASYMPTOTIC:
            return Regime.ASYMPTOTIC
    return Regime.EXACT


def cond_summary(x: float, model: ProcessModel, h, tol: float = 1e-10):
    """Mean, variance, skewness and excess kurtosis of X_{t+h} | X_t = x.

    Returns a 4-tuple of MomentResult.  Orders whose existence range
    excludes the model's alpha are reported as ``undefined`` rather
    than raised, so e.g. alpha = 1.3 yields (mean, variance, skewness,
    undefined).  A variance more negative than -10 tol raises a
    numerical error with diagnostics; a variance in [-10 tol, 0) is
    clamped to zero, in which case the standardized moments are
    reported as undefined.
    """
    raw = []
    for order in (1, 2, 3, 4):
        try:
            raw.append(cond_moment(order, x, model, h, tol))
        except (MomentExistenceError, UnsupportedError):
            if order == 1:
                raise
            raw.append(None)
    m1, m2, m3, m4 = raw

    undefined = MomentResult.undefined()
    if m2 is None:
        return m1, undefined, undefined, undefined

    s2 = m2.value - m1.value ** 2
    s2_err = m2.err + 2.0 * abs(m1.value) * m1.err + m1.err ** 2
    if s2 < -10.0 * tol:
        raise NumericalError(
            f"conditional variance {s2:.6e} at x = {x} is negative beyond "
            f"tolerance (mean {m1.value!r} +/- {m1.err:.2e}, second moment "
            f"{m2.value!r} +/- {m2.err:.2e})",
            partial_value=s2, err_estimate=s2_err)
    s2 = max(s2, 0.0)
    sigma2 = MomentResult(s2, s2_err, _worst_regime(m1, m2))

    if m3 is None or s2 <= 0.0:
        gamma1 = undefined
    else:
        num3 = m3.value - 3.0 * m1.value * m2.value + 2.0 * m1.value ** 3
        num3_err = (m3.err + 3.0 * (abs(m1.value) * m2.err
                                    + abs(m2.value) * m1.err)
                    + 6.0 * m1.value ** 2 * m1.err)
        g1 = num3 / s2 ** 1.5
        g1_err = num3_err / s2 ** 1.5 + 1.5 * abs(num3) * s2_err / s2 ** 2.5
        gamma1 = MomentResult(g1, g1_err, _worst_regime(m1, m2, m3))

    if m4 is None or s2 <= 0.0:
        gamma2 = undefined
    else:
        num4 = (m4.value - 4.0 * m1.value * m3.value
                + 6.0 * m1.value ** 2 * m2.value - 3.0 * m1.value ** 4)
        num4_err = (m4.err + 4.0 * (abs(m1.value) * m3.err
                                    + abs(m3.value) * m1.err)
                    + 6.0 * (m1.value ** 2 * m2.err
                             + 2.0 * abs(m1.value * m2.value) * m1.err)
                    + 12.0 * abs(m1.value) ** 3 * m1.err)
        g2 = num4 / s2 ** 2 - 3.0
        g2_err = num4_err / s2 ** 2 + 2.0 * abs(num4) * s2_err / s2 ** 3
        gamma2 = MomentResult(g2, g2_err, _worst_regime(m1, m2, m3, m4))

    return m1, sigma2, gamma1, gamma2


def asymptotic_moments(model: ProcessModel, h, direction):
    """Large-x coefficients and limits of the conditional summary moments.

    As x -> direction * infinity the conditional mean behaves like
    mu_coeff * x and the conditional variance like sigma2_coeff * x^2,
    while the conditional skewness and excess kurtosis converge to
    finite limits.  Returns a 4-tuple of MomentResult (mu_coeff,
    sigma2_coeff, gamma1_limit, gamma2_limit); orders whose existence
    range excludes the model's alpha come back ``undefined`` (at
    alpha = 1 only the first two are available).
    """
    if isinstance(model, AR2):
        raise UnsupportedError(
            "asymptotic conditional moments are not implemented for AR2 models")
    if isinstance(model, AR1) and model.rho <= 0.0:
        raise UnsupportedError(
            "asymptotic conditional moments require rho > 0 for the AR(1); "
            f"got rho = {model.rho} (the far-tail law alternates in sign)")
    if direction not in (1, -1):
        raise ParameterError("direction",
                             f"must be +1 or -1, got {direction!r}")
    d = float(direction)
    constants = closed_form_constants(model, h)
    alpha = constants.alpha
    b1 = constants.beta1
    if abs(b1) == 1.0 and d * b1 < 0.0:
        raise DomainError(
            f"with beta1 = {b1:+g} the conditional law has no large-x limit "
            f"in direction {direction}; condition toward beta1 * x -> +inf")
    denom = 1.0 + d * b1

    coeff = []
    for order in (1, 2, 3, 4):
        lo, hi = _ALPHA_RANGE[order]
        if lo < alpha < hi and not (alpha == 1.0 and order > 2):
            coeff.append((constants.kappa[order - 1]
                          + d * constants.lam[order - 1]) / denom)
        else:
            coeff.append(None)
    c1, c2, c3, c4 = coeff

    undefined = MomentResult.undefined()
    mu_coeff = MomentResult(c1, 0.0, Regime.EXACT)
    if c2 is None:
        return mu_coeff, undefined, undefined, undefined
    s2 = c2 - c1 ** 2
    sigma2_coeff = MomentResult(s2, 0.0, Regime.EXACT)
    if c3 is None or s2 <= 0.0:
        gamma1_limit = undefined
    else:
        gamma1_limit = MomentResult(
            d * (c3 - 3.0 * c1 * c2 + 2.0 * c1 ** 3) / s2 ** 1.5,
            0.0, Regime.EXACT)
    if c4 is None or s2 <= 0.0:
        gamma2_limit = undefined
    else:
        gamma2_limit = MomentResult(
            (c4 - 4.0 * c1 * c3 + 6.0 * c1 ** 2 * c2 - 3.0 * c1 ** 4)
            / s2 ** 2 - 3.0, 0.0, Regime.EXACT)
    return mu_coeff, sigma2_coeff, gamma1_limit, gamma2_limit


def linearity_check(model: ProcessModel, h) -> bool:
    """Whether the conditional expectation is exactly linear in x.

    True iff lambda_1 = beta1 kappa_1 (within 1e-12, relative for large
    constants), in which case E[X_{t+h} | X_t = x] = kappa_1 x with no
    correction term.  For aggregated models the equivalent mixture
    criterion Cov(B, K1) + E[B (|K1| - K1)] = 0 is evaluated over the
    component constants (B, K1) drawn with the component mass weights.
    """
    if isinstance(model, Aggregated):
        weights, betas, kappas = [], [], []
        for component in model.components:
            cons = closed_form_constants(
                AR1(model.alpha, component.beta, component.sigma,
                    component.rho), h)
            weights.append(component.pi * cons.sigma1_alpha)
            betas.append(cons.beta1)
            kappas.append(cons.kappa[0])
        total = sum(weights)
        weights = [w / total for w in weights]
        eb = sum(w * b for w, b in zip(weights, betas))
        ek = sum(w * k for w, k in zip(weights, kappas))
        ebk = sum(w * b * k for w, b, k in zip(weights, betas, kappas))
        cov = ebk - eb * ek
        fold = sum(w * b * (abs(k) - k)
                   for w, b, k in zip(weights, betas, kappas))
        scale = max(1.0, max(abs(k) for k in kappas))
        return abs(cov + fold) <= 1e-12 * scale

    try:
        cons = closed_form_constants(model, h)
    except UnsupportedError:
        cons = bivariate_constants(spectral_rep(model, h))
    target = cons.beta1 * cons.kappa[0]
    return abs(cons.lam[0] - target) <= 1e-12 * max(1.0, abs(target))


def bernoulli_summary(model: ProcessModel, h, x: float):
    """Two-point far-tail picture of the conditional law.

    For large x the conditional distribution of X_{t+h} given X_t = x
    concentrates on the explosive continuation rho^{-h} x, reached with
    the survival probability rho^{alpha h}, versus collapse to 0.
    Returns (survival_prob, explosion_level).
    """
    x = float(x)
    if not math.isfinite(x):
        raise ParameterError("x", f"conditioning point must be finite, got {x!r}")
    if isinstance(model, AR1):
        if model.rho <= 0.0:
            raise UnsupportedError(
                "the two-point far-tail law requires rho > 0 for the AR(1); "
                f"got rho = {model.rho}")
        hh = float(h)
        if not hh.is_integer() or hh < 1:
            raise ParameterError("h", f"horizon must be an integer >= 1, got {h!r}")
        survival = model.rho ** (model.alpha * hh)
        return survival, model.rho ** -hh * x
    if isinstance(model, OU):
        hh = float(h)
        if not hh > 0.0:
            raise ParameterError("h", f"horizon must be positive, got {h!r}")
        lam = model.lambda_rate
        return math.exp(-model.alpha * lam * hh), math.exp(lam * hh) * x
    raise UnsupportedError(
        "the two-point far-tail law is only available for AR1 and OU "
        f"models, got {type(model).__name__}")


def kurtosis_min_horizon(model: ProcessModel) -> float:
    """Horizon h0 at which the far-tail excess kurtosis limit is minimal.

    The limit 1/p + 1/(1 - p) - 6 in the survival probability p is
    minimized at p = 1/2 with value -2, reached at h0 = ln 2 / (alpha
    lambda) for the OU process and h0 = -ln 2 / (alpha ln rho) for the
    AR(1) with rho > 0.
    """
    if isinstance(model, AR1):
        if model.rho <= 0.0:
            raise UnsupportedError(
                "the kurtosis horizon requires rho > 0 for the AR(1); "
                f"got rho = {model.rho}")
        return -math.log(2.0) / (model.alpha * math.log(model.rho))
    if isinstance(model, OU):
        return math.log(2.0) / (model.alpha * model.lambda_rate)
    raise UnsupportedError(
        "the kurtosis horizon is only defined for AR1 and OU models, "
        f"got {type(model).__name__}")
