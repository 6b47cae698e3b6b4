"""Tests for the two independent numerical oracles.

The Monte Carlo oracle samples exact joint pairs and averages inside a
conditioning bin; the characteristic-function oracle inverts the bivariate
CF with an analytic window kernel and power-law tail completion.  Neither
route shares code with the closed-form moment formulas, so agreement of
all three is the strongest internal consistency check the package has.

The Cauchy AR(1) (alpha = 1, beta = 0, sigma = 1/2, rho = 1/2) is used as
an exactly solvable anchor throughout: its stationary marginal is standard
Cauchy and the joint density factorizes as c(y; 1) * c(x - y/2; 1/2).
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from stable_anticipate.errors import (InsufficientDataError,
                                      MomentExistenceError, ParameterError)
from stable_anticipate.models import (AR1, AR2, AggComponent, Aggregated, OU,
                                      SpectralRep)
from stable_anticipate.moments import cond_moment
from stable_anticipate.oracles import (CfMomentResult, McMomentResult,
                                       _invert_joint, _oracle_window,
                                       _osc_monomial, _PointKernel,
                                       _WindowKernel,
                                       cf_conditional_moment_oracle,
                                       cf_joint_pdf, marginal_params,
                                       mc_conditional_moment)
from stable_anticipate.spectral import closed_form_constants, spectral_rep
from stable_anticipate.stable import stable_pdf

BUBBLE = AR1(1.7, 0.8, 0.1, 0.95)
CAUCHY = AR1(1.0, 0.0, 0.5, 0.5)
OUM = OU(1.7, 0.3, 0.35)
AR2M = AR2(1.7, 0.3, 1.0, 0.5, 0.2)
MIX = Aggregated(1.0, 1.0, (AggComponent(0.9, 0.5, 0.1, 0.5),
                            AggComponent(0.1, 0.8, -0.9, 0.2)))


def cauchy_joint(x, y):
    # X_t = rho*X_{t+h} + eps with X_{t+h} ~ Cauchy(1), eps ~ Cauchy(1/2)
    fy = 1.0 / (np.pi * (1.0 + y * y))
    r = x - 0.5 * y
    fx = 0.5 / (np.pi * (0.25 + r * r))
    return fy * fx


# ---------------------------------------------------------------------------
# analytic kernel pieces


def test_oscillatory_monomial_matches_direct_quadrature():
    # covers the small-argument series branch, the switchover region and
    # a strongly oscillatory argument
    for a in (0.05, 0.3, 0.49, 0.51, 0.7, 3.0, 40.0):
        for q in range(5):
            re = integrate.quad(lambda t: t ** q * np.cos(a * t), -1, 1,
                                epsabs=1e-14, limit=200)[0]
            im = integrate.quad(lambda t: -t ** q * np.sin(a * t), -1, 1,
                                epsabs=1e-14, limit=200)[0]
            got = _osc_monomial(q, a)
            assert_allclose(got.real, re, atol=1e-12)
            assert_allclose(got.imag, im, atol=1e-12)


def test_window_kernel_matches_direct_quadrature():
    for p in (0, 3):
        kern = _WindowKernel(p, -3.0, 7.0)
        for v in (0.13, 2.7):
            re = integrate.quad(lambda y: y ** p * np.cos(v * y), -3, 7,
                                epsabs=1e-12, limit=200)[0]
            im = integrate.quad(lambda y: -y ** p * np.sin(v * y), -3, 7,
                                epsabs=1e-12, limit=200)[0]
            got = np.asarray(kern(np.array([v])))[0]
            assert_allclose(got.real, re, atol=1e-9)
            assert_allclose(got.imag, im, atol=1e-9)


# ---------------------------------------------------------------------------
# marginals of the spectral representation


def _agg_alpha1_location(model):
    # stationary location of a weighted sum of alpha = 1 AR(1) components:
    # each component carries -(2/pi)*sigma*beta*ln(rho)*rho/(1-rho)^2 and
    # rescaling by a = c*pi_j adds the usual -(2/pi)*a*sigma_bar*beta*ln(a)
    two_over_pi = 2.0 / math.pi
    total = 0.0
    for comp in model.components:
        loc = (-two_over_pi * comp.sigma * comp.beta * math.log(comp.rho)
               * comp.rho / (1.0 - comp.rho) ** 2)
        sig_bar = comp.sigma / (1.0 - comp.rho)
        a = model.c * comp.pi
        total += a * loc - two_over_pi * a * sig_bar * comp.beta * math.log(a)
    return total


def test_marginal_params_recovers_the_stationary_law():
    # both coordinates of the lag-h pair are stationary, so each marginal
    # must reproduce the scale/skew of the conditioning coordinate.  The
    # location is checked against independent formulas (zero except for
    # the skewed alpha = 1 aggregation, where the log corrections pile up).
    cases = ((BUBBLE, 1, 0.0), (BUBBLE, 5, 0.0), (CAUCHY, 1, 0.0),
             (MIX, 1, _agg_alpha1_location(MIX)), (OUM, 0.7, 0.0))
    for model, h, loc in cases:
        rep = spectral_rep(model, h)
        consts = closed_form_constants(model, h)
        for coord in (0, 1):
            pars = marginal_params(rep, coord)
            assert pars.alpha == model.alpha
            assert_allclose(pars.sigma, consts.sigma1, rtol=1e-12)
            assert_allclose(pars.beta, consts.beta1, rtol=1e-12, atol=1e-14)
        assert_allclose(marginal_params(rep, 0).mu, loc,
                        rtol=1e-12, atol=1e-14)


def test_marginal_params_rejects_degenerate_coordinates():
    points = np.array([[0.0, 1.0], [0.0, -1.0]])
    rep = SpectralRep(1.7, points, np.array([1.0, 1.0]), np.zeros(2))
    with pytest.raises(ParameterError, match="degenerate in coordinate 0"):
        marginal_params(rep, 0)


# ---------------------------------------------------------------------------
# joint density by CF inversion


def test_joint_density_matches_the_cauchy_closed_form():
    rep = spectral_rep(CAUCHY, 1)
    for x, y in ((0.5, 1.0), (2.0, 4.0), (-1.0, 3.0)):
        got = cf_joint_pdf(rep, x, y, tol=1e-9)
        assert_allclose(got, cauchy_joint(x, y), atol=1e-9)


def test_joint_density_is_nonnegative():
    rep = spectral_rep(BUBBLE, 1)
    # (8, 8.5) sits near the bubble ridge y = x / rho, the others probe
    # the bulk and the thin off-ridge region
    for (x, y), tol in (((0.0, 0.0), 1e-8), ((1.2, 2.5), 1e-8),
                        ((-1.0, -2.0), 1e-8), ((3.0, -4.0), 1e-7),
                        ((8.0, 8.5), 1e-7)):
        f = cf_joint_pdf(rep, x, y, tol=tol)
        assert f > -tol
    assert cf_joint_pdf(rep, 0.0, 0.0, tol=1e-8) > 1.0


def test_joint_density_factorizes_at_large_lag():
    # rho^200 ~ 3.5e-5, so the pair is numerically independent
    rep = spectral_rep(BUBBLE, 200)
    pars0 = marginal_params(rep, 0)
    pars1 = marginal_params(rep, 1)
    for x, y in ((0.5, 1.0), (-2.0, 0.8)):
        joint = cf_joint_pdf(rep, x, y, tol=1e-8)
        product = stable_pdf(pars0, x).value * stable_pdf(pars1, y).value
        assert_allclose(joint, product, rtol=2e-4)


def test_joint_density_has_unit_total_mass():
    # integrate the inverted density over [-5, 5] x [-12, 12] and add the
    # exact mass outside the box.  The x-range is kept inside rho times the
    # y-edge so the ridge y = x / rho never crosses the y-window, which
    # keeps the x-profile smooth enough for a 16-node Gauss rule under the
    # tan substitution.
    rep = spectral_rep(CAUCHY, 1)
    kern = _WindowKernel(0, -12.0, 12.0)
    # 1 - int_{-12}^{12} c(y; 1)/pi * (atan(2(5 - y/2)) + atan(2(5 + y/2))) dy
    remainder = 0.12709717237530903
    nodes, weights = np.polynomial.legendre.leggauss(16)
    t_edge = np.arctan(5.0)
    t = t_edge * nodes
    sec2 = 1.0 / np.cos(t) ** 2
    vals = [_invert_joint(rep, _PointKernel(x), kern, 1e-6)[0]
            for x in np.tan(t)]
    box = t_edge * float((weights * sec2) @ np.asarray(vals))
    assert abs(box + remainder - 1.0) < 1e-3


def test_joint_density_rejects_bad_inputs():
    with pytest.raises(ParameterError, match="expected SpectralRep"):
        cf_joint_pdf(BUBBLE, 0.0, 0.0)
    # atoms on a single line carry no two-dimensional density
    points = np.array([[0.6, 0.8], [-0.6, -0.8]])
    rep = SpectralRep(1.7, points, np.array([1.0, 1.0]), np.zeros(2))
    with pytest.raises(ParameterError, match="single direction"):
        cf_joint_pdf(rep, 0.1, 0.2)


# ---------------------------------------------------------------------------
# CF-inversion conditional moments against the closed forms


def test_cf_oracle_matches_closed_forms():
    # agreement degrades with the order because the power-law completion
    # carries more of the integrand mass for larger p
    rtols = {1: 1e-6, 2: 1e-5, 3: 1e-4, 4: 2e-3}
    for x, orders in ((1.0, (1, 2, 3, 4)), (-1.0, (1, 2))):
        for p in orders:
            got = cf_conditional_moment_oracle(BUBBLE, p, x, 1, tol=1e-5)
            want = cond_moment(p, x, BUBBLE, 1).value
            assert_allclose(got.estimate, want, rtol=rtols[p])
            assert not got.low_confidence
    got = cf_conditional_moment_oracle(OUM, 2, 1.5, 1.0, tol=1e-5)
    want = cond_moment(2, 1.5, OUM, 1.0).value
    assert_allclose(got.estimate, want, rtol=1e-4)


def test_cf_oracle_handles_the_alpha_one_special_case():
    # aggregated model with the log-corrected CF exponent
    for p in (1, 2):
        got = cf_conditional_moment_oracle(MIX, p, 1.2, 1, tol=1e-5)
        want = cond_moment(p, 1.2, MIX, 1).value
        assert_allclose(got.estimate, want, rtol=1e-2)
        assert abs(got.estimate - want) <= 3.0 * got.err


def test_cf_oracle_recovers_the_cauchy_conditional_variance():
    # E[Y^2 | X = x] - E[Y | X = x]^2 = x^2 + 1 for the unit-marginal
    # Cauchy pair; p = 2 at alpha = 1 leans hardest on tail completion
    m1 = cf_conditional_moment_oracle(CAUCHY, 1, 2.0, 1, tol=1e-6)
    m2 = cf_conditional_moment_oracle(CAUCHY, 2, 2.0, 1, tol=1e-6)
    var = m2.estimate - m1.estimate ** 2
    err = m2.err + 2.0 * abs(m1.estimate) * m1.err
    assert abs(var - 5.0) <= 3.0 * err
    assert abs(var - 5.0) < 0.15


def test_windowed_denominator_matches_the_marginal_density():
    # the raw windowed mass should reproduce the stationary density; at
    # alpha = 1 the window cuts visibly heavier tails, handled by the
    # completion step, so only the raw part is compared loosely
    rep, lo, hi, den_raw, den_err, edges, ratio = _oracle_window(
        BUBBLE, 1, 1.0, 1e-5)
    f1 = stable_pdf(marginal_params(rep, 0), 1.0).value
    assert_allclose(den_raw, f1, rtol=1e-6)
    rep, lo, hi, den_raw, den_err, edges, ratio = _oracle_window(
        CAUCHY, 1, 2.0, 1e-5)
    f1 = stable_pdf(marginal_params(rep, 0), 2.0).value
    assert_allclose(den_raw, f1, rtol=2e-3)
    assert den_raw < f1


def test_cf_oracle_validates_the_order():
    with pytest.raises(ParameterError, match="moment order"):
        cf_conditional_moment_oracle(BUBBLE, 0, 1.0, 1)
    with pytest.raises(MomentExistenceError):
        cf_conditional_moment_oracle(AR1(1.25, 0.0, 1.0, 0.5), 4, 1.0, 1)


# ---------------------------------------------------------------------------
# Monte Carlo conditional moments


def test_mc_oracle_agrees_with_closed_forms():
    cases = ((BUBBLE, 1.0, 0.05, 1), (BUBBLE, 5.0, 0.25, 1), (OUM, 1.5, 0.10, 1.0))
    for model, x, width, h in cases:
        for p in (1, 2):
            res = mc_conditional_moment(model, p, x, width, h, 400_000,
                                        seed=11)
            want = cond_moment(p, x, model, h).value
            assert res.n_hits >= 200
            assert abs(res.estimate - want) <= 3.5 * res.stderr


def test_mc_and_cf_oracles_agree_without_closed_forms():
    # AR(2) has no closed-form moments, so the two numerical routes are
    # checked directly against each other
    cf = cf_conditional_moment_oracle(AR2M, 1, 1.0, 1, tol=1e-4)
    mc = mc_conditional_moment(AR2M, 1, 1.0, 0.05, 1, 400_000, seed=2)
    assert abs(cf.estimate - mc.estimate) <= 3.0 * (mc.stderr + cf.err)


def test_mc_result_flags_heavy_tails():
    # with an unbounded bin every pair is a hit, and p >= alpha means the
    # p-th power has infinite variance
    res = mc_conditional_moment(BUBBLE, 2, 0.0, np.inf, 1, 50_000, seed=3)
    assert res.heavy_tail
    assert res.n_hits == 50_000
    res = mc_conditional_moment(BUBBLE, 1, 0.0, np.inf, 1, 50_000, seed=3)
    assert not res.heavy_tail


def test_result_records_unpack_as_tuples():
    est, err = CfMomentResult(1.5, 0.01)
    assert (est, err) == (1.5, 0.01)
    res = mc_conditional_moment(BUBBLE, 1, 1.0, 0.1, 1, 20_000, seed=1)
    est, stderr, n_hits = res
    assert (est, stderr, n_hits) == (res.estimate, res.stderr, res.n_hits)


def test_mc_raises_when_the_bin_is_too_empty():
    with pytest.raises(InsufficientDataError, match="increase half_width"):
        mc_conditional_moment(BUBBLE, 1, 40.0, 0.01, 1, 20_000, seed=1)
    try:
        mc_conditional_moment(BUBBLE, 1, 40.0, 0.01, 1, 20_000, seed=1)
    except InsufficientDataError as exc:
        assert exc.n_hits < 200
        assert exc.n_paths == 20_000


def test_mc_validates_arguments():
    with pytest.raises(ParameterError, match="moment order"):
        mc_conditional_moment(BUBBLE, 0, 1.0, 0.1, 1, 1000, seed=0)
    with pytest.raises(ParameterError, match="half_width"):
        mc_conditional_moment(BUBBLE, 1, 1.0, -0.1, 1, 1000, seed=0)
    with pytest.raises(ParameterError, match="n_paths"):
        mc_conditional_moment(BUBBLE, 1, 1.0, 0.1, 1, 0, seed=0)
    with pytest.raises(ParameterError, match="trim"):
        mc_conditional_moment(BUBBLE, 1, 1.0, 0.1, 1, 1000, seed=0, trim=0.7)
    with pytest.raises(ParameterError, match="integer >= 1"):
        mc_conditional_moment(BUBBLE, 1, 1.0, 0.1, 0.5, 1000, seed=0)
    with pytest.raises(ParameterError):
        mc_conditional_moment(OUM, 1, 1.0, 0.1, -1.0, 1000, seed=0)
