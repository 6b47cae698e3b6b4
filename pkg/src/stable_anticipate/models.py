"""Domain types shared by every module.

All records are immutable after construction and validate their own
invariants, so a successfully built object is safe to share across
threads and to cache.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError


def _require(cond: bool, name: str, message: str) -> None:
    if not cond:
        raise ParameterError(name, message)


def _finite(value: float, name: str) -> float:
    value = float(value)
    _require(math.isfinite(value), name, f"must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class StableParams:
    """Univariate stable law S(alpha, beta, sigma, mu).

    The characteristic function is
    exp{-sigma^alpha |u|^alpha (1 - i beta sign(u) w(alpha, u)) + i u mu}
    with w(alpha, u) = tan(pi alpha / 2) for alpha != 1 and
    w(1, u) = -(2/pi) ln|u|.
    """

    alpha: float
    beta: float
    sigma: float
    mu: float = 0.0

    def __post_init__(self):
        _require(0.0 < self.alpha < 2.0, "alpha",
                 f"must lie in (0, 2) (Gaussian case excluded), got {self.alpha}")
        _require(-1.0 <= self.beta <= 1.0, "beta",
                 f"must lie in [-1, 1], got {self.beta}")
        _require(self.sigma > 0.0, "sigma", f"must be positive, got {self.sigma}")
        _finite(self.mu, "mu")


class Regime(str, enum.Enum):
    """How a moment value was obtained."""

    EXACT = "exact"
    ASYMPTOTIC = "asymptotic"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class MomentResult:
    """A computed quantity with its error estimate and validity regime.

    ``value`` is None exactly when ``regime`` is UNDEFINED.
    """

    value: float | None
    err: float | None
    regime: Regime = Regime.EXACT

    def __post_init__(self):
        if self.regime is Regime.UNDEFINED:
            _require(self.value is None, "value",
                     "undefined results must not carry a value")
        else:
            _require(self.value is not None and math.isfinite(self.value),
                     "value", f"must be finite, got {self.value!r}")

    @staticmethod
    def undefined() -> "MomentResult":
        return MomentResult(None, None, Regime.UNDEFINED)


@dataclass(frozen=True)
class QuadResult:
    """Value of an integral plus diagnostics of the quadrature run."""

    value: float
    abs_err_estimate: float
    nodes_used: int

    def __post_init__(self):
        _require(self.abs_err_estimate >= 0.0, "abs_err_estimate",
                 "error estimate cannot be negative")


@dataclass(frozen=True)
class ThetaPair:
    """Coefficient pair (t1, t2) weighting the cosine and sine kernels."""

    t1: float
    t2: float

    def __post_init__(self):
        _finite(self.t1, "t1")
        _finite(self.t2, "t2")

    def __iter__(self):
        return iter((self.t1, self.t2))


@dataclass(frozen=True)
class ThetaSet:
    """The six coefficient pairs feeding conditional moments of order 1..4."""

    theta1: ThetaPair
    theta2: ThetaPair
    theta3: ThetaPair
    theta4: ThetaPair
    theta5: ThetaPair
    theta6: ThetaPair


def _as_readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class SpectralRep:
    """Discrete spectral measure on the unit circle plus shift vector.

    ``points`` has shape (n, 2) with unit rows, ``masses`` shape (n,)
    nonnegative, ``shift`` shape (2,).
    """

    alpha: float
    points: np.ndarray
    masses: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        _require(0.0 < self.alpha < 2.0, "alpha",
                 f"must lie in (0, 2), got {self.alpha}")
        object.__setattr__(self, "points", _as_readonly(self.points))
        object.__setattr__(self, "masses", _as_readonly(self.masses))
        object.__setattr__(self, "shift", _as_readonly(self.shift))
        _require(self.points.ndim == 2 and self.points.shape[1] == 2,
                 "points", f"expected shape (n, 2), got {self.points.shape}")
        _require(self.masses.shape == (self.points.shape[0],),
                 "masses", "one mass per atom required")
        _require(self.shift.shape == (2,), "shift", "expected shape (2,)")
        norms = np.hypot(self.points[:, 0], self.points[:, 1])
        _require(bool(np.all(np.abs(norms - 1.0) <= 1e-12)), "points",
                 "atom directions must have unit norm within 1e-12")
        _require(bool(np.all(self.masses >= 0.0)), "masses",
                 "masses must be nonnegative")

    @property
    def n_atoms(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class BivariateConstants:
    """Scalars derived from a bivariate spectral measure.

    ``kappa[p-1]`` and ``lam[p-1]`` hold kappa_p and lambda_p for
    p = 1..4.  ``q0`` and ``mu1`` are populated exactly when alpha = 1.
    """

    alpha: float
    sigma1_alpha: float
    beta1: float
    kappa: tuple[float, float, float, float]
    lam: tuple[float, float, float, float]
    q0: float | None = None
    mu1: float | None = None

    def __post_init__(self):
        _require(0.0 < self.alpha < 2.0, "alpha",
                 f"must lie in (0, 2), got {self.alpha}")
        _require(self.sigma1_alpha > 0.0, "sigma1_alpha",
                 f"conditioning marginal must be non-degenerate, got {self.sigma1_alpha}")
        _require(abs(self.beta1) <= 1.0 + 1e-12, "beta1",
                 f"must lie in [-1, 1], got {self.beta1}")
        if self.alpha == 1.0:
            _require(self.q0 is not None and self.mu1 is not None, "q0",
                     "q0 and mu1 are required when alpha = 1")
        else:
            _require(self.q0 is None and self.mu1 is None, "q0",
                     "q0 and mu1 are only defined when alpha = 1")

    @property
    def sigma1(self) -> float:
        return self.sigma1_alpha ** (1.0 / self.alpha)


@dataclass(frozen=True)
class AR1:
    """Anticipative AR(1): X_t = rho X_{t+1} + eps_t with stable innovations."""

    alpha: float
    beta: float
    sigma: float
    rho: float

    def __post_init__(self):
        StableParams(self.alpha, self.beta, self.sigma)
        _require(0.0 < abs(self.rho) < 1.0, "rho",
                 f"must satisfy 0 < |rho| < 1, got {self.rho}")


@dataclass(frozen=True)
class OU:
    """Anticipative stable Ornstein-Uhlenbeck process with unit driving scale."""

    alpha: float
    beta: float
    lambda_rate: float

    def __post_init__(self):
        StableParams(self.alpha, self.beta, 1.0)
        _require(self.lambda_rate > 0.0, "lambda_rate",
                 f"must be positive, got {self.lambda_rate}")


@dataclass(frozen=True)
class AggComponent:
    """One latent AR(1) component of an aggregated process."""

    pi: float
    rho: float
    beta: float
    sigma: float

    def __post_init__(self):
        _require(0.0 < self.pi < 1.0 or self.pi == 1.0, "pi",
                 f"weight must lie in (0, 1], got {self.pi}")
        _require(0.0 < abs(self.rho) < 1.0, "rho",
                 f"must satisfy 0 < |rho| < 1, got {self.rho}")
        _require(-1.0 <= self.beta <= 1.0, "beta",
                 f"must lie in [-1, 1], got {self.beta}")
        _require(self.sigma > 0.0, "sigma", f"must be positive, got {self.sigma}")


@dataclass(frozen=True)
class Aggregated:
    """Linear aggregation X_t = c * sum_j pi_j X_{j,t} of independent AR(1)s."""

    alpha: float
    c: float
    components: tuple[AggComponent, ...]

    def __post_init__(self):
        _require(0.0 < self.alpha < 2.0, "alpha",
                 f"must lie in (0, 2), got {self.alpha}")
        _require(self.c > 0.0, "c", f"must be positive, got {self.c}")
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        _require(len(comps) >= 1, "components", "at least one component required")
        total = sum(comp.pi for comp in comps)
        _require(abs(total - 1.0) <= 1e-12, "components",
                 f"weights must sum to 1 within 1e-12, got {total}")


@dataclass(frozen=True)
class AR2:
    """Anticipative AR(2): X_t = psi1 X_{t+1} + psi2 X_{t+2} + eps_t."""

    alpha: float
    beta: float
    sigma: float
    psi1: float
    psi2: float

    def __post_init__(self):
        StableParams(self.alpha, self.beta, self.sigma)
        _require(self.psi1 != 0.0, "psi1", "psi1 = 0 collapses to a pure lag-2 model")
        _finite(self.psi2, "psi2")


ProcessModel = AR1 | OU | Aggregated | AR2


@dataclass(frozen=True)
class PathConfig:
    """Simulation settings shared by all path generators.

    Args:
        n_points: number of grid points to return (>= 2).
        seed: 64-bit seed; identical seeds give identical paths.
        trunc_eps: bound on the neglected moving-average tail scale mass.
        dt: grid step for continuous-time models.
    """

    n_points: int
    seed: int = 0
    trunc_eps: float = 1e-10
    dt: float = 1.0

    def __post_init__(self):
        _require(self.n_points >= 2, "n_points",
                 f"need at least two points, got {self.n_points}")
        _require(0.0 < self.trunc_eps <= 1e-3, "trunc_eps",
                 f"must lie in (0, 1e-3], got {self.trunc_eps}")
        _require(self.dt > 0.0, "dt", f"must be positive, got {self.dt}")
