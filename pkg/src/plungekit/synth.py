"""
Synthetic sector panels from a one-factor, two-regime Gaussian model.

Each trading day ``t`` in a month with regime ``r``::

    R_i(t) = beta[r] * f(t) + eps_i(t),   f ~ N(0, sigma_factor^2), eps_i ~ N(0, sigma_idio^2)

so the population pairwise correlation inside a regime is
``beta^2 sigma_f^2 / (beta^2 sigma_f^2 + sigma_idio^2)``.

Random stream
-------------
Uniforms come from SplitMix64 in counter form: the k-th 64-bit output
(k = 1, 2, ...) is ``mix(seed + k * 0x9E3779B97F4A7C15 mod 2^64)`` with the
standard SplitMix64 finaliser. The top 53 bits give ``u = (x >> 11) * 2^-53``.
Uniforms are consumed in pairs ``(u1, u2)`` by the Box-Muller transform::

    z1 = sqrt(-2 ln(1 - u1)) cos(2 pi u2)
    z2 = sqrt(-2 ln(1 - u1)) sin(2 pi u2)

and the resulting normals are laid out day-major: for day ``t`` (0-based,
over the whole panel), normal ``t * (N + 1)`` is the factor draw and
normals ``t * (N + 1) + 1 .. t * (N + 1) + N`` are the idiosyncratic draws
of entities 1..N. Nothing here depends on a platform RNG, so the stream is
reproducible in any language with 64-bit unsigned arithmetic.

Dates: regime month k covers the first ``days_per_month`` weekdays of the
k-th calendar month from ``start`` (topped up with the earliest weekend days
when the month is short, e.g. 21 days in February); one anchor date (the last weekday before
the first month) carries the starting price, so every month gets exactly
``days_per_month`` log returns.
"""

from __future__ import annotations

import datetime as dt
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from plungekit.errors import InputError
from plungekit.ingest import Month, PESeries, PricePanel

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1

SECTORS = (
    "Auto", "Bankex", "CD", "CG", "FMCG", "HC", "IT", "Metal",
    "OilGas", "Power", "Realty", "Teck", "Sensex",
)  # fmt: skip
BENCHMARK = "Sensex"

# Jan 2006 - Dec 2009 with the four high-volatility stretches planted:
# May-Jul 2006, Jul-Sep 2007, Jan-Mar 2008, Aug-Dec 2008.
DEFAULT_REGIMES = "NNNNCCCNNNNNNNNNNNCCCNNNCCCNNNNCCCCCNNNNNNNNNNNN"


class Regime(str, enum.Enum):
    NORMAL = "normal"
    CRISIS = "crisis"


def splitmix64(seed: int, n: int, offset: int = 0) -> np.ndarray:
    """Outputs ``offset + 1 .. offset + n`` of the SplitMix64 stream for ``seed``."""
    k = np.arange(offset + 1, offset + n + 1, dtype=np.uint64)
    z = np.uint64(seed & _MASK64) + k * np.uint64(GOLDEN_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, n: int) -> np.ndarray:
    """``n`` doubles in [0, 1) on the 2^-53 grid."""
    return (splitmix64(seed, n) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def standard_normals(seed: int, n: int) -> np.ndarray:
    pairs = (n + 1) // 2
    u = uniforms(seed, 2 * pairs).reshape(pairs, 2)
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    angle = 2.0 * math.pi * u[:, 1]
    z = np.empty((pairs, 2))
    z[:, 0] = radius * np.cos(angle)
    z[:, 1] = radius * np.sin(angle)
    return z.reshape(-1)[:n]


def expected_pairwise_correlation(beta: float, sigma_factor: float, sigma_idio: float) -> float:
    common = beta * beta * sigma_factor * sigma_factor
    total = common + sigma_idio * sigma_idio
    if total == 0:
        raise InputError("zero total variance: factor and idiosyncratic volatility both vanish")
    return common / total


def beta_for_correlation(rho: float, sigma_factor: float, sigma_idio: float) -> float:
    """Factor loading that gives population pairwise correlation ``rho``."""
    if not 0 <= rho < 1:
        raise InputError(f"rho must lie in [0, 1), got {rho}")
    if sigma_factor <= 0:
        raise InputError("sigma_factor must be positive")
    return math.sqrt(rho / (1 - rho)) * sigma_idio / sigma_factor


def _parse_regimes(months) -> tuple[Regime, ...]:
    if isinstance(months, str):
        codes = {"N": Regime.NORMAL, "C": Regime.CRISIS}
        try:
            return tuple(codes[ch] for ch in months.upper() if not ch.isspace())
        except KeyError as exc:
            raise InputError(f"regime string may only contain N and C, got {exc.args[0]!r}") from None
    return tuple(Regime(m) for m in months)


@dataclass(frozen=True)
class SynthConfig:
    n_entities: int = 13
    months: tuple[Regime, ...] = field(default_factory=lambda: _parse_regimes(DEFAULT_REGIMES))
    days_per_month: int = 21
    beta_normal: float = beta_for_correlation(0.3, 0.01, 0.01)
    beta_crisis: float = beta_for_correlation(0.85, 0.01, 0.01)
    sigma_factor: float = 0.01
    sigma_idio: float = 0.01
    pe_normal: float = 15.0
    pe_crisis: float = 26.0
    seed: int = 0
    start: Month = Month(2006, 1)
    initial_price: float = 100.0

    def __post_init__(self):
        object.__setattr__(self, "months", _parse_regimes(self.months))
        object.__setattr__(self, "start", Month(*self.start))
        if self.n_entities < 1:
            raise InputError("n_entities must be >= 1")
        if self.days_per_month < 2:
            raise InputError(f"days_per_month must be >= 2, got {self.days_per_month}")
        for name in ("beta_normal", "beta_crisis", "sigma_factor", "sigma_idio"):
            if getattr(self, name) < 0:
                raise InputError(f"{name} must be nonnegative")
        if self.pe_normal <= 0 or self.pe_crisis <= 0 or self.initial_price <= 0:
            raise InputError("PE levels and initial price must be positive")
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must be a 64-bit unsigned integer")
        if not self.months:
            raise InputError("at least one month is required")

    @property
    def entities(self) -> tuple[str, ...]:
        if self.n_entities == len(SECTORS):
            return SECTORS
        return tuple(f"E{i + 1:02d}" for i in range(self.n_entities))

    def month_keys(self) -> list[Month]:
        keys = [self.start]
        for _ in self.months[1:]:
            keys.append(keys[-1].next())
        return keys


@dataclass(frozen=True)
class SynthOutput:
    prices: PricePanel
    pe: PESeries
    regimes: dict[Month, Regime]

    def crisis_months(self) -> list[Month]:
        return [m for m, r in self.regimes.items() if r is Regime.CRISIS]

    def normal_months(self) -> list[Month]:
        return [m for m, r in self.regimes.items() if r is Regime.NORMAL]


def simulate_returns(config: SynthConfig) -> np.ndarray:
    """Daily returns, shape ``(len(months) * days_per_month, n_entities)``."""
    n, d = config.n_entities, config.days_per_month
    days = len(config.months) * d
    z = standard_normals(config.seed, days * (n + 1)).reshape(days, n + 1)
    beta = np.repeat([config.beta_crisis if r is Regime.CRISIS else config.beta_normal for r in config.months], d)
    factor = config.sigma_factor * z[:, 0]
    return (beta * factor)[:, None] + config.sigma_idio * z[:, 1:]


def _month_days(month: Month, count: int) -> list[dt.date]:
    first = dt.date(month.year, month.month, 1)
    days = [first + dt.timedelta(days=k) for k in range(31)]
    days = [d for d in days if d.month == month.month]
    if count > len(days):
        raise InputError(f"{month} has only {len(days)} days, days_per_month={count} does not fit")
    weekdays = [d for d in days if d.weekday() < 5]
    if count <= len(weekdays):
        return weekdays[:count]
    weekend = [d for d in days if d.weekday() >= 5]
    return sorted(weekdays + weekend[: count - len(weekdays)])


def trading_dates(config: SynthConfig) -> list[dt.date]:
    anchor = dt.date(config.start.year, config.start.month, 1) - dt.timedelta(days=1)
    while anchor.weekday() >= 5:
        anchor -= dt.timedelta(days=1)
    dates = [anchor]
    for key in config.month_keys():
        dates += _month_days(key, config.days_per_month)
    return dates


def generate(config: SynthConfig) -> SynthOutput:
    """Price panel, monthly PE series and ground-truth regimes for ``config``."""
    dates = trading_dates(config)
    returns = simulate_returns(config)
    logp = np.vstack([np.zeros(config.n_entities), np.cumsum(returns, axis=0)])
    prices = PricePanel(config.entities, dates, config.initial_price * np.exp(logp))
    keys = config.month_keys()
    pe = PESeries(keys, [config.pe_crisis if r is Regime.CRISIS else config.pe_normal for r in config.months])
    return SynthOutput(prices, pe, dict(zip(keys, config.months)))
