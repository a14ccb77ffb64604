"""Suspension semiflows over a shift under a locally constant roof.

The suspension space is never built.  A flow-invariant measure is carried
as (base measure, roof, mean roof), and the flow entropy comes from
Abramov's formula.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, NumericError
from .subshift import BlockSystem, PointRep, SftSpec
from .thermo import (MarkovMeasure, Potential, equilibrium_states, integrate,
                     markov_entropy, pressure)

BISECT_WIDTH = 1e-10
BISECT_MAX = 200


@dataclass(frozen=True, eq=False)
class Roof:
    """Strictly positive potential; ``constant`` records the offset already
    folded into ``base.values``."""

    base: Potential
    constant: float = 0.0

    def __post_init__(self):
        if not self.base.min() > 0:
            raise InputError(f"roof must be strictly positive, min is {self.base.min()}")

    @property
    def depth(self) -> int:
        return self.base.depth

    def __call__(self, w) -> float:
        return self.base(w)

    def min(self) -> float:
        return self.base.min()

    @classmethod
    def constant_roof(cls, spec: SftSpec, r: float) -> "Roof":
        return cls(Potential.constant(spec, r), r)


@dataclass(frozen=True, eq=False)
class SuspensionMeasure:
    base_measure: MarkovMeasure
    roof: Roof
    normalizer: float
    flow_entropy: float


def _check_point(x: PointRep, spec: SftSpec | None) -> None:
    if spec is not None and not x.is_admissible(spec):
        raise InputError("point is not admissible in the given spec")


def birkhoff_sum(x: PointRep, roof: Roof, n: int, spec: SftSpec | None = None):
    """Sum of the roof along the first ``n`` points of the orbit of ``x``."""
    if n < 0:
        raise InputError("n must be nonnegative")
    _check_point(x, spec)
    d = roof.depth
    total = 0
    for j in range(n):
        total += roof(x.window(j, d))
    return total


def flow_step(x: PointRep, s, t, roof: Roof, spec: SftSpec | None = None):
    """Move the point ``(x, s)`` forward by time ``t``.

    Returns ``(f^n x, t + s - S_n)`` where ``S_n`` is the n-th Birkhoff sum
    of the roof and ``S_n <= t + s < S_{n+1}``.  Exact when roof values and
    times are ``Fraction`` objects.
    """
    if t < 0:
        raise InputError("semiflow time must be nonnegative")
    _check_point(x, spec)
    d = roof.depth
    if not 0 <= s < roof(x.window(0, d)):
        raise InputError("height s must lie in [0, roof(x))")
    remaining = t + s
    while True:
        if not x.preperiod:
            p = len(x.period)
            period_sum = birkhoff_sum(x, roof, p)
            q = remaining // period_sum
            if q >= 1:
                # the orbit is periodic from here on: skip whole periods
                remaining -= q * period_sum
        step = roof(x.window(0, d))
        if remaining < step:
            return x, remaining
        remaining -= step
        x = x.shift(1)


def lift_normalizer(mu: MarkovMeasure, roof: Roof) -> float:
    """Mean roof height, the normalizing mass of the lifted measure."""
    z = integrate(mu, roof.base)
    if not z > 0:
        raise NumericError("roof integral must be positive")
    return z


def lift_entropy(h_base: float, normalizer: float, t: float = 1.0) -> float:
    """Abramov's formula: entropy of the time-t map of the lifted measure."""
    if not normalizer > 0:
        raise InputError("normalizer must be positive")
    if t < 0:
        raise InputError("t must be nonnegative")
    return t * h_base / normalizer


def lift(mu: MarkovMeasure, roof: Roof) -> SuspensionMeasure:
    z = lift_normalizer(mu, roof)
    return SuspensionMeasure(mu, roof, z, lift_entropy(markov_entropy(mu), z))


def _pressure_of_scaled_roof(b: BlockSystem, roof: Roof, c: float) -> float:
    return pressure(b, roof.base.scaled(-c)).value


def flow_topological_entropy(b: BlockSystem, roof: Roof) -> float:
    """The root c of c -> P(-c * roof), found by bisection.

    The map is strictly decreasing, since ``P(-c1 rho) - P(-c2 rho) >=
    (c2 - c1) min(rho)`` for ``c1 < c2``; it is nonnegative at 0 and negative
    at ``P(0) / min(rho) + 1``.
    """
    lo, hi = 0.0, pressure(b, Potential.zero(b.spec)).value / roof.min() + 1.0
    p_lo = _pressure_of_scaled_roof(b, roof, lo)
    p_hi = _pressure_of_scaled_roof(b, roof, hi)
    if p_lo < 0:
        raise NumericError("P(0) < 0: bracket fails at c = 0")
    if p_hi >= 0:
        raise NumericError("bracket fails at the upper end")
    for _ in range(BISECT_MAX):
        if hi - lo <= BISECT_WIDTH:
            break
        mid = 0.5 * (lo + hi)
        p_mid = _pressure_of_scaled_roof(b, roof, mid)
        if p_mid >= 0:
            lo, p_lo = mid, p_mid
        else:
            hi, p_hi = mid, p_mid
    else:
        raise NumericError("bisection did not reach the target width")
    # secant point inside the final bracket
    return lo + (hi - lo) * p_lo / (p_lo - p_hi)


def flow_mmes(b: BlockSystem, roof: Roof) -> list[SuspensionMeasure]:
    """Lifts of the equilibrium states of ``-c* roof``, c* the flow entropy."""
    c = flow_topological_entropy(b, roof)
    return [lift(m, roof) for m in equilibrium_states(b, roof.base.scaled(-c))]
