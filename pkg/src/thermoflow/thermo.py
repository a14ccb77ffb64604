"""Pressure, equilibrium states and entropy for locally constant potentials.

For a potential depending on the first ``d`` symbols the pressure is the
log of the Perron root of the weighted transition matrix.  Reducible
systems are split into strongly connected components; the pressure is the
maximum over components and every component attaining it carries one
ergodic equilibrium state (a Markov measure built from Perron vectors).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DepthError, EmptySystemError, InputError, NumericError
from .subshift import BlockSystem, SftSpec, Word, admissible_words, as_word

MAX_ITER = 1_000_000
EIG_RTOL = 1e-14
VEC_TOL = 1e-13
TIE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Potential:
    """Function of the first ``depth`` symbols, stored as a word -> value table.

    ``residual_bound`` is the sup-distance to an intended target that lies
    *below* the table values (0 when the table is the target itself).
    """

    depth: int
    values: Mapping[Word, float]
    residual_bound: float = 0.0

    def __post_init__(self):
        if self.depth < 1:
            raise DepthError("potential depth must be at least 1")
        table = {}
        for w, x in self.values.items():
            w = as_word(w)
            if len(w) != self.depth:
                raise InputError(f"word {w} does not have length {self.depth}")
            if not math.isfinite(x):
                raise InputError(f"non-finite value at {w}")
            table[w] = x
        if self.residual_bound < 0:
            raise InputError("residual_bound must be nonnegative")
        object.__setattr__(self, "values", dict(sorted(table.items())))

    @classmethod
    def from_function(cls, spec: SftSpec, depth: int, fn: Callable[[Word], float],
                      residual_bound: float = 0.0) -> "Potential":
        return cls(depth, {w: fn(w) for w in admissible_words(spec, depth)}, residual_bound)

    @classmethod
    def constant(cls, spec: SftSpec, c: float, depth: int = 1) -> "Potential":
        return cls.from_function(spec, depth, lambda w: c)

    @classmethod
    def zero(cls, spec: SftSpec) -> "Potential":
        return cls.constant(spec, 0.0)

    def __call__(self, w: Sequence[int]) -> float:
        key = as_word(w[:self.depth])
        try:
            return self.values[key]
        except KeyError:
            raise InputError(f"potential undefined on word {key}") from None

    def validate(self, spec: SftSpec) -> None:
        missing = [w for w in admissible_words(spec, self.depth) if w not in self.values]
        if missing:
            raise InputError(f"potential missing admissible words, e.g. {missing[0]}")

    def scaled(self, a: float) -> "Potential":
        # + 0.0 turns -0.0 into 0.0
        return Potential(self.depth, {w: a * x + 0.0 for w, x in self.values.items()},
                         abs(a) * self.residual_bound)

    def shifted(self, c: float) -> "Potential":
        return Potential(self.depth, {w: x + c for w, x in self.values.items()},
                         self.residual_bound)

    def min(self) -> float:
        return min(self.values.values())

    def max(self) -> float:
        return max(self.values.values())


@dataclass(frozen=True, eq=False)
class PressureResult:
    value: float
    perron_root: float
    right_vec: np.ndarray
    left_vec: np.ndarray
    component: tuple[int, ...]
    iterations: int


@dataclass(frozen=True, eq=False)
class MarkovMeasure:
    """Stationary Markov chain on the states of a BlockSystem."""

    system: BlockSystem
    trans: np.ndarray
    stationary: np.ndarray

    def __post_init__(self):
        P, pi, A = self.trans, self.stationary, self.system.transition
        if P.shape != A.shape or pi.shape != (A.shape[0],):
            raise InputError("shape mismatch between measure and system")
        if np.any(P < 0) or np.any((P > 0) & (A == 0)):
            raise InputError("transition probabilities must live on graph edges")
        if np.max(np.abs(P.sum(axis=1) - 1.0)) > 1e-12:
            raise InputError("transition matrix is not row-stochastic")
        if np.any(pi < 0) or abs(pi.sum() - 1.0) > 1e-12:
            raise InputError("stationary vector is not a probability vector")
        if np.max(np.abs(pi @ P - pi)) > 1e-10:
            raise InputError("stationary vector is not invariant")
        P.setflags(write=False)
        pi.setflags(write=False)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(np.flatnonzero(self.stationary > 0).tolist())


@dataclass(frozen=True)
class PressureEnclosure:
    lower: float
    upper: float
    direction: str = "target <= potential"

    def __post_init__(self):
        if self.lower > self.upper:
            raise InputError("enclosure lower bound exceeds upper bound")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= x <= self.upper + tol


@dataclass(frozen=True, eq=False)
class _Spectrum:
    states: tuple[int, ...]
    perron_root: float
    log_root: float
    right: np.ndarray
    left: np.ndarray
    iterations: int


def _check_depth(b: BlockSystem, phi: Potential) -> None:
    if phi.depth > b.depth + 1:
        raise DepthError(f"potential depth {phi.depth} exceeds block depth + 1 = {b.depth + 1}")


def edge_values(b: BlockSystem, phi: Potential) -> np.ndarray:
    """phi on each edge word (0 off the graph)."""
    _check_depth(b, phi)
    V = np.zeros(b.transition.shape)
    for i, j in b.edges():
        V[i, j] = float(phi(b.edge_word(i, j)))
    return V


def weighted_matrix(b: BlockSystem, phi: Potential) -> np.ndarray:
    V = edge_values(b, phi)
    return np.where(b.transition == 1, np.exp(V), 0.0)


def strong_components(b: BlockSystem) -> list[tuple[int, ...]]:
    """Strongly connected components carrying at least one cycle, ordered by
    their smallest state index."""
    n, labels = connected_components(csr_matrix(b.transition), directed=True,
                                     connection="strong")
    comps = []
    for c in range(n):
        idx = tuple(np.flatnonzero(labels == c).tolist())
        sub = b.transition[np.ix_(idx, idx)]
        if sub.any():
            comps.append(idx)
    return sorted(comps)


def _power_vector(A: np.ndarray) -> tuple[np.ndarray, int]:
    """Positive eigenvector of a primitive matrix by power iteration.

    Seeded from a dense eigen-solve; the iteration itself decides convergence.
    """
    n = A.shape[0]
    w, V = np.linalg.eig(A)
    v = np.abs(V[:, np.argmax(w.real)].real)
    x = v / v.sum() if v.min() > 0 else np.full(n, 1.0 / n)
    lam_prev, streak = None, 0
    for it in range(1, MAX_ITER + 1):
        y = A @ x
        lam = y.sum()
        y /= lam
        dv = np.max(np.abs(y - x))
        if lam_prev is not None and abs(lam - lam_prev) <= EIG_RTOL * lam:
            streak += 1
        else:
            streak = 0
        x, lam_prev = y, lam
        if streak >= 3 and dv <= VEC_TOL:
            return x, it
    raise NumericError(f"power iteration did not converge in {MAX_ITER} steps")


def _component_spectrum(M: np.ndarray, idx: tuple[int, ...]) -> _Spectrum:
    Mc = M[np.ix_(idx, idx)]
    scale = Mc.max()
    Ms = Mc / scale
    # M + I is primitive for irreducible M, even on periodic components
    A = Ms + np.eye(len(idx))
    r, it_r = _power_vector(A)
    l, it_l = _power_vector(A.T)
    root = (Ms @ r).sum() / r.sum()
    if not root > 0:
        raise NumericError("non-positive Perron root")
    return _Spectrum(idx, root * scale, math.log(root) + math.log(scale), r, l, it_r + it_l)


def _spectra(b: BlockSystem, phi: Potential) -> list[_Spectrum]:
    M = weighted_matrix(b, phi)
    comps = strong_components(b)
    if not comps:
        raise EmptySystemError("system has no cycles")
    return [_component_spectrum(M, idx) for idx in comps]


def _embed(n: int, idx: tuple[int, ...], x: np.ndarray) -> np.ndarray:
    out = np.zeros(n)
    out[list(idx)] = x
    return out


def pressure(b: BlockSystem, phi: Potential) -> PressureResult:
    """Topological pressure of ``phi`` (natural log)."""
    specs = _spectra(b, phi)
    best = max(specs, key=lambda s: s.log_root)
    return PressureResult(
        value=best.log_root,
        perron_root=best.perron_root,
        right_vec=_embed(b.size, best.states, best.right),
        left_vec=_embed(b.size, best.states, best.left),
        component=best.states,
        iterations=sum(s.iterations for s in specs),
    )


def topological_entropy(b: BlockSystem) -> float:
    return pressure(b, Potential.zero(b.spec)).value


def _fill_free_rows(trans: np.ndarray, A: np.ndarray, rows) -> None:
    for u in rows:
        trans[u] = A[u] / A[u].sum()


def _measure_on_component(b, M, spec: _Spectrum) -> MarkovMeasure:
    idx = list(spec.states)
    A = b.transition.astype(float)
    trans = np.zeros_like(A)
    Mc = M[np.ix_(idx, idx)]
    r = spec.right
    T = Mc * r[None, :] / r[:, None]
    T /= T.sum(axis=1, keepdims=True)
    trans[np.ix_(idx, idx)] = T
    _fill_free_rows(trans, A, [u for u in range(b.size) if u not in set(idx)])
    pi_c = spec.left * spec.right
    pi = _embed(b.size, spec.states, pi_c / pi_c.sum())
    return MarkovMeasure(b, trans, pi)


def equilibrium_states(b: BlockSystem, phi: Potential) -> list[MarkovMeasure]:
    """One ergodic equilibrium state per component whose pressure ties the max."""
    specs = _spectra(b, phi)
    top = max(s.log_root for s in specs)
    M = weighted_matrix(b, phi)
    return [_measure_on_component(b, M, s) for s in specs if top - s.log_root <= TIE_TOL]


def markov_entropy(m: MarkovMeasure) -> float:
    P = m.trans
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(P > 0, np.log(np.where(P > 0, P, 1.0)), 0.0)
    return float(-(m.stationary[:, None] * P * logs).sum())


def edge_mass(m: MarkovMeasure) -> np.ndarray:
    """Stationary probability of each edge, pi(u) * P(u, v)."""
    return m.stationary[:, None] * m.trans


def integrate(m: MarkovMeasure, phi: Potential) -> float:
    V = edge_values(m.system, phi)
    return float((edge_mass(m) * V).sum())


def stationary_distribution(P: np.ndarray) -> np.ndarray:
    """Stationary vector of an irreducible stochastic matrix."""
    n = P.shape[0]
    A = P.T - np.eye(n)
    A[-1] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    pi = np.linalg.solve(A, rhs)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def random_markov_measure(b: BlockSystem, rng: np.random.Generator,
                          component: tuple[int, ...] | None = None) -> MarkovMeasure:
    """Markov measure with random positive edge weights on one irreducible component."""
    comps = strong_components(b)
    if component is None:
        component = comps[rng.integers(len(comps))]
    idx = list(component)
    A = b.transition.astype(float)
    Ac = A[np.ix_(idx, idx)]
    W = Ac * rng.random(Ac.shape) ** rng.uniform(1.0, 4.0)
    W = np.where(Ac > 0, np.maximum(W, 1e-12), 0.0)
    W /= W.sum(axis=1, keepdims=True)
    trans = np.zeros_like(A)
    trans[np.ix_(idx, idx)] = W
    _fill_free_rows(trans, A, [u for u in range(b.size) if u not in set(idx)])
    pi = _embed(b.size, component, stationary_distribution(W))
    return MarkovMeasure(b, trans, pi)


def fixed_point_measure(b: BlockSystem, u: int) -> MarkovMeasure:
    """Point mass on the fixed point through a self-loop at state ``u``."""
    if b.transition[u, u] != 1:
        raise InputError(f"state {u} has no self-loop")
    A = b.transition.astype(float)
    trans = np.zeros_like(A)
    trans[u, u] = 1.0
    _fill_free_rows(trans, A, [v for v in range(b.size) if v != u])
    pi = np.zeros(b.size)
    pi[u] = 1.0
    return MarkovMeasure(b, trans, pi)


@dataclass(frozen=True, eq=False)
class VariationalReport:
    seed: int
    trials: int
    pressure: float
    max_value: float
    max_excess: float
    equilibrium_gap: float
    fixed_point_values: tuple[float, ...]
    passed: bool
    samples: tuple[MarkovMeasure, ...] = field(repr=False, default=())


def variational_check(b: BlockSystem, phi: Potential, trials: int,
                      seed: int = 0, tol: float = 1e-9) -> VariationalReport:
    """Compare h(m) + int(phi) against the pressure over random Markov measures.

    ``max_excess`` is the largest observed ``h + int(phi) - P``; it must not
    exceed ``tol``.  ``equilibrium_gap`` is the worst deviation from equality
    over the computed equilibrium states.
    """
    if trials < 1:
        raise InputError("trials must be at least 1")
    P = pressure(b, phi).value
    rng = np.random.default_rng(seed)
    samples = tuple(random_markov_measure(b, rng) for _ in range(trials))
    values = [markov_entropy(m) + integrate(m, phi) for m in samples]
    fixed = tuple(integrate(fixed_point_measure(b, u), phi)
                  for u in range(b.size) if b.transition[u, u] == 1)
    gap = max(abs(markov_entropy(m) + integrate(m, phi) - P)
              for m in equilibrium_states(b, phi))
    top = max(values + list(fixed))
    excess = top - P
    return VariationalReport(seed, trials, P, top, excess, gap, fixed,
                             passed=excess <= tol and gap <= tol, samples=samples)


def pressure_enclosure(b: BlockSystem, phi: Potential) -> PressureEnclosure:
    """Interval for the pressure of the target that ``phi`` approximates.

    With target psi in ``[phi - eps, phi]`` pointwise (eps = residual_bound),
    monotonicity and the Lipschitz bound give ``P(psi)`` in
    ``[P(phi) - eps, P(phi)]``.
    """
    eps = phi.residual_bound
    if eps < 0:
        raise InputError("negative residual bound")
    P = pressure(b, phi).value
    return PressureEnclosure(P - eps, P)
