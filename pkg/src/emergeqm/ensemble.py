"""Deterministic trajectory ensembles and the two-slit post-selection experiment.

An ensemble is the set of classical runs obtained from every initial fast
configuration (exhaustive mode) or from seeded uniform draws (sampled mode),
all starting on the same slow state. Outcome histograms count basis labels;
phases are recorded per trajectory but never enter a histogram.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from numpy.linalg import matrix_power
from scipy import stats

from .core import (
    PHASES,
    FastConfig,
    ModelSpec,
    OntBasisState,
    SimultaneousFiringWarning,
    advance,
    build_step_unitary,
    classical_step,
)
from .emergent import effective_hamiltonian, effective_propagator, projected_propagator
from .errors import CapacityError, ModelError, RangeError

ENUMERATION_BUDGET = 10**6


@dataclass(frozen=True)
class Histogram:
    counts: dict  # label -> count, labels in insertion order

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def frequencies(self) -> dict:
        total = self.total
        return {k: (v / total if total else 0.0) for k, v in self.counts.items()}

    def __add__(self, other: Histogram) -> Histogram:
        out = dict(self.counts)
        for k, v in other.counts.items():
            out[k] = out.get(k, 0) + v
        return Histogram(out)

    @classmethod
    def of(cls, values, labels) -> Histogram:
        c = Counter(int(v) for v in values)
        return cls({lab: c.get(lab, 0) for lab in labels})


@dataclass(frozen=True)
class TrajectoryRecord:
    initial: FastConfig
    slow0: int
    probes: dict  # time -> slow index
    final_slow: int
    final_phase: complex
    firings: tuple = ()  # (step, term, slow_before, slow_after), 1-based term and slow labels


@dataclass(frozen=True)
class ExperimentSpec:
    source: int
    slits: tuple[int, int]
    screen: tuple[int, ...]
    t_slit: int
    t_screen: int

    def __post_init__(self):
        object.__setattr__(self, "slits", tuple(int(s) for s in self.slits))
        object.__setattr__(self, "screen", tuple(int(s) for s in self.screen))
        if len(self.slits) != 2 or self.slits[0] == self.slits[1]:
            raise ModelError("experiment needs two distinct slit states", field="slits")
        if not self.screen or len(set(self.screen)) != len(self.screen):
            raise ModelError("screen bins must be distinct and non-empty", field="screen")
        roles = [self.source, *self.slits, *self.screen]
        if len(set(roles)) != len(roles):
            raise ModelError("source, slit and screen states must be disjoint", field="screen")
        if not 0 <= self.t_slit < self.t_screen:
            raise ModelError("probe times must satisfy 0 <= t_slit < t_screen", field="t_slit")

    def check(self, model: ModelSpec) -> None:
        for s in (self.source, *self.slits, *self.screen):
            if not 1 <= s <= model.n_slow:
                raise RangeError(f"experiment state {s} outside 1..{model.n_slow}", field="experiment")


def run_trajectory(model: ModelSpec, initial: OntBasisState, T: int, probes=()) -> TrajectoryRecord:
    """Step one basis state ``T`` times, logging every switch that acts on it."""
    if T < 0:
        raise ValueError("T must be non-negative")
    initial.check(model)
    probes = set(probes)
    seen = {}
    firings = []
    state = initial
    for t in range(T + 1):
        if t in probes:
            seen[t] = state.slow
        if t == T:
            break
        fired = []
        state = classical_step(state, model, fired)
        firings.extend((t, *f) for f in fired)
    return TrajectoryRecord(initial.fast, initial.slow, seen, state.slow, state.phase, tuple(firings))


def initial_configs(model: ModelSpec, mode="exhaustive", samples=None, seed=0) -> np.ndarray:
    """Initial fast configurations as an ``(n, n_fast)`` integer array.

    Exhaustive mode lists every configuration once in row-major order. Sampled
    mode draws ``samples`` configurations uniformly with a Philox counter-based
    generator keyed by ``seed``.
    """
    if mode == "exhaustive":
        if model.fast_size > ENUMERATION_BUDGET:
            raise CapacityError(
                f"{model.fast_size} initial configurations exceed the enumeration "
                f"budget {ENUMERATION_BUDGET}; use sampled mode"
            )
        return model.lattice.all_positions()
    if mode == "sampled":
        if samples is None or samples < 1:
            raise ValueError("sampled mode needs a positive sample count")
        rng = np.random.Generator(np.random.Philox(seed))
        cols = [rng.integers(0, L, size=samples, dtype=np.int64) for L in model.lattice.periods]
        return np.stack(cols, axis=1)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class BatchRun:
    x0: np.ndarray
    slow0: int
    probes: dict  # time -> 0-based slow indices
    final_slow: np.ndarray  # 0-based
    final_phase: np.ndarray  # exponents mod 4
    log: list | None = None  # (step, term_index, rows, before, after), 0-based

    def records(self) -> list[TrajectoryRecord]:
        firings = [[] for _ in range(len(self.x0))]
        for step, n, rows, before, after in self.log or ():
            for r, b, a in zip(rows, before, after):
                firings[r].append((step, n + 1, int(b) + 1, int(a) + 1))
        return [
            TrajectoryRecord(
                FastConfig(tuple(self.x0[r])),
                self.slow0,
                {t: int(v[r]) + 1 for t, v in self.probes.items()},
                int(self.final_slow[r]) + 1,
                PHASES[int(self.final_phase[r])],
                tuple(firings[r]),
            )
            for r in range(len(self.x0))
        ]


def run_batch(model: ModelSpec, x0, slow0: int, T: int, probes=(), log=False) -> BatchRun:
    """Run every initial configuration in ``x0`` for ``T`` steps from slow state ``slow0``."""
    if T < 0:
        raise ValueError("T must be non-negative")
    if not 1 <= slow0 <= model.n_slow:
        raise RangeError(f"slow state {slow0} outside 1..{model.n_slow}", field="source")
    x = np.asarray(x0, dtype=np.int64)
    n = len(x)
    slow = np.full(n, slow0 - 1, dtype=np.int64)
    phase = np.zeros(n, dtype=np.int64)
    probes = sorted(set(probes))
    seen = {}
    entries = [] if log else None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", SimultaneousFiringWarning)
        for t in range(T + 1):
            if t in probes:
                seen[t] = slow.copy()
            if t == T:
                break
            step_log = [] if log else None
            x, slow, phase = advance(model, x, slow, phase, step_log)
            if log:
                entries.extend((t, *e) for e in step_log)
    if caught:
        warnings.warn(
            f"simultaneous switch firings occurred in {len(caught)} steps; "
            "outcomes depend on the declared switch order",
            SimultaneousFiringWarning,
            stacklevel=2,
        )
    return BatchRun(np.asarray(x0, dtype=np.int64), slow0, seen, slow, phase, entries)


def run_ensemble(model: ModelSpec, slow0: int, T: int, mode="exhaustive", samples=None, seed=0) -> Histogram:
    """Histogram of final slow states over an ensemble of initial fast configurations."""
    x0 = initial_configs(model, mode, samples, seed)
    run = run_batch(model, x0, slow0, T)
    return Histogram.of(run.final_slow + 1, range(1, model.n_slow + 1))


def density_matrix_check(model: ModelSpec, slow0: int, T: int) -> float:
    """Largest gap between exhaustive frequencies and the evolved density-matrix diagonal.

    The reference evolves ``rho0`` (uniform over fast configurations, pure on
    ``slow0``) with the dense step unitary; for a signed permutation the two
    agree exactly.
    """
    u = build_step_unitary(model)
    F = model.fast_size
    rho = np.zeros((model.dim, model.dim), dtype=complex)
    idx = np.arange(F) + (slow0 - 1) * F
    rho[idx, idx] = 1.0 / F
    ut = matrix_power(u, T)
    diag = np.real(np.diagonal(ut @ rho @ ut.conj().T))
    marginal = diag.reshape(model.n_slow, F).sum(axis=1)
    freq = run_ensemble(model, slow0, T).frequencies()
    return float(max(abs(freq[s + 1] - marginal[s]) for s in range(model.n_slow)))


@dataclass(frozen=True)
class BornGapReport:
    classical: np.ndarray  # exhaustive final-state frequencies
    quantum: np.ndarray  # |<s| P U^T E |slow0>|^2
    leakage: float  # 1 - sum(quantum), weight in excited fast modes
    renormalized: np.ndarray  # quantum / (1 - leakage)
    effective: np.ndarray  # |<s| exp(-i H_slow T) |slow0>|^2
    gap: float  # max |classical - quantum|


def born_gap(model: ModelSpec, slow0: int, T: int) -> BornGapReport:
    hist = run_ensemble(model, slow0, T)
    classical = np.array([hist.frequencies()[s] for s in range(1, model.n_slow + 1)])
    col = projected_propagator(model, T)[:, slow0 - 1]
    quantum = np.abs(col) ** 2
    kept = quantum.sum()
    eff = np.abs(effective_propagator(effective_hamiltonian(model), T)[:, slow0 - 1]) ** 2
    return BornGapReport(
        classical, quantum, float(1 - kept),
        quantum / kept if kept > 0 else quantum, eff,
        float(np.abs(classical - quantum).max()),
    )


@dataclass(frozen=True)
class UniformityTest:
    statistic: float
    dof: int
    pvalue: float
    critical99: float

    @property
    def rejected(self) -> bool:
        return self.statistic > self.critical99


def uniformity_chi2(counts) -> UniformityTest:
    """Pearson chi-square of observed counts against equal expected counts."""
    counts = np.asarray(counts, dtype=float)
    k = len(counts)
    if k < 2 or counts.sum() == 0:
        return UniformityTest(0.0, max(k - 1, 0), 1.0, math.inf)
    stat = float(stats.chisquare(counts).statistic)
    dof = k - 1
    return UniformityTest(stat, dof, float(stats.chi2.sf(stat, dof)), float(stats.chi2.ppf(0.99, dof)))


def orbit_phase(model: ModelSpec, x) -> np.ndarray:
    """Time at which the orbit through the origin configuration reaches each row of ``x``.

    Defined when the periods are pairwise coprime, so that a single orbit of
    length ``prod(L)`` covers the whole torus. Post-selection acts on this
    coordinate: the shift is a translation of it.
    """
    periods = model.lattice.periods
    P = math.lcm(*periods)
    if P != model.fast_size:
        raise ModelError("orbit phase needs pairwise coprime periods")
    t = np.arange(P)
    lookup = np.empty(P, dtype=np.int64)
    lookup[np.ravel_multi_index(tuple(t % L for L in periods), periods)] = t
    x = np.asarray(x, dtype=np.int64)
    return lookup[np.ravel_multi_index(tuple(x.T), periods)]


def _orbit_bins(n_class: int, max_bins=16) -> int:
    # at least five expected counts per bin
    return int(max(2, min(max_bins, n_class // 5)))


@dataclass(frozen=True)
class ClassDistribution:
    label: str
    size: int
    cell_counts: np.ndarray  # per initial fast configuration, row-major
    cell_test: UniformityTest
    orbit_counts: np.ndarray | None  # binned orbit phase
    orbit_test: UniformityTest | None


@dataclass(frozen=True)
class InterferenceResult:
    spec: ExperimentSpec
    full: Histogram  # slow index at t_screen, all trajectories
    conditioned: dict  # class label -> Histogram
    initial: dict  # class label -> ClassDistribution
    run: BatchRun = field(repr=False)

    def visibility(self) -> float:
        return fringe_visibility(self.full, self.spec.screen)

    def records(self) -> list[TrajectoryRecord]:
        return self.run.records()


SLIT_CLASSES = ("slit_a", "slit_b", "neither")


def fringe_visibility(hist: Histogram, bins) -> float:
    """``(max - min) / (max + min)`` of the counts on the screen bins."""
    c = [hist.counts.get(b, 0) for b in bins]
    hi, lo = max(c), min(c)
    return (hi - lo) / (hi + lo) if hi + lo else 0.0


def classify_slit(slow_at_slit, spec: ExperimentSpec):
    """Class label per trajectory from its (1-based) slow index at ``t_slit``."""
    s = np.asarray(slow_at_slit)
    out = np.full(s.shape, "neither", dtype=object)
    out[s == spec.slits[0]] = "slit_a"
    out[s == spec.slits[1]] = "slit_b"
    return out


def run_interference(model: ModelSpec, spec: ExperimentSpec, mode="exhaustive", samples=None,
                     seed=0, log=False) -> InterferenceResult:
    """Two-slit run: classify at ``t_slit``, bin at ``t_screen``, and test each
    slit class's initial fast configurations for uniformity."""
    spec.check(model)
    x0 = initial_configs(model, mode, samples, seed)
    run = run_batch(model, x0, spec.source, spec.t_screen, probes=(spec.t_slit,), log=log)
    labels = range(1, model.n_slow + 1)
    at_slit = run.probes[spec.t_slit] + 1
    screen = run.final_slow + 1
    classes = classify_slit(at_slit, spec)
    full = Histogram.of(screen, labels)
    flat = np.ravel_multi_index(tuple(x0.T), model.lattice.periods)
    try:
        phases = orbit_phase(model, x0)
    except ModelError:
        phases = None
    conditioned, initial = {}, {}
    for label in SLIT_CLASSES:
        mask = classes == label
        conditioned[label] = Histogram.of(screen[mask], labels)
        cells = np.bincount(flat[mask], minlength=model.fast_size)
        orbit_counts = orbit_test = None
        if phases is not None and mask.any():
            bins = _orbit_bins(int(mask.sum()))
            edges = (phases[mask] * bins) // model.fast_size
            orbit_counts = np.bincount(edges, minlength=bins)
            orbit_test = uniformity_chi2(orbit_counts)
        initial[label] = ClassDistribution(
            label, int(mask.sum()), cells, uniformity_chi2(cells), orbit_counts, orbit_test
        )
    return InterferenceResult(spec, full, conditioned, initial, run)


def postselect(records, predicate):
    """Keep the records satisfying ``predicate``; histogram their final slow states."""
    kept = [r for r in records if predicate(r)]
    labels = sorted({r.final_slow for r in records})
    return kept, Histogram.of((r.final_slow for r in kept), labels)
