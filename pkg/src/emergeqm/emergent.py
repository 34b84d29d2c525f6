"""Emergent slow dynamics: averaged Hamiltonian, ground-state projection, quasi-energies.

Observation on time scales much longer than a fast period is modelled by
projecting the fast variables onto their uniform (zero quasi-energy)
superposition over the torus. This projection is an interpretation of
time-averaged measurement rather than something derived from the step law.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .core import PAULI, ModelSpec, SignedPermutation, step_permutation

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class EffectiveHamiltonian:
    matrix: np.ndarray
    # (row, col), 1-based -> switch indices (1-based) contributing to that entry
    provenance: dict = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return len(self.matrix)


def effective_hamiltonian(model: ModelSpec) -> EffectiveHamiltonian:
    """Replace every switch's Kronecker deltas by their torus average.

    Each term contributes ``sign * (pi/2) / (L_a L_b)`` times its generator
    embedded on the slow pair; ``unit`` contributes the identity on the pair,
    so a firing ``-i`` corresponds to a positive energy shift.
    """
    n = model.n_slow
    h = np.zeros((n, n), dtype=complex)
    provenance = defaultdict(list)
    for k, term in enumerate(model.switches, 1):
        g = PAULI[term.generator]
        idx = [term.pair[0] - 1, term.pair[1] - 1]
        h[np.ix_(idx, idx)] += term.sign * model.coupling(term) * g
        for r, c in zip(*np.nonzero(g)):
            provenance[idx[r] + 1, idx[c] + 1].append(k)
    return EffectiveHamiltonian(h, dict(provenance))


def _check_hermitian(h, tol=1e-12):
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    err = np.abs(h - h.conj().T).max() if h.size else 0.0
    if err > tol:
        raise ValueError(f"matrix is not Hermitian (max |H - H^dagger| = {err:.3g})")
    return h


def effective_propagator(h, t: float) -> np.ndarray:
    """``exp(-i H t)`` by eigendecomposition of the Hermitian ``H``."""
    if isinstance(h, EffectiveHamiltonian):
        h = h.matrix
    h = _check_hermitian(h)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def evolve_effective(h, psi0, t: float) -> np.ndarray:
    return effective_propagator(h, t) @ np.asarray(psi0, dtype=complex)


def project_ground(psi, model: ModelSpec) -> np.ndarray:
    """Overlap of a full state with the uniform fast ground state, per slow index."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[0] != model.dim:
        raise ValueError(f"state has dimension {psi.shape[0]}, model has {model.dim}")
    F = model.fast_size
    return psi.reshape(model.n_slow, F, *psi.shape[1:]).sum(axis=1) / math.sqrt(F)


def embed_ground(phi, model: ModelSpec) -> np.ndarray:
    """Tensor a slow vector (or the columns of a slow matrix) with the uniform fast state."""
    phi = np.asarray(phi, dtype=complex)
    if phi.shape[0] != model.n_slow:
        raise ValueError(f"slow vector has dimension {phi.shape[0]}, model has {model.n_slow}")
    F = model.fast_size
    out = np.repeat(phi[:, None, ...], F, axis=1) / math.sqrt(F)
    return out.reshape(model.dim, *phi.shape[1:])


def projected_propagators(model: ModelSpec, horizon: int, perm: SignedPermutation | None = None):
    """``P U^t E`` for ``t = 0..horizon`` as an array of shape ``(horizon + 1, N, N)``.

    Uses the signed-permutation form of the step, so no dense ``D x D`` matrix
    is built. The result is generally sub-unitary; ``1 - |column|^2`` is the
    weight leaked into excited fast modes.
    """
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    perm = step_permutation(model) if perm is None else perm
    state = embed_ground(np.eye(model.n_slow), model)
    out = np.empty((horizon + 1, model.n_slow, model.n_slow), dtype=complex)
    for t in range(horizon + 1):
        out[t] = project_ground(state, model)
        if t < horizon:
            state = perm.apply(state)
    return out


def projected_propagator(model: ModelSpec, t: int, perm: SignedPermutation | None = None):
    return projected_propagators(model, t, perm)[t]


@dataclass(frozen=True)
class DeviationCurve:
    times: np.ndarray
    deviations: np.ndarray
    leakage: np.ndarray  # max over columns of 1 - |column|^2 of the projected propagator

    @property
    def max(self) -> float:
        return float(self.deviations.max())


def deviation_curve(model: ModelSpec, horizon: int) -> DeviationCurve:
    """Operator 2-norm distance between the exact projected and the averaged evolution."""
    h = effective_hamiltonian(model).matrix
    w, v = np.linalg.eigh(h)
    exact = projected_propagators(model, horizon)
    times = np.arange(horizon + 1)
    dev = np.empty(horizon + 1)
    leak = np.empty(horizon + 1)
    for t in times:
        approx = (v * np.exp(-1j * w * t)) @ v.conj().T
        dev[t] = np.linalg.norm(exact[t] - approx, 2)
        leak[t] = (1 - (np.abs(exact[t]) ** 2).sum(axis=0)).max()
    return DeviationCurve(times, dev, leak)


@dataclass(frozen=True)
class QuasiEnergySpectrum:
    phases: np.ndarray  # sorted, in [0, 2 pi)
    levels: np.ndarray  # distinct phases
    multiplicities: np.ndarray

    def __len__(self):
        return len(self.phases)


def _canonical_phases(eps, tol):
    eps = np.mod(eps, TWO_PI)
    eps[eps > TWO_PI - tol] = 0.0
    return np.sort(eps)


def _group(phases, tol):
    levels, mult = [], []
    for p in phases:
        if levels and p - levels[-1] <= tol:
            mult[-1] += 1
        else:
            levels.append(p)
            mult.append(1)
    return np.array(levels), np.array(mult, dtype=int)


def quasi_energy_spectrum(u, tol=1e-9) -> QuasiEnergySpectrum:
    """Quasi-energies ``eps`` with ``U = exp(-i eps)`` on eigenvectors, mapped to [0, 2 pi)."""
    u = np.asarray(u, dtype=complex)
    err = np.abs(u.conj().T @ u - np.eye(len(u))).max()
    if err > 1e-10:
        raise ValueError(f"operator is not unitary (max |U^dagger U - I| = {err:.3g})")
    eps = _canonical_phases(-np.angle(np.linalg.eigvals(u)), tol)
    return QuasiEnergySpectrum(eps, *_group(eps, tol))


def signed_permutation_spectrum(perm: SignedPermutation, tol=1e-9) -> QuasiEnergySpectrum:
    """Exact quasi-energies from the cycle structure of a signed permutation.

    A cycle of length ``l`` whose entries multiply to ``exp(i phi)`` has
    eigenvalues ``exp(i (phi + 2 pi k) / l)`` for ``k = 0..l-1``.
    """
    seen = np.zeros(perm.dim, dtype=bool)
    eps = []
    for start in range(perm.dim):
        if seen[start]:
            continue
        length, total, c = 0, 0, start
        while not seen[c]:
            seen[c] = True
            total += int(perm.phase[c])
            length += 1
            c = int(perm.target[c])
        phi = (total % 4) * math.pi / 2
        eps.extend(-(phi + TWO_PI * k) / length for k in range(length))
    eps = _canonical_phases(np.array(eps), tol)
    return QuasiEnergySpectrum(eps, *_group(eps, tol))


@dataclass(frozen=True)
class LadderReport:
    regular: bool
    spacing: float
    residual: float
    n_levels: int


def ladder_report(spectrum: QuasiEnergySpectrum, tol=1e-9) -> LadderReport:
    """Test whether the distinct levels are equally spaced around the circle.

    Gaps between neighbouring distinct levels, including the wrap-around gap,
    are compared with ``2 pi / n_levels``; ``residual`` is the largest
    deviation of any gap.
    """
    levels = spectrum.levels
    if len(levels) == 0:
        raise ValueError("empty spectrum")
    gaps = np.diff(np.append(levels, levels[0] + TWO_PI))
    spacing = TWO_PI / len(levels)
    residual = float(np.abs(gaps - spacing).max())
    return LadderReport(residual <= tol, spacing, residual, len(levels))


def low_lying_levels(spectrum: QuasiEnergySpectrum, count: int) -> np.ndarray:
    """The ``count`` quasi-energies closest to zero, folded into (-pi, pi] and sorted."""
    folded = np.where(spectrum.phases > math.pi, spectrum.phases - TWO_PI, spectrum.phases)
    nearest = folded[np.argsort(np.abs(folded), kind="stable")[:count]]
    return np.sort(nearest)
