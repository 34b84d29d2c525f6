"""Independent reference implementations used to derive test baselines.

None of these call into the stepping, Hamiltonian or synthesis code of the
package; they rebuild the same objects along a different route (dense
Kronecker products, matrix logarithms, scalar per-trajectory loops).
"""

import math
from functools import reduce

import numpy as np
from scipy.linalg import expm, logm

SIGMA = {
    "sigma1": np.array([[0, 1], [1, 0]], dtype=complex),
    "sigma2": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "sigma3": np.array([[1, 0], [0, -1]], dtype=complex),
    "unit": np.eye(2, dtype=complex),
}


def kick(generator, sign=1):
    """The 2x2 matrix a firing switch applies, written out by hand."""
    return -1j * sign * SIGMA[generator]


def embed(m2, pair, n):
    out = np.eye(n, dtype=complex)
    i, j = pair[0] - 1, pair[1] - 1
    out[np.ix_([i, j], [i, j])] = m2
    return out


def cyclic_shift(L):
    """|x> -> |x+1 mod L>."""
    return np.roll(np.eye(L), 1, axis=0)


def location_projector(periods, fast, location):
    """Diagonal projector on the fast configurations where both watched variables sit at ``location``."""
    grids = np.meshgrid(*[np.arange(L) for L in periods], indexing="ij")
    hit = (grids[fast[0] - 1] == location[0]) & (grids[fast[1] - 1] == location[1])
    return np.diag(hit.ravel().astype(complex))


def dense_step(n_slow, periods, terms):
    """One-step unitary as a product of full-space operators.

    ``terms`` are ``(pair, generator, location, sign, fast)`` tuples. Each
    switch is ``I + P_loc (x) (A - I)``; they act in list order, then every
    fast variable shifts.
    """
    F = math.prod(periods)
    u = np.eye(n_slow * F, dtype=complex)
    for pair, gen, loc, sign, fast in terms:
        p = location_projector(periods, fast, loc)
        a = embed(kick(gen, sign), pair, n_slow) - np.eye(n_slow)
        u = (np.eye(n_slow * F) + np.kron(a, p)) @ u
    shift = reduce(np.kron, [cyclic_shift(L) for L in periods])
    return np.kron(np.eye(n_slow), shift) @ u


def model_terms(model):
    return [(t.pair, t.generator, t.location, t.sign, t.fast) for t in model.switches]


def averaged_hamiltonian(n_slow, periods, terms):
    """First-order generator: every firing is exp(-i theta G), spread over its recurrence time.

    The angle is read off with a matrix logarithm, so nothing about the
    coupling constant is assumed.
    """
    h = np.zeros((n_slow, n_slow), dtype=complex)
    for pair, gen, _, sign, fast in terms:
        per_firing = 1j * logm(kick(gen, sign))
        block = np.zeros((n_slow, n_slow), dtype=complex)
        i, j = pair[0] - 1, pair[1] - 1
        block[np.ix_([i, j], [i, j])] = per_firing
        h += block / (periods[fast[0] - 1] * periods[fast[1] - 1])
    return h


def first_coincidence(x0, location, periods):
    """Smallest t >= 0 with x0 + t == location on both watched variables, by search."""
    for t in range(math.lcm(*periods)):
        if all((x + t) % L == l for x, l, L in zip(x0, location, periods)):
            return t
    return None


def ring_histogram(n_slow, periods, terms, source, t_probe, t_final):
    """Per-configuration scalar simulation with a dense slow amplitude vector.

    Returns ``(final_counts, probe_slow)``: the final slow-state histogram as
    a dict and the slow index of every trajectory at ``t_probe`` in row-major
    configuration order. Terms sharing a firing point act in list order; the
    models used here never fire terms on different watched pairs together.
    """
    by_loc = {}
    for pair, gen, loc, sign, fast in terms:
        by_loc.setdefault((fast, loc), []).append(embed(kick(gen, sign), pair, n_slow))
    counts = {s: 0 for s in range(1, n_slow + 1)}
    probe = []
    for x0 in np.ndindex(*periods):
        psi = np.zeros(n_slow, dtype=complex)
        psi[source - 1] = 1
        x = list(x0)
        for t in range(t_final):
            if t == t_probe:
                probe.append(int(np.flatnonzero(psi)[0]) + 1)
            for (fast, loc), mats in by_loc.items():
                if x[fast[0] - 1] == loc[0] and x[fast[1] - 1] == loc[1]:
                    for m in mats:
                        psi = m @ psi
            x = [(v + 1) % L for v, L in zip(x, periods)]
        if t_probe == t_final:
            probe.append(int(np.flatnonzero(psi)[0]) + 1)
        counts[int(np.flatnonzero(psi)[0]) + 1] += 1
    return counts, probe


def visibility(counts, screen):
    c = [counts[s] for s in screen]
    return (max(c) - min(c)) / (max(c) + min(c))


def rabi_flip_probability(theta, t):
    """|<2| exp(-i theta sigma t) |1>|^2 for sigma1 or sigma2."""
    return math.sin(theta * t) ** 2


def dense_deviation_max(n_slow, periods, terms, horizon):
    """max_t ||E^T U^t E - exp(-i H t)||_2 over t = 0..horizon with dense matrices throughout."""
    u = dense_step(n_slow, periods, terms)
    F = math.prod(periods)
    e = np.kron(np.eye(n_slow), np.ones((F, 1)) / math.sqrt(F))
    h = averaged_hamiltonian(n_slow, periods, terms)
    ut = np.eye(n_slow * F, dtype=complex)
    worst = 0.0
    for t in range(horizon + 1):
        worst = max(worst, np.linalg.norm(e.T @ ut @ e - expm(-1j * h * t), 2))
        ut = u @ ut
    return float(worst)
