"""Recompute the frozen regression baselines from the independent oracles.

    python scripts/freeze_baselines.py

Prints the values hard-coded in tests/test_emergent.py, tests/test_ensemble.py
and tests/test_acceptance.py. Nothing here calls the package's stepping or
Hamiltonian code; the model files are only read for their switch layouts.
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

import oracles  # noqa: E402
from emergeqm.modelfile import load_model  # noqa: E402

HORIZON = 70
LADDER = ((5, 7), (7, 11), (11, 13))


def main():
    print(f"horizon-max deviation, t = 0..{HORIZON} (dense Kronecker step, scipy expm)")
    for L in LADDER:
        model = load_model(ROOT / "models" / f"noncommuting_{L[0]}_{L[1]}.model").model
        value = oracles.dense_deviation_max(2, L, oracles.model_terms(model), HORIZON)
        print(f"    {L}: {value!r}")

    mf = load_model(ROOT / "models" / "two_slit.model")
    m, e = mf.model, mf.experiment
    counts, _ = oracles.ring_histogram(
        m.n_slow, m.lattice.periods, oracles.model_terms(m), e.source, e.t_slit, e.t_screen
    )
    screen = {s: counts[s] for s in e.screen}
    print("two-slit screen histogram (scalar per-trajectory loop)")
    print(f"    {screen}")
    print(f"    visibility {oracles.visibility(counts, e.screen)!r}"
          f" = ({max(screen.values())} - {min(screen.values())}) / ({max(screen.values())} + {min(screen.values())})")


if __name__ == "__main__":
    main()
