"""Regenerate the demo model files in models/.

    python scripts/make_demo_models.py
"""

from pathlib import Path

from emergeqm.core import ModelSpec, SwitchTerm, TorusLattice
from emergeqm.ensemble import ExperimentSpec
from emergeqm.modelfile import write_model

OUT = Path(__file__).resolve().parent.parent / "models"

# Non-commuting layout shared by the lattice ladder used for convergence checks.
NONCOMMUTING_LAYOUT = (("sigma1", (0, 0)), ("sigma3", (2, 3)))
LADDER = ((5, 7), (7, 11), (11, 13))


def two_slit():
    """N=8 on the (31, 37) torus; 1 is the source, 2 and 3 the slits, 4..8 the screen.

    Every switch watches the same two fast variables. With coprime periods the
    torus is a single ring of 1147 sites, so positions below are ring times,
    converted to (x1, x2) by reduction modulo each period.
    """
    ring = 31 * 37

    def at(t):
        t %= ring
        return (t % 31, t % 37)

    into_a = (20, 45, 70, 95, 120)
    into_b = (120, 95, 70, 45, 20)
    b_target = (1, 2, 3, 4, 0)
    switches, used = [], set()
    for k in range(5):
        base = 229 * k
        placed = [
            ((1, 2), base),
            ((1, 3), base + 110),
            ((2, 4 + k), base + into_a[k]),
            ((3, 4 + b_target[k]), base + 110 + into_b[k]),
        ]
        for pair, t in placed:
            assert t % ring not in used, "ring positions must be distinct"
            used.add(t % ring)
            switches.append(SwitchTerm(pair, "sigma2", at(t), fast=(1, 2)))
    model = ModelSpec(8, TorusLattice((31, 37)), switches)
    return model, ExperimentSpec(1, (2, 3), (4, 5, 6, 7, 8), t_slit=150, t_screen=600)


def demo_models():
    models = {
        "free_2_3": (ModelSpec(2, TorusLattice((2, 3))), None),
        "single_sigma1": (
            ModelSpec(2, TorusLattice((5, 7)), [SwitchTerm((1, 2), "sigma1", (0, 0))]), None),
        "single_sigma2": (
            ModelSpec(2, TorusLattice((5, 7)), [SwitchTerm((1, 2), "sigma2", (0, 0))]), None),
        "commuting_pairs": (
            ModelSpec(4, TorusLattice((2, 3, 5, 7)), [
                SwitchTerm((1, 2), "sigma1", (1, 2)),
                SwitchTerm((3, 4), "sigma3", (4, 6)),
                SwitchTerm((3, 4), "unit", (0, 0), sign=-1),
            ]), None),
        "two_slit": two_slit(),
    }
    for L in LADDER:
        terms = [SwitchTerm((1, 2), g, loc) for g, loc in NONCOMMUTING_LAYOUT]
        models[f"noncommuting_{L[0]}_{L[1]}"] = (ModelSpec(2, TorusLattice(L), terms), None)
    return models


def main():
    OUT.mkdir(exist_ok=True)
    for name, (model, experiment) in demo_models().items():
        (OUT / f"{name}.model").write_text(write_model(model, experiment))
        print(f"wrote models/{name}.model  (D = {model.dim})")


if __name__ == "__main__":
    main()
