from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from emergeqm.core import GENERATORS, ModelSpec, SwitchTerm, TorusLattice
from emergeqm.modelfile import load_model

MODELS = Path(__file__).resolve().parent.parent / "models"

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def demo(name):
    return load_model(MODELS / f"{name}.model")


@pytest.fixture
def models_dir():
    return MODELS


@st.composite
def random_models(draw, max_slow=4, period_choices=(3, 5, 7, 9, 11), max_switches=6):
    """Small models with distinct (pair, location) keys.

    The lattice has ``n_slow`` fast variables so every pair watches its own
    two variables. Periods may share factors (9 and 3), so coprimality is not
    enforced.
    """
    n = draw(st.integers(2, max_slow))
    periods = tuple(draw(st.lists(st.sampled_from(period_choices), min_size=n, max_size=n)))
    if n * np.prod(periods) > 4000:
        periods = tuple(min(p, 5) for p in periods)
    lattice = TorusLattice(periods, strict_coprime=False)
    n_terms = draw(st.integers(0, max_switches))
    terms, seen = [], set()
    for _ in range(n_terms):
        i = draw(st.integers(1, n - 1))
        j = draw(st.integers(i + 1, n))
        loc = (draw(st.integers(0, periods[i - 1] - 1)), draw(st.integers(0, periods[j - 1] - 1)))
        if ((i, j), loc) in seen:
            continue
        seen.add(((i, j), loc))
        terms.append(SwitchTerm(
            (i, j), draw(st.sampled_from(GENERATORS)), loc, draw(st.sampled_from((1, -1)))
        ))
    return ModelSpec(n, lattice, terms)


# one line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
