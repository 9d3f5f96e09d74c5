import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def smooth_even_profile(s, amp=0.2, seed=3):
    """Random smooth even-at-zero profile with slope-free samples at both
    ends, from a short cosine series."""
    gen = np.random.default_rng(seed)
    coef = gen.normal(size=4) * amp / 4
    L = s[-1] - s[0]
    out = np.zeros_like(s)
    for k, c in enumerate(coef):
        out += c * np.cos(np.pi * (k + 1) * (s - s[0]) / L) ** 2
    return out
