import numpy as np


def random_patterns(rng, m, d):
    """m distinct random bipolar patterns of length d."""
    while True:
        p = rng.choice([-1.0, 1.0], size=(m, d))
        if len({row.tobytes() for row in p}) == m:
            return p


def flip(x, idx):
    y = np.array(x, dtype=float)
    y[list(idx)] *= -1.0
    return y
