import numpy as np

from ordinalcps import SynthSpec, synth_generate

CANON = [0.1, 0.2, 0.4, 0.2, 0.1]


def random_simplex_cases(n_cases, seed, k_max=50, k_min=1):
    """(probs, tau) pairs: Dirichlet(1) rows, tau uniform on (0, 1]."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_cases):
        K = int(rng.integers(k_min, k_max + 1))
        probs = rng.dirichlet(np.ones(K))
        tau = 1.0 - float(rng.random())
        out.append((probs, tau))
    return out


def monotone_rows(n_rows, K, seed, sigma=(1.0, 5.0), temp=1.0):
    """Radially monotone score rows from the synthetic generator."""
    return synth_generate(
        SynthSpec(k=K, n=n_rows, sigma_range=sigma, miscal_temp=temp, seed=seed)
    )
