import itertools

import numpy as np


def random_spd(rng, p):
    b = rng.normal(size=(p, p))
    return b @ b.T + np.eye(p)


def random_gen_perm(rng, p):
    """Random P S D matrix."""
    perm = np.eye(p)[rng.permutation(p)]
    signs = np.diag(rng.choice([-1.0, 1.0], size=p))
    scales = np.diag(rng.uniform(0.1, 10.0, size=p))
    return perm @ signs @ scales


def brute_force_mdi(g):
    """MDI by enumerating permutations and row signs with the optimal positive row scale."""
    g = np.asarray(g, dtype=float)
    p = g.shape[0]
    best = np.inf
    for perm in itertools.permutations(range(p)):
        for signs in itertools.product((-1.0, 1.0), repeat=p):
            total = 0.0
            for i in range(p):
                row = signs[i] * g[perm[i]]
                d = max(0.0, row[i]) / (row @ row)
                target = np.zeros(p)
                target[i] = 1.0
                total += np.sum((d * row - target) ** 2)
            best = min(best, total)
    return np.sqrt(best / (p - 1))


def random_orthogonal(rng, p):
    q, r = np.linalg.qr(rng.normal(size=(p, p)))
    return q * np.sign(np.diag(r))
