"""Shared random-input generators for the test suite (all seeded by callers)."""

from dataclasses import replace

import numpy as np

from factordiff import DEFAULT_TOLERANCES, hs_norm, in_domain_p


def random_square(rng, n):
    return rng.uniform(-1.0, 1.0, (n, n))


def random_invertible(rng, n, margin=1e-8):
    while True:
        a = random_square(rng, n)
        if np.linalg.svd(a, compute_uv=False)[-1] > margin * (1.0 + hs_norm(a)):
            return a


def random_rank_deficient(rng, n):
    k = int(rng.integers(1, n))
    return rng.uniform(-1.0, 1.0, (n, k)) @ rng.uniform(-1.0, 1.0, (k, n))


def random_spd(rng, n, shift=1e-3):
    m = random_square(rng, n)
    s = m.T @ m
    return 0.5 * (s + s.T) + shift * np.eye(n)


def random_symmetric(rng, n):
    e = random_square(rng, n)
    return 0.5 * (e + e.T)


def random_in_p(rng, n, margin=1e-2):
    gate = replace(DEFAULT_TOLERANCES, singularity_tol=margin)
    while True:
        a = random_square(rng, n)
        if in_domain_p(a, gate):
            return a
