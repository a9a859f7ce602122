"""Shared kernel/measure suite used across the spectral and acceptance tests.

The suite mixes the smooth built-ins with deliberately rank-deficient and
randomly tabulated kernels so every identity is exercised on both clean
and numerically marginal spectra.
"""
import numpy as np
import pytest

import mercerkit as mk


def gaussian_cases():
    cases = []
    for sigma in (0.5, 1.0, 2.0):
        mu = mk.uniform_grid([-1.0], [1.0], 64)
        cases.append((f"gauss-s{sigma}", mk.Gaussian(sigma), mu))
    # One 2-D instance to keep the dimension-handling honest.
    cases.append(("gauss-s1-2d", mk.Gaussian(1.0), mk.uniform_grid([-1.0, -1.0], [1.0, 1.0], 8)))
    return cases


def weyl_cases(seed=7):
    rng = np.random.default_rng(seed)
    cases = []
    for n in (1, 2, 3):
        for d in (1, 2, 3, 4):
            pts = rng.uniform(-1.0, 1.0, size=(20, n))
            w = rng.uniform(0.5, 1.5, size=20)
            mu = mk.DiscreteMeasure(pts, w / w.sum())
            cases.append((f"weyl-d{d}-n{n}", mk.Weyl(d), mu))
    return cases


def identity_case(seed=3):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1.0, 1.0, size=(16, 2))
    return [("identity", mk.Identity(), mk.DiscreteMeasure(pts, np.full(16, 1.0 / 16.0)))]


def tabulated_cases(count=20, seed=11):
    """Random PSD tables G = B^T B with m <= 128 and index coordinates."""
    rng = np.random.default_rng(seed)
    cases = []
    for i in range(count):
        m = int(rng.integers(4, 129))
        k = int(rng.integers(1, m + 1))
        B = rng.normal(size=(k, m))
        G = B.T @ B
        G = (G + G.T) / 2.0
        pts = np.arange(m, dtype=float).reshape(-1, 1)
        w = rng.uniform(0.5, 1.5, size=m)
        mu = mk.DiscreteMeasure(pts, w / w.sum())
        cases.append((f"tab{i:02d}-m{m}-k{k}", mk.Tabulated(pts, G), mu))
    return cases


@pytest.fixture(scope="session")
def suite():
    """All (name, kernel, measure) triples: 3+1 Gaussian, 12 Weyl, identity, 20 tabulated."""
    return gaussian_cases() + weyl_cases() + identity_case() + tabulated_cases()


@pytest.fixture(scope="session")
def spectra(suite):
    """Spectral decompositions for the whole suite, computed once."""
    return {name: mk.spectrum(mk.assemble(spec, mu)) for name, spec, mu in suite}
