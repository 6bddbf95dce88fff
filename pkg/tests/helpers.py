"""Samplers for points of the constraint polytopes."""

import numpy as np

from quasipin.catalog import Setting, load_setting


def sample_polytope(setting, rng, n, hf_mix=True):
    """Rejection-sample ``n`` points of the polytope of a d=10 setting.

    Draws scaled Dirichlet vectors with entries in [0, 1], sorts them and
    optionally pulls them towards Hartree-Fock so that points close to the
    pinned vertex are represented too.
    """
    setting = Setting.coerce(setting)
    cat = load_setting(setting)
    kappa = np.array([c.coeffs for c in cat], dtype=float)
    n_p, d = setting.n_particles, setting.dim
    hf = np.array(setting.hartree_fock, dtype=float)
    out = []
    while len(out) < n:
        x = rng.dirichlet(np.ones(d)) * n_p
        if x.max() > 1:
            continue
        x = np.sort(x)[::-1]
        if hf_mix:
            t = rng.random() ** 2
            x = t * x + (1 - t) * hf
        if (kappa[:, 0] + kappa[:, 1:] @ x).min() >= 0:
            out.append(x)
    return out


def sample_bd(rng, n):
    """Points of the (3,6) polytope, strictly inside with probability one."""
    out = []
    while len(out) < n:
        l1, l2, l3 = np.sort(rng.uniform(0.5, 1.0, 3))[::-1]
        if 1 - l1 - l2 + l3 > 0:
            out.append(np.array([l1, l2, l3, 1 - l3, 1 - l2, 1 - l1]))
    return out
