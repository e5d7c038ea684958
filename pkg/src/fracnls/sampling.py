"""Random trial fields for the statistical checks."""
import numpy as np

from . import functionals as fn


def random_smooth_field(grid, rng, n_bumps=3, width=(0.6, 2.0), spread=2.0, amplitude=(0.2, 1.5)):
    """Sum of a few modulated complex Gaussians, decayed well inside the box."""
    coords = grid.coords
    u = np.zeros(grid.shape, dtype=complex)
    spread = min(spread, 0.25 * grid.L)
    wmax = min(width[1], grid.L / 12.0)
    wmin = min(width[0], wmax)
    for _ in range(n_bumps):
        c = rng.uniform(-spread, spread, grid.d)
        sig = rng.uniform(wmin, wmax)
        k = rng.normal(0.0, 0.5, grid.d)
        amp = rng.uniform(*amplitude) * np.exp(2j * np.pi * rng.uniform())
        r2 = 0.0
        ph = 0.0
        for x, cj, kj in zip(coords, c, k):
            r2 = r2 + (x - cj) ** 2
            ph = ph + kj * x
        u += amp * np.exp(-r2 / (2 * sig * sig) + 1j * ph)
    return u


def perturbed_dilation(grid, phi, rng, lam, eps):
    """``(phi + eps * g)^lam`` with ``g`` a random smooth field normalised to ``sup|phi|``."""
    g = random_smooth_field(grid, rng, n_bumps=2)
    g *= np.abs(phi).max() / np.abs(g).max()
    return fn.scale_field(grid, phi + eps * g, lam)


def unstable_set_samples(grid, phi, params, s_ground, rng, n, lam_range=(1.05, 2.0), eps=0.05, max_tries=None):
    """Draw ``n`` members of the unstable set with their reports.

    Half are perturbed dilations of the ground state, half are large
    multiples of random smooth fields (deep inside the set).
    """
    out = []
    tries = 0
    max_tries = max_tries or 20 * n
    while len(out) < n and tries < max_tries:
        tries += 1
        if tries % 2:
            v = perturbed_dilation(grid, phi, rng, rng.uniform(*lam_range), rng.uniform(0.0, eps))
        else:
            g = random_smooth_field(grid, rng)
            rep = fn.evaluate(grid, g, params)
            # amplitude where S and I are both clearly negative
            a = (rng.uniform(1.5, 4.0) * fn.nehari_lambda(rep, params))
            v = a * g
        rep = fn.evaluate(grid, v, params)
        if fn.in_unstable_set(rep, s_ground):
            out.append((v, rep))
    return out
