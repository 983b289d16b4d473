"""Textbook DE/rand/1/bin written from scratch, used as a cross-check.

It consumes the random stream in the same order as the package optimiser
with adaptation and subspace breeding switched off: one uniform per
generation (the unused subspace draw), then per individual four uniforms
(the unused adaptation draws), three partners, the forced coordinate and one
uniform per coordinate.  Generations are synchronous.
"""

import numpy as np


def minimal_de(f, dim, lo, hi, pop_size, generations, seed, F=0.5, CR=0.9):
    rng = np.random.default_rng(seed)
    pop = lo + rng.random((pop_size, dim)) * (hi - lo)
    fit = np.array([f(x) for x in pop])
    history = [(0, pop_size, fit.max(), fit.mean())]
    for g in range(1, generations + 1):
        rng.random()
        trials = []
        for i in range(pop_size):
            rng.random(4)
            others = [k for k in range(pop_size) if k != i]
            a, b, c = (others[k] for k in rng.choice(pop_size - 1, 3, replace=False))
            v = pop[a] + F * (pop[b] - pop[c])
            w = hi - lo
            v = np.mod(v - lo, 2 * w)
            v = lo + np.where(v > w, 2 * w - v, v)
            jr = rng.integers(dim)
            mask = rng.random(dim) < CR
            mask[jr] = True
            trials.append(np.where(mask, v, pop[i]))
        for i, t in enumerate(trials):
            ft = f(t)
            if ft >= fit[i]:
                pop[i], fit[i] = t, ft
        history.append((g, pop_size * (g + 1), fit.max(), fit.mean()))
    return pop, fit, history
