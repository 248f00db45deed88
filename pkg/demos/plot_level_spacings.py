"""
Level repulsion of the three kicked tops
========================================

Quasi-energy spacings of the COE and CUE tops (N = 400, one x-parity
sector each) and of the CSE top (N = 401, Kramers pairs merged) compared
with the Wigner surmises.
"""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from krylovqfi.experiments import level_spacings
from krylovqfi.models import ModelSpec
from krylovqfi.rmt import Ensemble, spacing_test, surmise_pdf

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
s = np.linspace(0, 4, 200)

fig, axes = plt.subplots(1, 3, figsize=(10, 3), sharey=True)
for ax, (model, n) in zip(axes, [("coe", 400), ("cue", 400), ("cse", 401)]):
    sample, sector = level_spacings(ModelSpec.with_defaults(model, n))
    test = spacing_test(sample)
    ks = ", ".join(f"{e.name} {d:.3f}" for e, d in test.ks.items())
    print(f"{model} N={n} [{sector}]: {len(sample)} spacings, KS {ks} -> {test.verdict.name}")

    ax.hist(sample.spacings, bins=40, range=(0, 4), density=True, alpha=0.4)
    for ens in Ensemble:
        ax.plot(s, surmise_pdf(ens, s), lw=1, label=ens.name)
    ax.set_title(f"{model.upper()} top")
    ax.set_xlabel("S")
axes[0].set_ylabel("P(S)")
axes[0].legend(fontsize=7)
fig.tight_layout()
fig.savefig(out / "level_spacings.svg")
print("wrote", out / "level_spacings.svg")
