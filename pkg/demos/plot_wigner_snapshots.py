"""
Wigner snapshots of a scrambling spin
=====================================

The spin Wigner function of the COE top state at a few times.  The initial
coherent state is a smooth cap; after the plateau onset the field breaks up
into structure on the scale sqrt(3)/N, much like a Haar-random state.
"""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from krylovqfi.dynamics import evolve_state
from krylovqfi.experiments import prepare_dynamics
from krylovqfi.models import ModelSpec
from krylovqfi.rmt import sample_random_state
from krylovqfi.wigner import rotation_fidelity_width, wigner_grid

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
n = 40

setup = prepare_dynamics(ModelSpec.with_defaults("coe", n))
states = {f"t = {t}": evolve_state(setup.psi0, setup.spectrum, t) for t in (0, 3, 1000)}
states["Haar"] = sample_random_state(n + 1, "CUE", seed=1)

fig, axes = plt.subplots(1, len(states), figsize=(12, 2.6))
for ax, (label, psi) in zip(axes, states.items()):
    field = wigner_grid(psi, 64, 128)
    widths = [rotation_fidelity_width(psi, a).angle for a in "xyz"]
    print(f"{label:9s} integral {field.integral():.4f}  widths " + " ".join(f"{w:.3f}" for w in widths))
    lim = np.abs(field.values).max()
    ax.pcolormesh(field.phi, field.theta, field.values, cmap="RdBu_r", vmin=-lim, vmax=lim, shading="nearest")
    ax.invert_yaxis()
    ax.set_title(label)
    ax.set_xlabel("phi")
axes[0].set_ylabel("theta")
fig.tight_layout()
fig.savefig(out / "wigner_snapshots.svg")
print("wrote", out / "wigner_snapshots.svg")
