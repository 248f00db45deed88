"""
An unstable point is not chaos
==============================

The LMG model at Omega = xi = 1 is integrable, yet its classical flow has
a hyperbolic point at the south pole with exponent sqrt(Omega(2 xi - Omega)).
Starting there, the Jz QFI grows at four times that rate, but the plateau
stays far below N(N+2)/3 and depends on the axis.
"""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from krylovqfi.classical import lmg_lyapunov
from krylovqfi.experiments import growth_fit, prepare_dynamics, qfi_evolution, scaling_sweep
from krylovqfi.models import ModelSpec

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
n = 100

setup = prepare_dynamics(ModelSpec.with_defaults("lmg", n), "-z")
trace = qfi_evolution(setup, "xyz")
fit = growth_fit(trace, "z")
print(f"growth rate {fit.rate:.3f}, four times the classical exponent: {4 * lmg_lyapunov(1, 1):.3f}")
for ax in "xyz":
    print(f"J{ax}: plateau / N(N+2)/3 = {trace.mean(ax) / setup.prediction:.3f}")

# the plateau still grows close to N^2, just with a small prefactor
rows, law = scaling_sweep("lmg", [50, 100, 200, 400], axis="z", direction="-z")
print(f"fit: {law.prefactor:.3f} N^{law.exponent:.3f}")

fig, (a, b) = plt.subplots(1, 2, figsize=(9, 3.2))
for axis, q in trace.qfi.items():
    a.semilogy(trace.times[1:], q[1:], lw=0.7, label=f"J{axis}")
t = np.linspace(*fit.t_range, 50)
a.semilogy(t, fit.prefactor * np.exp(fit.rate * t), "k--", lw=1, label=f"rate {fit.rate:.2f}")
a.axhline(setup.prediction, color="0.5", ls=":")
a.set_xlim(0, 20)
a.set_xlabel("t")
a.set_ylabel("QFI")
a.legend(fontsize=7)
ns = np.array([r.n_qubits for r in rows])
b.loglog(ns, [r.qfi_mean for r in rows], "o", label="LMG plateau")
b.loglog(ns, ns * (ns + 2) / 3, "k--", label="N(N+2)/3")
b.set_xlabel("N")
b.legend(fontsize=7)
fig.tight_layout()
fig.savefig(out / "lmg_instability.svg")
print("wrote", out / "lmg_instability.svg")
