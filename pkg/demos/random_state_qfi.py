"""
QFI of random states
====================

Monte-Carlo averages of 4 Var(Jz) over random unit vectors, against the
closed forms.  Complex vectors (CUE, CSE sampling) follow the Haar value
4 Tr[O^2]/(K+1); real vectors (COE) follow their own formula, which only
matches it to leading order in K.
"""

from krylovqfi.predict import universal_qfi
from krylovqfi.rmt import Ensemble, rand_qfi_exact, rand_qfi_exact_real, random_qfi
from krylovqfi.spin import build_collective_ops

print(f"{'K':>5} {'ens':>4} {'MC mean':>10} {'s.e.':>7} {'complex':>10} {'real':>10} {'universal':>10}")
for k in (3, 11, 101):
    jz = build_collective_ops(k - 1)["z"]
    for ens in Ensemble:
        mc = random_qfi(jz, ens, 20_000, seed=[k, ens.beta], shards=8)
        print(
            f"{k:5d} {ens.name:>4} {mc.mean:10.3f} {mc.standard_error:7.3f} "
            f"{rand_qfi_exact(jz):10.3f} {rand_qfi_exact_real(jz):10.3f} "
            f"{universal_qfi(jz).leading_value:10.3f}"
        )
