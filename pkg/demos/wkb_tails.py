"""One-well ground state against its WKB approximation, deep into the tail.

The ground state is integrated in Pruefer variables, so log|phi| stays
accurate where phi itself is far below the smallest double.  The WKB form
h^{-1/4} a0(s) e^{-Phi(s)/h} should track it to O(h) in the exponent.

Run with ``python demos/wkb_tails.py``.
"""

import numpy as np

from fluxlab import builtin_potential
from fluxlab.spectral import one_well_state
from fluxlab.wkb import build_quasimode, wkb_residual, wkb_vs_numeric

spec = builtin_potential("sin2")
s = np.array([0.5, 1.0, 1.5, 2.0, 2.5])
for h in (0.05, 0.01):
    state = one_well_state(spec, h)
    q = build_quasimode(spec, h)
    numeric = state.log_abs(s) / np.log(10)
    wkb = q.log_envelope(s) / np.log(10)
    print(f"h = {h}: eigenvalue {state.eigenvalue:.10f} (kappa h = {h})")
    for si, a, b in zip(s, numeric, wkb):
        print(f"   s = {si:.1f}   log10|phi| = {a:10.3f}   log10 psi_wkb = {b:10.3f}")

print("\nweighted errors on [-1.5, 1.5] (relative to psi(0)):")
for h in (0.2, 0.1, 0.05):
    cmp = wkb_vs_numeric(spec, h)
    print(f"   h = {h:4}: residual {wkb_residual(spec, h):.3e}, value error {cmp.err_value:.4f},"
          f" derivative error {cmp.err_deriv:.4f}")
