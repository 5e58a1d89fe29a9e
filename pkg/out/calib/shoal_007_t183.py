"""Verify the A=0.07 window: drift fine-grained through t = 18.3."""
import time

import numpy as np

from basinwaves.cli import shoal_run

t0 = time.time()
system, gauges, cons, y = shoal_run(0.07, variant="full", nx=467, ny=8,
                                    dt=2e-3, T=18.3, r=2, p=3,
                                    shore_dx=0.02, shore_from=10.0)
dE = cons.energy / cons.energy[0] - 1.0
dM = cons.mass / cons.mass[0] - 1.0
for tq in np.concatenate([np.arange(2.0, 17.5, 1.0),
                          np.arange(17.5, 18.3 + 1e-9, 0.1)]):
    k = np.searchsorted(cons.times, tq - 1e-9)
    if k >= len(cons.times):
        break
    print(f"t={cons.times[k]:6.2f} dE/E0={dE[k]:+.3e} dM/M0={dM[k]:+.3e}",
          flush=True)
print(f"max|dE/E0|={np.max(np.abs(dE)):.3e} max|dM/M0|={np.max(np.abs(dM)):.3e}")
for gi in range(gauges.values.shape[1]):
    k = int(np.argmax(gauges.values[:, gi]))
    print(f"gauge{gi+1} peak={gauges.values[k, gi]:.5f} "
          f"at t={gauges.times[k]:.3f}")
print(f"[{time.time()-t0:.0f}s]", flush=True)
