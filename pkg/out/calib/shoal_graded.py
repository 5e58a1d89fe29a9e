"""Calibrate the final graded shoaling runs: degrees (2,3), shore dx=0.02."""
import time

import numpy as np

from basinwaves.cli import shoal_run
from basinwaves.model import BlowUpError

RUNS = [
    dict(amplitude=0.12, variant="full", T=17.2),
    dict(amplitude=0.07, variant="full", T=19.2),
    dict(amplitude=0.12, variant="simplified", T=17.2),
]

for spec in RUNS:
    t0 = time.time()
    print(f"=== A={spec['amplitude']} {spec['variant']} T={spec['T']} ===",
          flush=True)
    try:
        system, gauges, cons, y = shoal_run(
            spec["amplitude"], variant=spec["variant"],
            nx=467, ny=8, dt=2e-3, T=spec["T"], r=2, p=3,
            shore_dx=0.02, shore_from=10.0)
    except BlowUpError as exc:
        print(f"BLOWUP: {exc} [{time.time()-t0:.0f}s]", flush=True)
        continue
    print(f"cells: {system.mesh.num_cells}", flush=True)
    dE = cons.energy / cons.energy[0] - 1.0
    dM = cons.mass / cons.mass[0] - 1.0
    for tq in np.arange(2.0, spec["T"] + 1e-9, 1.0):
        k = np.searchsorted(cons.times, tq - 1e-9)
        if k >= len(cons.times):
            break
        print(f"t={cons.times[k]:6.2f} dE/E0={dE[k]:+.3e} "
              f"dM/M0={dM[k]:+.3e}", flush=True)
    print(f"max|dE/E0|={np.max(np.abs(dE)):.3e} "
          f"max|dM/M0|={np.max(np.abs(dM)):.3e}")
    for gi in range(gauges.values.shape[1]):
        k = int(np.argmax(gauges.values[:, gi]))
        print(f"gauge{gi+1} peak={gauges.values[k, gi]:.5f} "
              f"at t={gauges.times[k]:.3f}")
    print(f"[{time.time()-t0:.0f}s]", flush=True)
