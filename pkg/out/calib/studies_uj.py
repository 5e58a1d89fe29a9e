import time

from basinwaves.cli import converge_study

for (r, p, levels) in ((1, 2, 5), (2, 3, 4), (1, 1, 5), (2, 2, 5)):
    t0 = time.time()
    report = converge_study(r, p, levels=levels, out_dir="out/calib_uj",
                            verbose=True)
    print(f"degrees ({r},{p}) done in {time.time() - t0:.0f}s", flush=True)
    for attr in ("L2_eta", "H1_eta", "L2_u", "Hdiv_u", "H1_u"):
        errs = [getattr(row, attr) for row in report.rows]
        rates = report.rates(attr)
        print(f"  {attr}: errs {[f'{e:.4e}' for e in errs]} "
              f"rates {[f'{x:.3f}' for x in rates]}", flush=True)
    print(f"  trace: {[f'{row.trace_u_n:.3e}' for row in report.rows]}",
          flush=True)
