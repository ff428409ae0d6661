# Averaged E_k^2 over random 4x4 ensembles, positive-definite and general
# symmetric.  The CSV written here has one column per algorithm and can be
# plotted with any tool (log scale on the y axis).
#
# Desk-scale: 1,000 matrices per class.  Raise COUNT to 10_000 / 25_000 for
# the full-size experiment; the run time grows linearly.

from pathlib import Path

from permqr import EnsembleConfig, run_ensemble
from permqr.ensemble import speedup_ratio
from permqr.fileio import format_report

COUNT = 1000
OUT = Path(__file__).with_name("out")
OUT.mkdir(exist_ok=True)

for cls in ("pd", "sym"):
    report = run_ensemble(EnsembleConfig(order=4, count=COUNT, iterations=50, matrix_class=cls, seed=2024))
    path = OUT / f"ensemble_{cls}.csv"
    path.write_text(format_report(report))
    print(f"\n== {cls}: {report.included} matrices, written to {path}")
    for k in (0, 5, 10, 25, 50):
        print(f"k={k:>2}  " + "  ".join(f"{lab} {report.means[lab][k]:.2e}" for lab in report.labels))
    for lab in ("DO", "CO"):
        print(f"{lab}: reaches QR's k=50 error after {speedup_ratio(report, lab)} of the iterations")
