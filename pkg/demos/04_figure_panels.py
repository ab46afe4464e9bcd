"""Produce the six-panel Dirichlet gallery as machine-readable files.

Each panel is a Dirichlet on three labels; the output directory receives a
density grid CSV per panel (201 barycentric lattice points per edge) plus a
summary of the normalized uncertainty values. Point any plotting tool at
the CSVs; this repository deliberately emits data only.
"""
import csv
import sys
from pathlib import Path

from souq.cli import DEFAULT_PANELS, SPREAD_PAIR, main

out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("figure_out")
code = main(["figure", "--seed", "20240601", "--samples", "50000", "--out", str(out_dir)])
assert code == 0, f"figure command failed with exit code {code}"

print(f"panel definitions: {dict(DEFAULT_PANELS)}")
print(f"wrote {sorted(p.name for p in out_dir.iterdir())}\n")

with open(out_dir / "panels_summary.csv") as fh:
    rows = list(csv.DictReader(fh))

print(f"{'panel':<7}{'alpha':<22}{'TU':>8}{'AU':>8}{'EU':>8}")
for row in rows:
    print(f"{row['panel']:<7}{row['alpha']:<22}"
          f"{float(row['tu']):>8.3f}{float(row['au']):>8.3f}{float(row['eu']):>8.3f}")

by_panel = {r["panel"]: r for r in rows}
lo, hi = SPREAD_PAIR
print(f"\nuniform panel 'a' attains the maximal normalized TU of 1.0")
print(f"spread pair {SPREAD_PAIR}: EU rises {float(by_panel[lo]['eu']):.3f} -> "
      f"{float(by_panel[hi]['eu']):.3f} as the same-mean Dirichlet disperses")
print(f"concentrated panel 'e': all values below 0.15 "
      f"(TU {float(by_panel['e']['tu']):.3f})")
