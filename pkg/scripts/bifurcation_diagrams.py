"""Branch tables for the four normal forms and Hopf radius measurements."""

import argparse
import math
from pathlib import Path

from seirlab.bifurcation import FormKind, NormalForm, hopf_limit_cycle_check, sweep_diagram
from seirlab.csvio import CsvTable, write_csv_file


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="bifurcation")
    parser.add_argument("--n", type=int, default=201)
    args = parser.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    for kind in FormKind:
        points = sweep_diagram(NormalForm(kind), -1.0, 1.0, args.n)
        path = outdir / f"{kind.value}.csv"
        write_csv_file(CsvTable(("param", "x", "stability"), [[p.param, p.x, p.stability] for p in points]), path)
        print(f"wrote {path} ({len(points)} branch points)")

    rows = []
    for a in (0.25, 1.0):
        for start in (0.5 * math.sqrt(a), 2.0 * math.sqrt(a)):
            rep = hopf_limit_cycle_check(a, start)
            rows.append([a, start, rep.predicted_radius, rep.observed_radius, rep.period_observed])
            print(f"a={a}: start r={start:.3f} -> radius {rep.observed_radius:.6f}, period {rep.period_observed:.5f}")
    path = outdir / "hopf_cycles.csv"
    write_csv_file(CsvTable(("a", "initial_r", "sqrt_a", "radius", "period"), rows), path)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
