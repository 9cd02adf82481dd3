"""Sensitivity indices of R0 at a parameter set, as CSV (one bar per parameter)."""

import argparse
from pathlib import Path

from seirlab.csvio import CsvTable, write_csv_file
from seirlab.scenario import load_scenario
from seirlab.sensitivity import parameter_names, sensitivity_analytic, sensitivity_fd

ROOT = Path(__file__).resolve().parents[1]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default=str(ROOT / "scenarios" / "table3.cfg"))
    parser.add_argument("--include-tau", action="store_true")
    parser.add_argument("--out", default="sensitivity.csv")
    args = parser.parse_args()

    params = load_scenario(args.scenario).params
    rows = []
    for name in parameter_names(args.include_tau):
        exact = sensitivity_analytic(params, name, args.include_tau).value
        fd = sensitivity_fd(params, name, include_tau=args.include_tau).value
        rows.append([name, exact, fd])
        print(f"{name:>8} {exact:+.6f} " + "#" * round(40 * abs(exact)))
    write_csv_file(CsvTable(("parameter", "index", "finite_difference"), rows), args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
