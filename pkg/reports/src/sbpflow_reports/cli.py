"""Command line entry point: report <run-dir>... [--convergence].

Default mode writes energy/budget/constraint figures plus a markdown
summary into report/ inside each run directory. Convergence mode treats
the run directories as one nested-resolution series and writes the table
and log-log plot into report/ inside the first directory.
"""

import argparse
import sys
from dataclasses import dataclass, field

from .budget import plot_energy_budget
from .convergence import write_convergence_report
from .readers import ReportError


@dataclass
class ReportSpec:
    """What to generate: input runs, mode, and per-figure selection."""
    run_dirs: list = field(default_factory=list)
    convergence: bool = False
    energy: bool = True
    budget: bool = True
    constraint: bool = True


def build_parser():
    parser = argparse.ArgumentParser(
        prog="report",
        description="Generate figures and summaries from solver run "
                    "directories.")
    parser.add_argument("run_dirs", nargs="+", metavar="run-dir",
                        help="run directory containing timeseries.csv and "
                             "report.txt")
    parser.add_argument("--convergence", action="store_true",
                        help="treat the run directories as a nested-grid "
                             "series and produce an error-vs-h table")
    parser.add_argument("--no-energy", action="store_true",
                        help="skip the E(t) figure")
    parser.add_argument("--no-budget", action="store_true",
                        help="skip the budget-terms figure")
    parser.add_argument("--no-constraint", action="store_true",
                        help="skip the constraint-norm figure")
    return parser


def spec_from_args(args):
    return ReportSpec(run_dirs=list(args.run_dirs),
                      convergence=args.convergence,
                      energy=not args.no_energy,
                      budget=not args.no_budget,
                      constraint=not args.no_constraint)


def generate(spec):
    """Run the requested report, returning all paths written."""
    written = []
    if spec.convergence:
        written.extend(write_convergence_report(spec.run_dirs))
    else:
        for run_dir in spec.run_dirs:
            written.extend(plot_energy_budget(
                run_dir, energy=spec.energy, budget=spec.budget,
                constraint=spec.constraint))
    return written


def main(argv=None):
    args = build_parser().parse_args(argv)
    spec = spec_from_args(args)
    try:
        written = generate(spec)
    except ReportError as exc:
        print(f"report: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
