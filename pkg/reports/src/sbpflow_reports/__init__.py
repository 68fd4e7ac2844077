"""Report generation over solver run directories.

Consumes only the documented run-directory files (timeseries.csv and
report.txt) and renders figures plus markdown summaries from them. Never
imports the solver; the file contracts are the whole interface.
"""

from .budget import plot_energy_budget
from .cli import ReportSpec, generate, main
from .convergence import (convergence_markdown, convergence_table,
                          write_convergence_report)
from .readers import ReportError, load_run, read_report, read_timeseries

__version__ = "0.1.0"

__all__ = [
    "plot_energy_budget",
    "ReportSpec", "generate", "main",
    "convergence_markdown", "convergence_table", "write_convergence_report",
    "ReportError", "load_run", "read_report", "read_timeseries",
    "__version__",
]
