"""Python bindings for the rgcn random-graph GCN toolkit."""

import csv
import io

from ._core import (
    CapacityError,
    NumericalPreconditionError,
    describe_config,
    forward,
    forward_edges,
    model_fixtures,
    mse_sigma_exact,
    run_config,
    sample_graph,
    scenario_names,
    wasserstein2,
)

__all__ = [
    "CapacityError",
    "NumericalPreconditionError",
    "describe_config",
    "forward",
    "forward_edges",
    "model_fixtures",
    "mse_sigma_exact",
    "read_results",
    "run_config",
    "sample_graph",
    "scenario_names",
    "wasserstein2",
]


def read_results(text):
    """Parse a results CSV (schema line first) into a list of dicts."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != "# rgcn-results v1":
        raise ValueError("missing results schema line")
    rows = []
    for row in csv.DictReader(io.StringIO("\n".join(lines[1:]))):
        row["n"] = int(row["n"])
        row["seed"] = int(row["seed"])
        for key in ("alpha", "amplitude", "value", "wall_ms"):
            row[key] = float(row[key])
        row["envelope"] = float(row["envelope"]) if row["envelope"] else None
        rows.append(row)
    return rows
