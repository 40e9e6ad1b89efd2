"""Run summaries and output files."""

import json
import os

import numpy as np

SCHEMA_PATH = os.path.join(
    os.path.dirname(os.path.realpath(__file__)), "schemas", "run_report.schema.json"
)
CSV_FORMAT = "%.17g"


class RunReport:
    """Summary of a scenario run.

    Attributes:
        name (str): Scenario name.
        peaks (list[float]): Maximum population per level.
        troughs (list[float]): Minimum population per level.
        max_leakage (float): Largest population outside the N lowest levels.
        fidelity (dict or None): ``{"min", "mean", "max"}`` of the target fidelity.
        wall_clock_seconds (float): Run time.
        damping (dict or None): Comparison of a dissipative run with its
            undamped baseline.
        verification (dict or None): Closed-form verification results.
    """

    def __init__(
        # pylint: disable=C0330
        self,
        name,
        peaks,
        troughs,
        max_leakage,
        fidelity=None,
        wall_clock_seconds=0.0,
        damping=None,
        verification=None,
    ):
        """Initializes RunReport object."""
        self.name = name
        self.peaks = [float(p) for p in peaks]
        self.troughs = [float(t) for t in troughs]
        self.max_leakage = float(max_leakage)
        self.fidelity = fidelity
        self.wall_clock_seconds = float(wall_clock_seconds)
        self.damping = damping
        self.verification = verification
        self.check()

    @classmethod
    def from_result(cls, name, result, order, wall_clock_seconds, damping=None):
        """Summarizes a SimulationResult.

        Args:
            name (str): Scenario name.
            result (SimulationResult): Engine output.
            order (int): Kerr order N; levels >= N count as leakage.
            wall_clock_seconds (float): Run time.
            damping (dict): Optional dissipative summary.

        Returns:
            RunReport
        """
        fidelity = None
        if result.fidelity_vs_target is not None:
            values = result.fidelity_vs_target
            fidelity = {
                "min": float(values.min()),
                "mean": float(values.mean()),
                "max": float(values.max()),
            }
        return cls(
            name,
            result.peaks(),
            result.troughs(),
            result.leakage(order).max(),
            fidelity=fidelity,
            wall_clock_seconds=wall_clock_seconds,
            damping=damping,
        )

    @property
    def passed(self):
        """Verification verdict; True for reports without a verification section."""
        return self.verification is None or self.verification["passed"]

    def check(self):
        """Raises ValueError if peaks fall below troughs or fidelities leave [0, 1]."""
        if len(self.peaks) != len(self.troughs):
            raise ValueError("Peaks and troughs cover a different number of levels.")
        if any(p < t for p, t in zip(self.peaks, self.troughs)):
            raise ValueError("A peak lies below its trough.")
        if self.fidelity is not None:
            for key in ("min", "mean", "max"):
                if not 0.0 <= self.fidelity[key] <= 1.0:
                    raise ValueError("Fidelity %s = %r outside [0, 1]." % (key, self.fidelity[key]))

    def to_dict(self):
        """JSON-compatible representation."""
        output = {
            "name": self.name,
            "peaks": self.peaks,
            "troughs": self.troughs,
            "max_leakage": self.max_leakage,
            "fidelity": self.fidelity,
            "wall_clock_seconds": self.wall_clock_seconds,
        }
        if self.damping is not None:
            output["damping"] = self.damping
        if self.verification is not None:
            output["verification"] = self.verification
        return output

    def to_json(self, path):
        """Writes the report to `path`."""
        with open(path, "w", newline="\n") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")


def csv_header(result):
    """Column names ``t, P_0, ..., P_{dim-1}`` and ``fidelity`` when present."""
    columns = ["t"] + ["P_%d" % n for n in range(result.dim)]
    if result.fidelity_vs_target is not None:
        columns.append("fidelity")
    return columns


def write_csv(result, path):
    """Writes a SimulationResult as CSV with 17 significant digits and LF endings."""
    columns = [result.times[:, None], result.probs]
    if result.fidelity_vs_target is not None:
        columns.append(result.fidelity_vs_target[:, None])
    with open(path, "w", newline="") as f:
        np.savetxt(
            f,
            np.hstack(columns),
            fmt=CSV_FORMAT,
            delimiter=",",
            newline="\n",
            header=",".join(csv_header(result)),
            comments="",
        )


def load_schema():
    """Returns the JSON schema of the run report."""
    with open(SCHEMA_PATH) as f:
        return json.load(f)
