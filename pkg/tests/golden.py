"""CLI invocations whose output is pinned under tests/golden/."""
from pathlib import Path

GOLDEN_DIR = Path(__file__).parent / "golden"

COMMANDS = {
    "analyze_x2x3": ["analyze", "--config", "x2x3"],
    "analyze_ledrappier": ["analyze", "--config", "ledrappier"],
    "analyze_nonmix_csv": ["analyze", "--config", "nonmix", "--output", "csv"],
    "perpoints_x2": ["perpoints", "--config", "x2", "--radius", "4"],
    "perpoints_fibonacci": ["perpoints", "--config", "fibonacci", "--radius", "5"],
    "perpoints_x2x3": ["perpoints", "--config", "x2x3", "--radius", "3"],
    "scan_x2_I": ["scan", "--config", "x2", "--k", "1..6", "--window", "14"],
    "scan_x2_II": ["scan", "--config", "x2", "--k", "1..1", "--property", "II", "--window", "10"],
    "scan_x2x3_strong": ["scan", "--config", "x2x3", "--k", "1..1", "--property", "II-strong",
                         "--window", "12", "--output", "json"],
    "correlate_x2": ["correlate", "--config", "x2", "--functions", "x2_correlate", "--n", "1"],
    "pairing_x2_n2": ["pairing", "--config", "x2", "--functions", "x2_pairing", "--n", "2"],
    "pairing_x2_n3": ["pairing", "--config", "x2", "--functions", "x2_pairing", "--n", "3",
                      "--output", "csv"],
    "compose_sum": ["compose", "--config", "sum_x2_x3", "--k", "1..3"],
    "compose_jordan": ["compose", "--config", "jordan_x2", "--k", "1..2", "--property", "II"],
}


def run(argv):
    """Run the CLI in-process; returns (exit code, stdout, stderr)."""
    import contextlib
    import io

    from zdaction.cli import main

    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()
