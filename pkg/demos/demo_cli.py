"""
Driving the command line
========================

Emit an atlas, check it, and read the structured report.
"""

import json
import tempfile
from pathlib import Path

from formalnbhd.cli import run

with tempfile.TemporaryDirectory() as tmp:
    path = str(Path(tmp) / "conic.json")
    run(["gallery", "emit", "conic-P2", "--out", path])
    report, status, text = run(["check", "--atlas", path, "--condition", "split"])
    print(text, "exit status", status)

    report, status, text = run(["criteria", "--atlas", path, "--max-k", "2", "--format", "structured"])
    print(json.loads(text)["criteria"]["summary"], "exit status", status)
