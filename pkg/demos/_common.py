"""Small helpers shared by the demo scripts."""
import csv
from pathlib import Path

OUT = Path(__file__).resolve().parent / "output"


def write_csv(name, rows):
    """Write a list of dicts to ``demos/output/<name>`` and return the path."""
    OUT.mkdir(exist_ok=True)
    path = OUT / name
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return path
