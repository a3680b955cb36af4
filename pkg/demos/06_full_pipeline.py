"""Drive the whole pipeline from one config dict, as the CLI does.

Equivalent to:  netsom run config.json -o demos/output/report
Every stage writes its artifact plus a .meta.json with content hashes, so
each figure in the report audits back to the exact graph that produced it.

Run:  python3 demos/06_full_pipeline.py
"""

import json
import pathlib

from netsom import full_run

OUT = pathlib.Path(__file__).parent / "output" / "report"

config = {
    "seed": 7,
    "generate": {"model": "cnn", "n": 2000},
    "som": {"width": 5, "height": 5},
    "sir": {"lambda": 0.2, "mu": 1.0, "dt": 0.01, "initial": 10},
    "spd": {"T": 1.5, "eps": 0.0},
}

summary = full_run(config, OUT)

print("\nsummary:")
print(json.dumps({k: v for k, v in summary.items() if k != "config"},
                 indent=2, sort_keys=True))
print(f"\nreport directory: {OUT}")
for p in sorted(OUT.iterdir()):
    print(f"  {p.name}")
