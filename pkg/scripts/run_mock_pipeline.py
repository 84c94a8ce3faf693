#!/usr/bin/env python3
"""Run the full mock pipeline end to end into a scratch directory.

Usage: python3 scripts/run_mock_pipeline.py [outdir] [--seed N]

Generates a small dataset, elaborates it with every strategy against the
deterministic mock backend, scores answers, and writes the analysis
reports. Useful as a smoke test and as a template for real-backend runs
(point --backend / CHAINRULER_BACKEND_URL at a bridge server instead).
"""

import argparse
import sys
from pathlib import Path

from chainruler.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("outdir", nargs="?", default="mock_run")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--per-cell", type=int, default=5)
    parser.add_argument("--backend", default="mock")
    args = parser.parse_args()

    root = Path(args.outdir)
    root.mkdir(parents=True, exist_ok=True)
    dataset = root / "items.jsonl"
    elab = root / "elaborations.jsonl"
    pred = root / "predictions.jsonl"

    stages = [
        ["gen", "--depth", "1..5", "--breadth", "0..5",
         "--per-cell", str(args.per_cell), "--seed", str(args.seed),
         "-o", str(dataset)],
        ["elaborate", "--dataset", str(dataset), "--backend", args.backend,
         "--seed", str(args.seed), "-o", str(elab)],
        ["predict", "--dataset", str(dataset), "--elaborations", str(elab),
         "--backend", args.backend, "-o", str(pred)],
        ["analyze", "--dataset", str(dataset), "--elaborations", str(elab),
         "--predictions", str(pred), "--outdir", str(root / "reports")],
    ]
    for stage in stages:
        rc = cli_main(stage)
        if rc != 0:
            print(f"stage {stage[0]} failed with exit code {rc}", file=sys.stderr)
            return rc
    print(f"pipeline complete; see {root / 'reports'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
