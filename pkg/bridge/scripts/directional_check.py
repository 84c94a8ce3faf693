#!/usr/bin/env python3
"""Trend checks against a bridge serving a real pretrained model.

Runs a reduced grid (depth <= 3, configurable items per cell) through the
task toolkit with the bridge as backend and reports two directional
expectations:

  (a) no-elaboration accuracy decreases strictly with effective
      distraction on no-contraposition cells, and
  (b) at least one elaboration strategy improves accuracy over the
      no-elaboration baseline in cells with effective distraction >= 3.

These are trend checks only; absolute accuracies depend on the model.
Requires the bridge to be running, e.g.:

  BRIDGE_MODEL=gpt2 lm-bridge --port 8080 &
  python3 scripts/directional_check.py http://127.0.0.1:8080
"""

import argparse
import sys
from collections import defaultdict

from chainruler.backends import HttpBackend
from chainruler.elaborate import GENERATED_STRATEGIES, Strategy, elaborate_item
from chainruler.generator import GenerationSpec, generate_dataset
from chainruler.lexicon import default_lexicon
from chainruler.predict import evaluate_run, score_answers


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("url", help="bridge base URL")
    parser.add_argument("--per-cell", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--strategies", default="free,structured,recursive")
    args = parser.parse_args()

    lexicon = default_lexicon()
    backend = HttpBackend(args.url)
    strategies = [Strategy(s) for s in args.strategies.split(",")]
    assert all(s in GENERATED_STRATEGIES for s in strategies)

    spec = GenerationSpec(depth_range=(1, 3), breadth_range=(0, 5),
                          contraposition="only-false",
                          items_per_cell=args.per_cell, seed=args.seed)
    items = generate_dataset(spec, lexicon)
    print(f"scoring {len(items)} items x {1 + len(strategies)} strategies")

    predictions = []
    for item in items:
        predictions.append(score_answers(item, None, backend))
        for strategy in strategies:
            record = elaborate_item(item, strategy, backend, lexicon,
                                    seed=args.seed)
            predictions.append(score_answers(item, record, backend))
    grid = evaluate_run(predictions, items)

    # (a) accuracy vs effective distraction, no elaboration
    by_ed = defaultdict(lambda: [0, 0])
    for pred in predictions:
        if pred.strategy != Strategy.NONE or pred.skipped:
            continue
        item = next(i for i in items if i.item_id == pred.item_id)
        by_ed[item.effective_distraction][0] += 1
        by_ed[item.effective_distraction][1] += int(pred.correct)
    curve = [(ed, c / n) for ed, (n, c) in sorted(by_ed.items()) if n]
    decreasing = all(curve[i][1] > curve[i + 1][1] for i in range(len(curve) - 1))
    print("accuracy by effective distraction:",
          " ".join(f"{ed}:{acc:.3f}" for ed, acc in curve))
    print(f"(a) strictly decreasing: {'PASS' if decreasing else 'FAIL'}")

    # (b) some strategy helps in high-distraction cells
    helped = False
    for strategy in strategies:
        deltas = [delta for (ed, _), delta
                  in grid.delta_grid(strategy.value, False).items() if ed >= 3]
        if deltas:
            mean = sum(deltas) / len(deltas)
            print(f"{strategy.value}: mean delta in ED>=3 cells {mean:+.3f}")
            helped = helped or mean > 0
    print(f"(b) some strategy positive at ED>=3: {'PASS' if helped else 'FAIL'}")
    return 0 if decreasing and helped else 1


if __name__ == "__main__":
    sys.exit(main())
