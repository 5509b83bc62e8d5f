"""Compare defense architectures on the reference scenario over paired seeds.

Prints median final prevalence, elimination counts, prevalence AUC and the
false-positive rate per architecture, and optionally writes them as JSON.

Usage: python scripts/compare_architectures.py [--seeds 20] [--arms none,endpoint,router_filter]
       [--out results/architectures.json]
"""
import argparse
import json
import statistics
from pathlib import Path

from netimmune import experiments as ex
from netimmune.engine import run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=len(ex.SEEDS))
    ap.add_argument("--arms", default="none,barrier,endpoint,router_filter,endpoint_low,endpoint_low+securityware")
    ap.add_argument("--out")
    args = ap.parse_args()

    arms = {name: ex.architecture(name) for name in args.arms.split(",")}
    table = {}
    for name, cfg in arms.items():
        res = [run(ex.with_seed(cfg, s)) for s in range(args.seeds)]
        table[name] = {
            "median_final_prevalence": statistics.median(ex.final_prevalence(r) for r in res),
            "eliminated": sum(r.summary.eliminated for r in res),
            "median_auc": statistics.median(r.summary.prevalence_auc for r in res),
            "median_fpr": statistics.median(r.summary.fpr for r in res),
        }
        row = table[name]
        print(f"{name:28s} final {row['median_final_prevalence']:>6}  eliminated {row['eliminated']:>2}/{args.seeds}"
              f"  auc {row['median_auc']:>8}  fpr {row['median_fpr']:.4f}", flush=True)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(json.dumps({"seeds": args.seeds, "arms": table}, indent=2) + "\n")


if __name__ == "__main__":
    main()
