"""Re-inject an eliminated strain and compare the two episode lengths.

Usage: python scripts/memory_recall.py [--seeds 20] [--delay 100] [--no-memory]
"""
import argparse

from netimmune import experiments as ex
from netimmune.engine import run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=len(ex.SEEDS))
    ap.add_argument("--delay", type=int, default=100)
    ap.add_argument("--no-memory", action="store_true", help="disable memory promotion (control arm)")
    args = ap.parse_args()

    faster = 0
    for s in range(args.seeds):
        cfg = ex.recall(**{"run.reinject_after": args.delay, "run.seed": s,
                           "defense.memory.enabled": not args.no_memory})
        ep = ex.episode_lengths(run(cfg))
        if ep is None:
            print(f"seed {s:>2}: an episode did not end")
            continue
        faster += ep[1] < ep[0]
        print(f"seed {s:>2}: first {ep[0]:>3} steps, second {ep[1]:>3} steps", flush=True)
    print(f"second episode shorter in {faster}/{args.seeds}")


if __name__ == "__main__":
    main()
