"""Run the exhaustive ladder sweep and a seeded random sweep, printing both reports."""

import argparse
import time

from dframes.search import SearchConfig, run_search


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-b", type=int, default=2)
    ap.add_argument("--max-rel", type=int, default=2)
    ap.add_argument("--samples", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    for mode, max_b in (("exhaustive", args.max_b), ("random", max(args.max_b, 4))):
        start = time.perf_counter()
        result = run_search(SearchConfig(max_b=max_b, max_rel=args.max_rel, mode=mode,
                                         samples=args.samples, seed=args.seed, workers=args.workers))
        print(result.render(), end="")
        print(f"elapsed {time.perf_counter() - start:.2f}s\n")


if __name__ == "__main__":
    main()
