"""One hill-climb step from the prismatic (1, 1) pencil, with a JSONL transcript.

    python3 demos/single_climb.py [RHO SIGMA] [--seed N]
"""
import argparse

from symmetroids.families import load_fixture
from symmetroids.hillclimb import ClimbOptions, Transcript, climb
from symmetroids.pencil import format_pencil


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("target", nargs="*", type=int, default=[16, 10])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--transcript", default="climb.jsonl")
    args = ap.parse_args()
    start = load_fixture("prismatic_14_8")
    log = Transcript(args.transcript)
    res = climb(start, tuple(args.target), ClimbOptions(), seed=args.seed, transcript=log)
    print(f"success={res.success} type={res.type} best={res.best_type} "
          f"iterations={res.iterations} restarts={res.restarts} reason={res.reason or '-'}")
    print(f"{len(log.records)} transcript records written to {args.transcript}")
    if res.success:
        print(format_pencil(res.pencil.rounded()))


if __name__ == "__main__":
    main()
