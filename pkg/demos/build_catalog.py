"""Grow a witness catalog by chained single-step climbs from known witnesses.

Starts from the certified family fixtures, then repeatedly climbs from the
nearest catalogued type to a missing neighbour.  Long running; progress is
saved after every success, so it can be interrupted and resumed.

    python3 demos/build_catalog.py catalog/ [--budget 50]
"""
import argparse

from symmetroids.certify import certify_pencil
from symmetroids.classify import admissible_types
from symmetroids.families import FIXTURES, family_pencil
from symmetroids.hillclimb import ClimbOptions, climb, lattice_distance
from symmetroids.witness import Catalog, WitnessRecord, verify_catalog


def seed_catalog(cat):
    for name, spec in sorted(FIXTURES.items()):
        if name == "degenerate":
            continue
        P = family_pencil(*spec)
        cert = certify_pencil(P, seed=0)
        if cert.successful and cert.type in admissible_types(5) and cert.type not in cat:
            cat.add(WitnessRecord.new(P, cert.type, cert.seed))
            print(f"fixture {name}: {cert.type}")


def next_job(cat, failed):
    best = None
    for target in cat.missing():
        if target in failed:
            continue
        for have in cat.entries:
            dist = lattice_distance(have, target)
            if best is None or dist < best[0]:
                best = (dist, have, target)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("directory")
    ap.add_argument("--budget", type=int, default=50, help="maximum number of climbs")
    args = ap.parse_args()
    cat = Catalog.load(args.directory)
    if not len(cat):
        seed_catalog(cat)
        cat.save(args.directory)
    failed = set()
    for attempt in range(args.budget):
        job = next_job(cat, failed)
        if job is None:
            break
        dist, have, target = job
        res = climb(cat.entries[have].pencil, target, ClimbOptions(), seed=attempt)
        print(f"climb {have} -> {target} (distance {dist}): {'ok' if res.success else res.reason}")
        if res.success:
            cat.add(WitnessRecord.new(res.pencil, target, res.certification.seed))
            cat.save(args.directory)
        else:
            failed.add(target)
    print(verify_catalog(cat).summary())


if __name__ == "__main__":
    main()
