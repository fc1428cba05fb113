"""Certify the symmetric family fixtures and compare with the listed types.

    python3 demos/families_tour.py
"""
import time

from symmetroids.certify import certify_pencil
from symmetroids.families import PRISMATIC_TABLE, prismatic_pencil, tetrahedral_pencil, tetrahedral_region


def main():
    print("tetrahedral family")
    for t in (60, 24, 6, -1, -3):
        t0 = time.perf_counter()
        cert = certify_pencil(tetrahedral_pencil(t), seed=0)
        listed = tetrahedral_region(t).type
        print(f"  t={t:>3}: certified {cert.type}, listed {listed} ({time.perf_counter() - t0:.1f} s)")
    print("prismatic family")
    for row in PRISMATIC_TABLE:
        t0 = time.perf_counter()
        cert = certify_pencil(prismatic_pencil(row.a, row.b), seed=0)
        mark = "" if cert.type == row.type else "   <- differs"
        print(f"  a={str(row.a):>4} b={str(row.b):>4}: certified {cert.type}, listed {row.type}"
              f" ({time.perf_counter() - t0:.1f} s){mark}")


if __name__ == "__main__":
    main()
