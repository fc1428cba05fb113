import hashlib
from fractions import Fraction
from importlib import resources

import numpy as np
import pytest

from symmetroids.classify import classify_endpoints, comb_type
from symmetroids.families import (FIXTURES, PRISMATIC_TABLE, TETRAHEDRAL_REGIONS, degenerate_pencil, family_pencil,
                                  family_text, fixture_text, lift_trace_block, load_fixture, prismatic_orbits,
                                  prismatic_pencil, tetrahedral_orbits, tetrahedral_pencil, tetrahedral_region)
from symmetroids.linalg import sym_eigenvalues
from symmetroids.tracker import solve


def test_fixture_checksums():
    data = resources.files("symmetroids").joinpath("data")
    sums = data.joinpath("SHA256SUMS").read_text().split("\n")
    listed = {}
    for line in filter(None, sums):
        digest, name = line.split()
        listed[name] = digest
    assert set(listed) == {f"{n}.pencil" for n in FIXTURES}
    for name, digest in listed.items():
        assert hashlib.sha256(data.joinpath(name).read_bytes()).hexdigest() == digest, name


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixtures_match_constructors(name):
    assert fixture_text(name) == family_text(*FIXTURES[name])
    assert load_fixture(name).exact == family_pencil(*FIXTURES[name]).exact


def test_family_pencils_are_exact_and_symmetric():
    for P in (tetrahedral_pencil(Fraction(7, 3)), prismatic_pencil(Fraction(1, 2), 4), degenerate_pencil()):
        assert P.exact is not None
        np.testing.assert_array_equal(P.mats, np.swapaxes(P.mats, 1, 2))


def test_tetrahedral_symmetry():
    # permuting the four coordinates acts by congruence, so D is S4-invariant
    P = tetrahedral_pencil(24)
    rng = np.random.default_rng(0)
    p = rng.standard_normal(4)
    d = np.linalg.det(np.tensordot(p, P.mats, axes=1))
    for perm in ([1, 0, 2, 3], [0, 2, 3, 1], [3, 2, 1, 0]):
        q = p[perm]
        assert np.linalg.det(np.tensordot(q, P.mats, axes=1)) == pytest.approx(d, rel=1e-9)


def test_region_lookup():
    assert tetrahedral_region(60).type == (20, 8)
    assert tetrahedral_region(-1).type == (8, 0)
    with pytest.raises(ValueError):
        tetrahedral_region(12)
    assert len(TETRAHEDRAL_REGIONS) == 5
    assert len(PRISMATIC_TABLE) == 11


def test_tetrahedral_orbits_for_t6():
    P = tetrahedral_pencil(6)
    S = solve(P, seed=0)
    nodes, _ = classify_endpoints(P, S.points)
    rep = tetrahedral_orbits(nodes)
    assert rep.exact and rep.sizes == [4, 4, 12]
    assert rep.orbits == tetrahedral_region(6).orbits


def test_prismatic_orbits_partition_nodes():
    row = next(r for r in PRISMATIC_TABLE if r.type == (14, 8))
    P = prismatic_pencil(row.a, row.b)
    nodes, _ = classify_endpoints(P, solve(P, seed=0).points)
    assert comb_type(nodes) == (14, 8)
    rep = prismatic_orbits(nodes)
    assert not rep.exact
    assert rep.sizes == [2, 4, 4, 4, 6]
    assert sorted(i for m in rep.members for i in m) == list(range(20))


def test_lift_trace_block_preserves_definiteness(rng):
    M = rng.standard_normal((3, 4, 4))
    M = M @ np.swapaxes(M, 1, 2)  # positive semidefinite
    L = lift_trace_block(M)
    assert L.shape == (3, 5, 5)
    assert np.all(sym_eigenvalues(L) >= -1e-12)
    N = M.copy()
    N[0] -= 10 * np.eye(4)
    assert sym_eigenvalues(lift_trace_block(N))[0, -1] < 0


def test_family_argument_errors():
    with pytest.raises(ValueError):
        family_pencil("tetrahedral")
    with pytest.raises(ValueError):
        family_pencil("cubic", 1)
