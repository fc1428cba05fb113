from types import SimpleNamespace

import pytest

from symmetroids.classify import CombType, InadmissibleType
from symmetroids.pencil import PencilParseError
from symmetroids.witness import (Catalog, WitnessParseError, WitnessRecord, format_witness, load_witness,
                                 parse_witness, save_witness, verify_catalog, witness_filename)

from conftest import random_pencil


def _record(t=(14, 8), seed=3):
    return WitnessRecord(random_pencil(1).rounded(), CombType(*t), seed, "ab" * 32, "0.1.0", "2026-01-01T00:00:00+00:00")


def test_roundtrip(tmp_path):
    rec = _record()
    assert parse_witness(format_witness(rec)) == rec
    path = tmp_path / witness_filename(rec.type)
    save_witness(path, rec)
    assert load_witness(path) == rec
    assert path.name == "type_14_08.witness"


def test_parse_errors_have_positions():
    lines = format_witness(_record()).splitlines()
    with pytest.raises(WitnessParseError, match="header"):
        parse_witness("\n".join(lines[1:]))
    bad = list(lines)
    bad[1] = "type: fourteen 8"
    with pytest.raises(WitnessParseError) as err:
        parse_witness("\n".join(bad))
    assert err.value.line == 2
    bad = list(lines)
    bad[2] = "colour: blue"
    with pytest.raises(WitnessParseError, match="unknown header key"):
        parse_witness("\n".join(bad))
    bad = list(lines)
    bad[9] = "1 2 x"
    with pytest.raises(PencilParseError) as err:
        parse_witness("\n".join(bad))
    assert err.value.line == 10


def test_catalog_rejects_inadmissible():
    cat = Catalog()
    with pytest.raises(InadmissibleType):
        cat.add(_record((0, 0)))
    with pytest.raises(InadmissibleType):
        cat.add(_record((6, 8)))


def test_catalog_save_load_and_missing(tmp_path):
    cat = Catalog()
    cat.add(_record((14, 8)))
    cat.add(_record((2, 0)))
    cat.save(tmp_path)
    again = Catalog.load(tmp_path)
    assert set(again.entries) == {(14, 8), (2, 0)}
    assert len(again.missing()) == 63
    index = (tmp_path / "index.txt").read_text().splitlines()
    assert len(index) == 2 and index[0].startswith("2 0 type_02_00.witness")
    assert len(Catalog.load(tmp_path / "nope").missing()) == 65


def test_verify_catalog_reports_each_outcome():
    cat = Catalog()
    for t in [(14, 8), (2, 0), (4, 2)]:
        cat.add(_record(t))

    def fake(pencil, seed):
        t = [k for k, r in cat.entries.items() if r.pencil is pencil][0]
        if t == (14, 8):
            return SimpleNamespace(type=CombType(14, 8), reason="")
        if t == (2, 0):
            return SimpleNamespace(type=None, reason="path failure")
        raise RuntimeError("boom")

    # records share one pencil object; give each its own
    for t, r in list(cat.entries.items()):
        cat.entries[t] = WitnessRecord(random_pencil(sum(t)).rounded(), r.type, r.seed, r.certificate_sha256,
                                       r.version, r.created)
    rep = verify_catalog(cat, certify=fake)
    assert rep.passed == ((14, 8),)
    assert dict(rep.failed)[(2, 0)].startswith("Unsuccessful")
    assert "boom" in dict(rep.failed)[(4, 2)]
    assert rep.summary() == "1 passed, 2 failed, 62 missing"
    assert len(rep.lines()) == 65
