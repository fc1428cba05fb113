"""Witness files and the catalog of combinatorial types.

A witness file is a short ``key: value`` header followed by the pencil in
the text format of :mod:`symmetroids.pencil`::

    # symmetroids witness v1
    type: 14 8
    seed: 0
    certificate_sha256: 3f1c...
    version: 0.1.0
    created: 2026-01-01T00:00:00+00:00
    pencil:
    1 1 1 0 0
    ...

Certificates are never trusted from the file; :func:`verify_catalog`
re-derives them.
"""
from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from .classify import CombType, InadmissibleType, admissible_types
from .pencil import Pencil, PencilParseError, format_pencil, parse_pencil

MAGIC = "# symmetroids witness v1"
HEADER_KEYS = ("type", "seed", "certificate_sha256", "version", "created")
INDEX_NAME = "index.txt"


class WitnessParseError(PencilParseError):
    pass


@dataclass(frozen=True)
class WitnessRecord:
    pencil: Pencil
    type: CombType
    seed: int = 0
    certificate_sha256: str = "-"
    version: str = __version__
    created: str = ""

    @classmethod
    def new(cls, pencil: Pencil, type_, seed=0, certificate_sha256="-"):
        now = datetime.now(timezone.utc).replace(microsecond=0).isoformat()
        return cls(pencil, CombType(*type_), int(seed), certificate_sha256, __version__, now)


def witness_filename(t) -> str:
    return f"type_{t[0]:02d}_{t[1]:02d}.witness"


def format_witness(rec: WitnessRecord) -> str:
    lines = [
        MAGIC,
        f"type: {rec.type.rho} {rec.type.sigma}",
        f"seed: {rec.seed}",
        f"certificate_sha256: {rec.certificate_sha256}",
        f"version: {rec.version}",
        f"created: {rec.created}",
        "pencil:",
    ]
    return "\n".join(lines) + "\n" + format_pencil(rec.pencil)


def parse_witness(text: str) -> WitnessRecord:
    lines = text.splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise WitnessParseError("missing witness header", 1, 1)
    values = {}
    body_start = None
    for lineno, line in enumerate(lines[1:], start=2):
        if line.strip() == "pencil:":
            body_start = lineno + 1
            break
        key, sep, value = line.partition(":")
        if not sep:
            raise WitnessParseError(f"expected 'key: value', got {line!r}", lineno, 1)
        key = key.strip()
        if key not in HEADER_KEYS:
            raise WitnessParseError(f"unknown header key {key!r}", lineno, 1)
        values[key] = (value.strip(), lineno, len(key) + 3)
    if body_start is None:
        raise WitnessParseError("missing 'pencil:' section", len(lines) + 1, 1)
    missing = [k for k in HEADER_KEYS if k not in values]
    if missing:
        raise WitnessParseError(f"missing header keys: {', '.join(missing)}", body_start - 1, 1)
    tval, tline, tcol = values["type"]
    try:
        rho, sigma = (int(v) for v in tval.split())
    except ValueError:
        raise WitnessParseError(f"bad type {tval!r}", tline, tcol) from None
    sval, sline, scol = values["seed"]
    try:
        seed = int(sval)
    except ValueError:
        raise WitnessParseError(f"bad seed {sval!r}", sline, scol) from None
    body = "\n".join(lines[body_start - 1:])
    pencil = parse_pencil(body, first_line=body_start)
    return WitnessRecord(pencil, CombType(rho, sigma), seed, values["certificate_sha256"][0],
                         values["version"][0], values["created"][0])


def save_witness(path, rec: WitnessRecord) -> None:
    Path(path).write_text(format_witness(rec))


def load_witness(path) -> WitnessRecord:
    return parse_witness(Path(path).read_text())


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


# -- catalog --------------------------------------------------------------------

@dataclass
class Catalog:
    """Map from combinatorial type to witness; keys are always admissible for n = 5."""

    entries: Dict[CombType, WitnessRecord] = field(default_factory=dict)

    def add(self, rec: WitnessRecord) -> None:
        if rec.type not in admissible_types(5):
            raise InadmissibleType(f"type {rec.type} is not admissible for quintic symmetroids")
        self.entries[rec.type] = rec

    def __len__(self):
        return len(self.entries)

    def __contains__(self, t):
        return CombType(*t) in self.entries

    def missing(self) -> List[CombType]:
        return sorted(admissible_types(5) - set(self.entries))

    def save(self, directory) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        index = []
        for t in sorted(self.entries):
            text = format_witness(self.entries[t])
            (d / witness_filename(t)).write_text(text)
            index.append(f"{t.rho} {t.sigma} {witness_filename(t)} {digest(text)}")
        (d / INDEX_NAME).write_text("\n".join(index) + ("\n" if index else ""))

    @classmethod
    def load(cls, directory) -> "Catalog":
        cat = cls()
        d = Path(directory)
        if not d.is_dir():
            return cat
        for name in sorted(os.listdir(d)):
            if name.startswith("type_") and name.endswith(".witness"):
                cat.add(load_witness(d / name))
        return cat


@dataclass(frozen=True)
class CatalogReport:
    passed: tuple
    failed: tuple  # (type, reason)
    missing: tuple

    def summary(self) -> str:
        return f"{len(self.passed)} passed, {len(self.failed)} failed, {len(self.missing)} missing"

    def lines(self):
        out = [f"{t.rho} {t.sigma} pass" for t in self.passed]
        out += [f"{t.rho} {t.sigma} FAIL {reason}" for t, reason in self.failed]
        out += [f"{t.rho} {t.sigma} missing" for t in self.missing]
        return sorted(out, key=lambda s: tuple(int(v) for v in s.split()[:2]))


def verify_catalog(catalog: Catalog, certify=None) -> CatalogReport:
    """Re-certify every witness and report coverage of the 65 admissible types.

    ``certify(pencil, seed)`` must return a certification with ``.type`` and
    ``.reason``; the default runs the full solve and Krawczyk pipeline.
    The catalog is not modified.
    """
    if certify is None:
        from .certify import certify_pencil as certify
    passed, failed = [], []
    for t in sorted(catalog.entries):
        rec = catalog.entries[t]
        try:
            result = certify(rec.pencil, rec.seed)
        except Exception as exc:  # reported, not raised
            failed.append((t, f"error: {exc}"))
            continue
        if result.type == t:
            passed.append(t)
        elif result.type is None:
            failed.append((t, f"Unsuccessful ({result.reason})"))
        else:
            failed.append((t, f"certified {result.type}"))
    return CatalogReport(tuple(passed), tuple(failed), tuple(catalog.missing()))
