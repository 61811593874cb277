"""Shipped problem-spec fixtures.

One spec file per dataset/learner combination, plus the hand-written
married demo, under cfgs/fixtures/.  A checksum manifest guards against
silent edits; load_fixtures() verifies it and returns the six dataset
specs in their canonical (FOLD-SE) form.
"""

from __future__ import annotations

import hashlib
from importlib import resources
from pathlib import Path

from .errors import FixtureCorrupt
from .specfile import SpecDocument, loads_document

__all__ = ["fixture_dir", "fixture_ids", "fixture_path", "load_fixture",
           "load_fixtures", "verify_checksums", "DATASET_FIXTURES"]

# Canonical fixture per dataset; the ripper variants ship alongside.
DATASET_FIXTURES = (
    "adult_foldse", "cars_foldse", "titanic_foldse",
    "dropout_foldse", "mushroom_foldse", "voting_foldse",
)

_CHECKSUM_FILE = "CHECKSUMS.sha256"


def fixture_dir() -> Path:
    return Path(resources.files("cfgs") / "fixtures")


def fixture_ids() -> list:
    return sorted(p.stem for p in fixture_dir().glob("*.spec"))


def fixture_path(spec_id: str) -> Path:
    p = fixture_dir() / f"{spec_id}.spec"
    if not p.exists():
        raise FileNotFoundError(f"no fixture named {spec_id!r}")
    return p


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def verify_checksums(directory: Path = None):
    directory = directory or fixture_dir()
    manifest = directory / _CHECKSUM_FILE
    if not manifest.exists():
        raise FixtureCorrupt(manifest, "checksum manifest missing")
    recorded = {}
    for line in manifest.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        digest, name = line.split(None, 1)
        recorded[name.strip()] = digest
    for p in sorted(directory.glob("*.spec")):
        want = recorded.get(p.name)
        if want is None:
            raise FixtureCorrupt(p, "not listed in the checksum manifest")
        if _sha256(p) != want:
            raise FixtureCorrupt(p)


def load_fixture(spec_id: str, verify: bool = True) -> SpecDocument:
    if verify:
        verify_checksums()
    p = fixture_path(spec_id)
    return loads_document(p.read_text(encoding="utf-8"), spec_id)


def load_fixtures(verify: bool = True) -> list:
    """The six dataset fixtures (FOLD-SE rule sets), checksum-verified."""
    if verify:
        verify_checksums()
    return [load_fixture(spec_id, verify=False) for spec_id in DATASET_FIXTURES]
