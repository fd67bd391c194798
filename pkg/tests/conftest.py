from __future__ import annotations

import hashlib
import shutil
from pathlib import Path

import pytest

from ueber.model import CollectedModel, SourcedDecl, decl_from_term
from ueber.terms import read_term

PROJECT_ROOT = Path(__file__).resolve().parent.parent
FIXTURE = PROJECT_ROOT / "fixtures" / "yas-mini"
PLUGINS = PROJECT_ROOT / "plugins"


@pytest.fixture
def fixture_copy(tmp_path: Path) -> Path:
    """A throwaway copy of the sample repository, safe to mutate."""
    dest = tmp_path / "yas-mini"
    shutil.copytree(FIXTURE, dest)
    return dest


def decl(text: str):
    """Parse one declaration term (paths left as written)."""
    return decl_from_term(read_term(text))


def model_of(*decl_texts: str, root: Path = Path("/nonexistent")) -> CollectedModel:
    """An in-memory model straight from declaration syntax."""
    decls = tuple(SourcedDecl(decl(t), "test/.ueber", i + 1)
                  for i, t in enumerate(decl_texts))
    return CollectedModel(decls, root)


def write_repo(root: Path, files: dict) -> Path:
    """Materialize {relative path: text} as a repository tree."""
    for rel, text in files.items():
        p = root / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")
    return root


def tree_hash(root: Path) -> str:
    """Order-independent digest of every file path and its bytes."""
    h = hashlib.sha256()
    for p in sorted(root.rglob("*")):
        if p.is_file():
            h.update(p.relative_to(root).as_posix().encode())
            h.update(b"\0")
            h.update(p.read_bytes())
            h.update(b"\0")
    return h.hexdigest()
