"""On-disk cache of tree enumerations, keyed by colour word, degree and format version."""

from __future__ import annotations

import json
import logging
import os
from pathlib import Path

from .core import PaintedSet
from .trees import PaintedTree, check_tree, enumerate_stable_trees

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
ENV_VAR = "PAINTED_MODULI_CACHE"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "painted_moduli"


def cache_path(cache_dir: Path, word: str, d: int) -> Path:
    return Path(cache_dir) / f"trees-{word}-d{d}.json"


def _load(path: Path, word: str, d: int) -> list[list[int]] | None:
    try:
        doc = json.loads(path.read_text())
    except (OSError, ValueError):
        return None
    if not isinstance(doc, dict) or doc.get("version") != FORMAT_VERSION:
        return None
    if doc.get("word") != word or doc.get("d") != d:
        return None
    trees = doc.get("trees")
    if not isinstance(trees, list) or not all(
            isinstance(t, list) and all(isinstance(m, int) for m in t) for t in trees):
        return None
    return trees


def cache_enumeration(S: PaintedSet, d: int, cache_dir: Path | str | None = None,
                      use_cache: bool = True) -> list[PaintedTree]:
    """Stable trees with d edges, read from or written to the cache.

    Tree shapes depend only on the colour word, so label names are reattached
    on load.  Unreadable, stale or mismatched files are recomputed and overwritten.
    """
    if not use_cache:
        return enumerate_stable_trees(S, d)
    cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    path = cache_path(cache_dir, S.word, d)
    stored = _load(path, S.word, d) if path.exists() else None
    if stored is not None:
        try:
            return [check_tree(S, t) for t in stored]
        except ValueError:
            log.warning("cache file %s holds an invalid tree; recomputing", path)
    trees = enumerate_stable_trees(S, d)
    doc = {"version": FORMAT_VERSION, "word": S.word, "d": d,
           "trees": [sorted(t.splits) for t in trees]}
    try:
        cache_dir.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc))
        tmp.replace(path)
    except OSError as exc:
        log.warning("cannot write cache file %s: %s", path, exc)
    return trees
