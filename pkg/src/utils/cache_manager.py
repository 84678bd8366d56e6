"""
Cache for materializations.

Materializing a presentation is a pure function of the presentation and the
budgets, so results are stored under a digest of both. Entries always live in
memory; with a cache directory they are also written as ``<key>.json`` and
reused by later runs until they expire.
"""

import os
import json
import logging
import hashlib
from datetime import datetime, timedelta
from typing import Any, Dict, Iterator, Optional, Tuple

from pydantic import BaseModel, ValidationError


class CacheEntry(BaseModel):
    """Model representing one cached result as stored on disk."""
    key: str
    namespace: str = ""
    params: Dict[str, Any] = {}
    data: Any
    timestamp: datetime

    def age(self, now: Optional[datetime] = None) -> timedelta:
        return (now or datetime.now()) - self.timestamp


class CacheManager:
    """Materialization cache with an optional on-disk layer."""

    def __init__(self, cache_dir: Optional[str] = None, max_age_days: int = 7):
        """
        Initialize the cache.

        Args:
            cache_dir: Directory for entry files, or None for memory only
            max_age_days: Entries older than this are misses
        """
        self.cache_dir = cache_dir
        self.max_age = timedelta(days=max_age_days)
        self.memory: Dict[str, Any] = {}
        self.hits = 0
        self.misses = 0

        if cache_dir:
            os.makedirs(cache_dir, exist_ok=True)
            logging.debug(f"Materialization cache at {cache_dir}")

    def get_cache_key(self, namespace: str, payload: str, params: Dict[str, Any]) -> str:
        """
        Digest of a computation's input.

        Args:
            namespace: Kind of computation, e.g. "materialize"
            payload: Canonical JSON of the input
            params: Budgets the result depends on
        """
        budgets = json.dumps(params, sort_keys=True)
        return hashlib.md5(f"{namespace}:{budgets}:{payload}".encode()).hexdigest()

    def get_cache_path(self, cache_key: str) -> str:
        return os.path.join(self.cache_dir, f"{cache_key}.json")

    def _read_entry(self, path: str) -> Optional[CacheEntry]:
        try:
            with open(path, "r", encoding="utf-8") as f:
                return CacheEntry.model_validate(json.load(f))
        except (OSError, ValueError, ValidationError) as e:
            logging.warning(f"Unreadable cache file {path}: {str(e)}")
            return None

    def _entry_files(self) -> Iterator[Tuple[str, str]]:
        if not self.cache_dir:
            return
        for filename in sorted(os.listdir(self.cache_dir)):
            if filename.endswith(".json"):
                yield filename[:-len(".json")], os.path.join(self.cache_dir, filename)

    def save_to_cache(self, cache_key: str, params: Dict[str, Any], data: Any, namespace: str = "") -> None:
        """Store a JSON-compatible result in memory and, if configured, on disk."""
        self.memory[cache_key] = data
        if not self.cache_dir:
            return
        entry = CacheEntry(key=cache_key, namespace=namespace, params=params, data=data, timestamp=datetime.now())
        try:
            with open(self.get_cache_path(cache_key), "w", encoding="utf-8") as f:
                f.write(entry.model_dump_json(indent=2))
        except OSError as e:
            logging.error(f"Could not write cache entry {cache_key}: {str(e)}")

    def load_from_cache(self, cache_key: str) -> Optional[Any]:
        """
        Look a result up.

        Returns:
            The stored data, or None when missing, expired or unreadable
        """
        if cache_key in self.memory:
            self.hits += 1
            return self.memory[cache_key]

        entry = None
        if self.cache_dir and os.path.exists(self.get_cache_path(cache_key)):
            entry = self._read_entry(self.get_cache_path(cache_key))
        if entry is None or entry.age() > self.max_age:
            self.misses += 1
            return None

        self.hits += 1
        logging.debug(f"Materialization {cache_key} loaded from disk")
        self.memory[cache_key] = entry.data
        return entry.data

    def clear_cache(self, older_than_days: Optional[int] = None) -> int:
        """
        Remove entry files; without an age limit the memory layer is emptied too.

        Args:
            older_than_days: Only remove entries older than this (unreadable files always go)

        Returns:
            Number of files removed
        """
        if older_than_days is None:
            self.memory.clear()
        cutoff = None if older_than_days is None else timedelta(days=older_than_days)
        count = 0
        for key, path in list(self._entry_files()):
            if cutoff is not None:
                entry = self._read_entry(path)
                if entry is not None and entry.age() <= cutoff:
                    continue
            try:
                os.remove(path)
            except OSError as e:
                logging.error(f"Could not remove cache file {path}: {str(e)}")
                continue
            self.memory.pop(key, None)
            count += 1
        logging.info(f"Cleared {count} cached materializations")
        return count

    def get_cache_stats(self) -> Dict[str, Any]:
        sizes = [os.path.getsize(path) for _, path in self._entry_files()]
        return {
            "memory_entries": len(self.memory),
            "hits": self.hits,
            "misses": self.misses,
            "total_files": len(sizes),
            "total_size_bytes": sum(sizes),
        }


_default_cache: Optional[CacheManager] = None


def get_cache() -> CacheManager:
    """Process-wide cache configured from SKETCH_CACHE_DIR and SKETCH_CACHE_MAX_AGE_DAYS."""
    global _default_cache
    if _default_cache is None:
        _default_cache = CacheManager(
            cache_dir=os.getenv("SKETCH_CACHE_DIR") or None,
            max_age_days=int(os.getenv("SKETCH_CACHE_MAX_AGE_DAYS", "7")),
        )
    return _default_cache
