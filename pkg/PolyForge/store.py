"""
Artifact store for PolyForge

Complete coset tables and certified coordinate maps take seconds to minutes to rebuild, so they are
kept in a diskcache Cache between runs. Keys are digests of everything the artifact depends on:
presentation text, subgroup words and enumeration strategy.

Only complete, validated artifacts are stored. Any failure to read or write the cache is logged
and treated as a miss.
"""

from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from diskcache import Cache

from .config import logger, DEBUG, CACHE_DIR, CACHE_ENABLED
from .fpcore import Presentation, Word
from .utils import digest

# bump when the pickled artifact layout changes
ARTIFACT_VERSION = "1"


def artifact_key(kind: str, p: Presentation, subgroup: Sequence[Word], strategy: str, *extra: str) -> str:
    parts = [ARTIFACT_VERSION, kind, p.describe(), strategy]
    parts.extend(p.format(w) for w in subgroup)
    parts.extend(extra)
    return f"{kind}:{digest(parts)}"


class ArtifactStore:
    """A thin wrapper over a diskcache Cache; every method swallows cache errors."""

    def __init__(self, directory: Optional[str] = None, enabled: bool = CACHE_ENABLED):
        self.enabled = enabled
        self.directory = Path(directory or CACHE_DIR)
        self.cache: Optional[Cache] = None
        if not enabled:
            return
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            self.cache = Cache(str(self.directory))
        except Exception as e:
            logger.error(f"Artifact cache unavailable at {self.directory}: {e}")
            self.enabled = False

    def get(self, key: str) -> Any:
        if not self.enabled:
            return None
        try:
            value = self.cache.get(key)
        except Exception as e:
            logger.error(f"Error reading artifact {key}: {e}")
            return None
        if DEBUG:
            logger.debug(f"Artifact {key}: {'hit' if value is not None else 'miss'}")
        return value

    def put(self, key: str, value: Any) -> bool:
        if not self.enabled:
            return False
        try:
            self.cache.set(key, value)
            return True
        except Exception as e:
            logger.error(f"Error writing artifact {key}: {e}")
            return False

    def clear(self) -> int:
        if not self.enabled:
            return 0
        try:
            return self.cache.clear()
        except Exception as e:
            logger.error(f"Error clearing artifact cache: {e}")
            return 0

    def stats(self) -> Dict[str, Any]:
        if not self.enabled:
            return {"enabled": False, "directory": str(self.directory), "entries": 0, "bytes": 0}
        try:
            kinds: Dict[str, int] = {}
            for key in self.cache.iterkeys():
                kind = str(key).split(":", 1)[0]
                kinds[kind] = kinds.get(kind, 0) + 1
            return {
                "enabled": True,
                "directory": str(self.directory),
                "entries": len(self.cache),
                "bytes": self.cache.volume(),
                "kinds": kinds,
            }
        except Exception as e:
            logger.error(f"Error reading artifact cache stats: {e}")
            return {"enabled": True, "directory": str(self.directory), "entries": 0, "bytes": 0}

    def close(self):
        if self.cache is not None:
            self.cache.close()


# Global store instance
_store_instance: Optional[ArtifactStore] = None


def get_artifact_store(enabled: bool = True) -> ArtifactStore:
    """The process-wide store. enabled=False returns a store that never hits."""
    global _store_instance
    if not enabled or not CACHE_ENABLED:
        return ArtifactStore(enabled=False)
    if _store_instance is None:
        _store_instance = ArtifactStore()
    return _store_instance
