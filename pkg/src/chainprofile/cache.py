"""On-disk result cache with verification on reload.

One JSON file per cache directory.  Entries are keyed by the skeleton
fingerprint plus the query and budget, so a changed input or a changed cap
never aliases an old answer.  Witnesses stored with profile entries are
re-checked against the boundary operator before a hit is trusted; entries
that fail are evicted and recomputed.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile

from .skeleton import boundary, chain_from_json, chains_equal, norm

logger = logging.getLogger(__name__)

_FILE = "cache.json"


def default_cache_dir() -> str:
    env = os.environ.get("CHAINPROFILE_CACHE_DIR")
    if env:
        return env
    return os.path.join(os.path.expanduser("~"), ".cache", "chainprofile")


class ResultCache:
    """Tiny key-value store backed by one JSON file."""

    def __init__(self, directory: str):
        self.directory = directory
        self.path = os.path.join(directory, _FILE)
        self._data = None

    def _load(self) -> dict:
        if self._data is not None:
            return self._data
        try:
            with open(self.path) as fh:
                data = json.load(fh)
            if not isinstance(data, dict) or data.get("version") != 1:
                raise ValueError("unsupported cache layout")
            if not isinstance(data.get("entries"), dict):
                raise ValueError("missing entries table")
        except FileNotFoundError:
            data = {"version": 1, "entries": {}}
        except (ValueError, json.JSONDecodeError) as e:
            logger.warning("discarding unreadable cache at %s (%s)", self.path, e)
            data = {"version": 1, "entries": {}}
        self._data = data
        return data

    def get(self, key: str):
        return self._load()["entries"].get(key)

    def put(self, key: str, value) -> None:
        data = self._load()
        data["entries"][key] = value
        self._write(data)

    def evict(self, key: str) -> None:
        data = self._load()
        if data["entries"].pop(key, None) is not None:
            self._write(data)

    def _write(self, data) -> None:
        os.makedirs(self.directory, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(data, fh, sort_keys=True)
            os.replace(tmp, self.path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise


def profile_key(kind: str, fingerprint: str, n: int, budget) -> str:
    return f"{fingerprint}:{kind}:{n}:{budget.fill_volume_cap}:{budget.node_cap}"


def fv_key(fingerprint: str, chain_json, budget) -> str:
    digest = hashlib.sha256(
        json.dumps(chain_json, sort_keys=True).encode()).hexdigest()[:16]
    return f"{fingerprint}:fv:{digest}:{budget.fill_volume_cap}:{budget.node_cap}"


def _values_ok(values, n) -> bool:
    return (isinstance(values, list) and len(values) == n + 1
            and all(isinstance(v, int) for v in values)
            and all(b >= a for a, b in zip(values, values[1:]))
            and (not values or values[0] == 0))


def verify_profile_entry(entry, kind: str, n: int, s, oracle) -> bool:
    """Structural and witness checks on a cached profile before reuse."""
    try:
        values = entry["values"]
        witnesses = entry["witnesses"]
        if not _values_ok(values, n) or len(witnesses) != n + 1:
            return False
        if kind == "psi":
            for k in range(1, n + 1):
                wit = witnesses[k]
                if wit is None:
                    if values[k] != 0:
                        return False
                    continue
                cyc = chain_from_json(wit["cycle"], s, oracle)
                fill = chain_from_json(wit["filling"], s, oracle)
                if norm(cyc) > k or norm(fill) != values[k]:
                    return False
                if not chains_equal(boundary(fill, s, oracle), cyc, oracle):
                    return False
        elif kind == "phi":
            for k in range(1, n + 1):
                wit = witnesses[k]
                if wit is None or sum(wit["partition"]) != k:
                    return False
                if sum(wit["psi"]) != values[k]:
                    return False
        elif kind == "finite":
            for k in range(1, n + 1):
                wit = witnesses[k]
                if wit is None:
                    if values[k] != 0:
                        return False
                    continue
                if sum(abs(t["coeff"]) for t in wit["filling"]) != values[k]:
                    return False
                if sum(abs(t["coeff"]) for t in wit["cycle"]) > k:
                    return False
        else:
            return False
        return True
    except (KeyError, TypeError, ValueError):
        return False
    except Exception:
        logger.warning("cached entry failed verification with an error")
        return False


def verify_fv_entry(entry, target, s, oracle) -> bool:
    try:
        fill = chain_from_json(entry["filling"], s, oracle)
        if norm(fill) != entry["value"]:
            return False
        return chains_equal(boundary(fill, s, oracle), target, oracle)
    except Exception:
        return False
