import hashlib
import json
import os
from typing import Any, Iterable


class PolyForgeError(Exception):
    """Base error. `exit_code` is what the CLI exits with when this escapes a command."""
    exit_code = 1


class InputError(PolyForgeError):
    exit_code = 3


class ResourceLimitError(PolyForgeError):
    exit_code = 2


class ClaimMismatch(PolyForgeError):
    """A reproduced value disagrees with the expected one."""
    exit_code = 1

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


def dump_json(data: Any) -> str:
    """
    Deterministic JSON text: sorted keys, fixed indentation, trailing newline.
    Repeated runs with the same inputs produce byte-identical output.
    """
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def digest(parts: Iterable[str]) -> str:
    """SHA-256 over the given strings, separated so that ("ab", "c") != ("a", "bc")."""
    h = hashlib.sha256()
    for part in parts:
        h.update(part.encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()


def write_output(text: str, path: str) -> str:
    """Write `text` to `path`, creating parent directories. Returns the absolute path."""
    path = os.path.abspath(os.path.expanduser(path))
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w") as f:
        f.write(text)
    return path
