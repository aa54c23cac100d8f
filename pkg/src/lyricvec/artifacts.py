"""Run-directory plumbing: atomic writes, content hashing, manifests."""

from __future__ import annotations

import hashlib
import json
import os
from contextlib import contextmanager
from pathlib import Path

MANIFEST_NAME = "manifest.json"


@contextmanager
def atomic_path(path: str | Path):
    """Yield a temporary path that replaces `path` on success, so readers
    never observe partial artifacts."""
    path = Path(path)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    try:
        yield tmp
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def atomic_write_text(path: str | Path, text: str) -> None:
    with atomic_path(path) as tmp:
        tmp.write_text(text, encoding="utf-8")


def atomic_write_json(path: str | Path, data) -> None:
    atomic_write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")


def sha256_file(path: str | Path) -> str:
    path = Path(path)
    if not path.is_file():
        raise ValueError(f"no such input file: {path}")
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def build_manifest(
    command: str, config: dict, inputs: dict[str, str | Path], outputs: list[str]
) -> dict:
    return {
        "command": command,
        "config": config,
        "config_hash": config_hash(config),
        "inputs": {name: sha256_file(p) for name, p in inputs.items()},
        "outputs": sorted(outputs),
        "seed": config.get("seed"),
    }


def write_manifest(run_dir: str | Path, manifest: dict) -> None:
    atomic_write_json(Path(run_dir) / MANIFEST_NAME, manifest)


def read_manifest(run_dir: str | Path) -> dict | None:
    path = Path(run_dir) / MANIFEST_NAME
    if not path.exists():
        return None
    return json.loads(path.read_text(encoding="utf-8"))


def run_is_current(run_dir: str | Path, manifest: dict) -> bool:
    """True when the stored manifest matches this run's command, config
    hash, and input hashes, and every declared output still exists."""
    run_dir = Path(run_dir)
    stored = read_manifest(run_dir)
    if stored is None:
        return False
    for key in ("command", "config_hash", "inputs", "outputs"):
        if stored.get(key) != manifest.get(key):
            return False
    return all((run_dir / name).exists() for name in manifest["outputs"])
