#  RunManifest.py Copyright (c) 2026 Nikki Cooper
#
#  This program and the accompanying materials are made available under the
#  terms of the GNU Lesser General Public License, version 3.0 which is available at
#  https://www.gnu.org/licenses/gpl-3.0.html#license-text
#
# Provenance record embedded in every report: what ran, with which flags and
# seeds, on which inputs (content hashes), and how long each phase took.

import hashlib
import json
import math
import os
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

import constants as const


def file_digest(path, chunk=1 << 20):
    """sha256 of a file's bytes."""
    digest = hashlib.sha256()
    with open(os.path.expanduser(path), "rb") as handle:
        for block in iter(lambda: handle.read(chunk), b""):
            digest.update(block)
    return digest.hexdigest()


@dataclass
class RunManifest:
    command: str
    flags: Dict[str, object] = field(default_factory=dict)
    seeds: Dict[str, int] = field(default_factory=dict)
    input_digests: Dict[str, str] = field(default_factory=dict)
    tool_version: str = const.TOOL_VERSION
    timings: Dict[str, float] = field(default_factory=dict)

    def add_input(self, path):
        if path:
            self.input_digests[os.path.basename(path)] = file_digest(path)

    @contextmanager
    def timed(self, phase):
        """Accumulate wall-clock seconds spent in a phase."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[phase] = self.timings.get(phase, 0.0) + time.perf_counter() - start

    def run_key(self):
        """Hash of everything that determines the outputs (timings excluded)."""
        stable = self.to_dict()
        stable.pop("timings")
        return hashlib.sha256(json.dumps(stable, sort_keys=True, separators=(",", ":")).encode()).hexdigest()

    def to_dict(self):
        return {
            "tool": const.TOOL_NAME,
            "tool_version": self.tool_version,
            "command": self.command,
            "flags": {key: _plain(value) for key, value in sorted(self.flags.items())},
            "seeds": dict(sorted(self.seeds.items())),
            "input_digests": dict(sorted(self.input_digests.items())),
            "timings": {key: round(value, 6) for key, value in sorted(self.timings.items())},
        }


def _plain(value):
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in sorted(value.items())}
    if isinstance(value, float) and not math.isfinite(value):
        return None if value != value else repr(value)
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return str(value)


def _finite(value):
    """Replace NaN and infinities anywhere in a report with None."""
    if isinstance(value, dict):
        return {key: _finite(v) for key, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, np.ndarray):
        return _finite(value.tolist())
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_report(report, manifest, path=None, indent=2):
    """
    Dump a report with its manifest as JSON, to ``path`` when given.
    Non-finite numbers are written as null.

    Returns:
        the JSON text.
    """
    payload = _finite(dict(report))
    payload["manifest"] = manifest.to_dict()
    payload["manifest"]["run_key"] = manifest.run_key()
    text = json.dumps(payload, indent=indent, sort_keys=True, allow_nan=False, default=_plain)
    if path:
        with open(os.path.expanduser(path), "w", encoding="utf-8") as handle:
            handle.write(text)
            handle.write("\n")
    return text
