"""Run configuration shared by the verifier and the plugin host."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

MODE_CHECK = "check"
MODE_OVERRIDE = "override"
MODE_CREATE = "create"

MODES = (MODE_CHECK, MODE_OVERRIDE, MODE_CREATE)


@dataclass
class VerifyConfig:
    root: Path
    mode: str = MODE_CHECK
    enabled_ffi: frozenset = frozenset()
    timeout_s: float = 60.0
    python_cmd: str = "python3"
    temp_root: Optional[Path] = None

    def __post_init__(self):
        self.root = Path(self.root)
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        self.enabled_ffi = frozenset(self.enabled_ffi)
