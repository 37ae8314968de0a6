"""Console progress lines and completion banners."""

from __future__ import annotations

import time
from collections.abc import Sequence


def format_elapsed(seconds: float) -> str:
    """Format seconds as H:MM:SS or M:SS."""
    h = int(seconds // 3600)
    m = int((seconds % 3600) // 60)
    s = int(seconds % 60)
    if h > 0:
        return f"{h}:{m:02d}:{s:02d}"
    return f"{m}:{s:02d}"


def format_eta(seconds: float) -> str:
    """Format ETA seconds as human-readable string."""
    if seconds < 60:
        return f"{seconds:.0f}s"
    m = int(seconds // 60)
    s = int(seconds % 60)
    if m < 60:
        return f"{m}:{s:02d}"
    h = m // 60
    m = m % 60
    return f"{h}:{m:02d}:{s:02d}"


class Progress:
    """Prints ``[label i/n] message  elapsed=...  ETA=...`` lines."""

    def __init__(self, label: str, total: int) -> None:
        self.label = label
        self.total = total
        self._start = time.monotonic()

    def update(self, done: int, message: str = "") -> None:
        elapsed = time.monotonic() - self._start
        rate = done / elapsed if elapsed > 0 else 0.0
        eta = (self.total - done) / rate if rate > 0 else 0.0
        print(
            f"[{self.label} {done}/{self.total}] {message}  "
            f"elapsed={format_elapsed(elapsed)}  ETA={format_eta(eta)}"
        )

    @property
    def elapsed(self) -> float:
        return time.monotonic() - self._start


def print_banner(title: str, lines: Sequence[str]) -> None:
    print()
    print("═" * 56)
    print(title)
    for line in lines:
        print(f"  {line}")
    print("═" * 56)
