"""Injected clocks.

Every timestamp in the harness (broker ingestion, store updates) is read
from an injected clock so that a run with the logical clock is fully
reproducible while a run with the real clock measures wall time.
Internally the logical clock keeps microseconds to represent sub-millisecond
pacing intervals exactly; the public unit is integer milliseconds.
"""

from __future__ import annotations

import time


class RealClock:
    """Wall clock, epoch milliseconds."""

    def now_ms(self) -> int:
        return time.time_ns() // 1_000_000

    def now_us(self) -> int:
        return time.time_ns() // 1_000

    def sleep_until_us(self, deadline_us: int) -> None:
        while True:
            delta = deadline_us - self.now_us()
            if delta <= 0:
                return
            time.sleep(delta / 1e6)


class LogicalClock:
    """Manually advanced clock; never moves on its own.

    `advance_to_us` is monotone: attempts to move backwards are ignored,
    so interleaved schedules can replay events in merged order.
    """

    def __init__(self, start_ms: int = 0):
        self._now_us = start_ms * 1000

    def now_ms(self) -> int:
        return self._now_us // 1000

    def now_us(self) -> int:
        return self._now_us

    def advance_to_us(self, t_us: int) -> None:
        if t_us > self._now_us:
            self._now_us = t_us

    def advance_to_ms(self, t_ms: int) -> None:
        self.advance_to_us(t_ms * 1000)
