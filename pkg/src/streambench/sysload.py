"""Optional process-level resource sampler.

Records CPU time and resident set size of this process at a fixed
interval to a CSV file, as a lightweight stand-in for node-level system
monitoring during a benchmark run.
"""

from __future__ import annotations

import threading
import time

import psutil


class ResourceSampler:
    """Background thread writing `ts_ms,cpu_time_s,rss_bytes` rows."""

    def __init__(self, path, interval_s: float = 1.0):
        self.path = path
        self.interval_s = interval_s
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, *exc):
        self.stop()

    def start(self) -> None:
        proc = psutil.Process()

        def run():
            with open(self.path, "w", encoding="utf-8") as fh:
                fh.write("ts_ms,cpu_time_s,rss_bytes\n")
                while not self._stop.is_set():
                    cpu = proc.cpu_times()
                    mem = proc.memory_info()
                    fh.write(f"{time.time_ns() // 1_000_000},"
                             f"{cpu.user + cpu.system:.3f},{mem.rss}\n")
                    fh.flush()
                    self._stop.wait(self.interval_s)

        self._thread = threading.Thread(target=run, name="sysload", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join()
