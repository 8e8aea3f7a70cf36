import math
import os
import threading
import time
from contextlib import contextmanager
from typing import Generator, Optional

import psutil
from rich.console import Console
from rich.progress import BarColumn, Progress, TextColumn

from .abelgrp import FiniteMatrixGroup


def bytes_to_human(size_bytes: int) -> str:
    """
    Convert a size in bytes to a human-readable string.

    Args:
        size_bytes (int): Size in bytes.

    Returns:
        str: Human-readable string representation of the size.
    """
    if size_bytes == 0:
        return "0 bytes"
    if size_bytes < 0:
        return "<unknown>"
    size_name = ("bytes", "KB", "MB", "GB", "TB", "PB")
    i = min(int(math.floor(math.log(size_bytes, 1024))), len(size_name) - 1)
    s = round(size_bytes / math.pow(1024, i), 2)
    return f"{s} {size_name[i]}"


class _Thr:
    def __init__(self, period: float = 0.1) -> None:
        self._lock = threading.Lock()
        self._thread: Optional[threading.Thread] = None
        self._stop: Optional[threading.Event] = None
        self._period = period

    def start(self) -> None:
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        if self._thread is not None and self._stop is not None:
            self._stop.set()
            self._thread.join()
            self._thread = None
            self._stop = None
        self._on_exit()

    def _run(self) -> None:
        if self._stop is None:
            raise TypeError("the start function should have been called")
        while not self._stop.is_set():
            with self._lock:
                self._iterate()
            time.sleep(self._period)

    def _iterate(self) -> None:
        raise NotImplementedError

    def _on_exit(self) -> None:
        return


class EnumerationProgress(_Thr):
    """
    Displays, on stderr, the number of group elements enumerated so far against
    the enumeration cap, with the resident memory of the process.

    Args:
        group (FiniteMatrixGroup): The group being enumerated.
        period (float): Refresh period in seconds.
    """

    def __init__(self, group: FiniteMatrixGroup, period: float = 0.2) -> None:
        super().__init__(period=period)
        self._group = group
        self._started = False
        self._process = psutil.Process(os.getpid())
        self._progress = Progress(
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TextColumn("{task.completed:>10.0f} / {task.total:.0f}"),
            TextColumn("{task.fields[custom_text]}"),
            console=Console(stderr=True),
        )
        self._task = self._progress.add_task(
            "[green]Enumerated elements:",
            total=group.cap,
            custom_text="starting",
        )

    def _iterate(self) -> None:
        if not self._started:
            self._progress.start()
            self._started = True
        rss = self._process.memory_info().rss
        self._progress.update(
            self._task,
            completed=self._group.enumerated,
            custom_text=f"memory: {bytes_to_human(rss)}",
        )

    def _on_exit(self) -> None:
        if self._started:
            self._progress.update(self._task, completed=self._group.enumerated)
            self._progress.stop()


@contextmanager
def enumeration_progress(
    group: FiniteMatrixGroup, enabled: bool = True
) -> Generator[Optional[EnumerationProgress], None, None]:
    """
    A context manager displaying the progress of the enumeration of group
    while the body runs.

    Args:
        group (FiniteMatrixGroup): The group to watch.
        enabled (bool): When False, nothing is displayed.

    Yields:
        Optional[EnumerationProgress]: The running display, or None.
    """
    if not enabled:
        yield None
        return
    progress = EnumerationProgress(group)
    progress.start()
    try:
        yield progress
    finally:
        progress.stop()
