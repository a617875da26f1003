from __future__ import annotations

import queue
from contextlib import contextmanager
from typing import Any, Callable, Iterable, Iterator

from .client import EngineConfig, launch_engine


class EnginePool:
    """Identical engines handed out one worker at a time; ``acquire`` blocks when all are busy.

    Members only need ``search(trajectory, budget)`` and ``evaluate(trajectory, budget)``,
    so exact toy engines can be pooled the same way as UCI handles.
    """

    def __init__(self, members: Iterable[Any], owned: bool = False):
        self.members = list(members)
        if not self.members:
            raise ValueError("an engine pool needs at least one member")
        self._free: queue.Queue = queue.Queue()
        for m in self.members:
            self._free.put(m)
        self._owned = owned

    @classmethod
    def launch(cls, config: EngineConfig, size: int = 1,
               launcher: Callable[[EngineConfig], Any] = launch_engine) -> "EnginePool":
        members = []
        try:
            for _ in range(size):
                members.append(launcher(config))
        except Exception:
            for m in members:
                m.shutdown()
            raise
        return cls(members, owned=True)

    @property
    def size(self) -> int:
        return len(self.members)

    @contextmanager
    def acquire(self) -> Iterator[Any]:
        member = self._free.get()
        try:
            yield member
        finally:
            self._free.put(member)

    def close(self) -> None:
        if self._owned:
            for m in self.members:
                m.shutdown()

    def __enter__(self) -> "EnginePool":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
