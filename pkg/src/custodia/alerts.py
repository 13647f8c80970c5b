"""Fan-out hub for trigger notifications.

Every state-mutating transaction produces one alert; subscribers see
them in ledger order starting at their subscription point. A consumer
that falls more than ``buffer_size`` notifications behind is cut off
with an overflow marker instead of stalling the append path.
"""

from __future__ import annotations

import queue
import threading
from dataclasses import dataclass, field

from .state import AlertNotification

OVERFLOW = object()     # sentinel delivered once to a lagging subscriber


@dataclass
class Subscription:
    sink_id: str
    _queue: "queue.Queue" = field(repr=False)
    _hub: "AlertHub" = field(repr=False)
    overflowed: bool = False

    def get(self, timeout: float | None = None):
        """Next alert, OVERFLOW once the buffer was exceeded, or None on timeout."""
        try:
            return self._queue.get(timeout=timeout)
        except queue.Empty:
            return None

    def close(self) -> None:
        self._hub.unsubscribe(self)


class AlertHub:
    def __init__(self, buffer_size: int = 256):
        self.buffer_size = buffer_size
        self._subs: list[Subscription] = []
        self._lock = threading.Lock()
        self._next_sink = 0

    def subscribe(self, sink_id: str | None = None) -> Subscription:
        with self._lock:
            if sink_id is None:
                sink_id = f"sink-{self._next_sink}"
                self._next_sink += 1
            sub = Subscription(sink_id=sink_id,
                               _queue=queue.Queue(maxsize=self.buffer_size),
                               _hub=self)
            self._subs.append(sub)
            return sub

    def unsubscribe(self, sub: Subscription) -> None:
        with self._lock:
            if sub in self._subs:
                self._subs.remove(sub)

    def subscriber_count(self) -> int:
        with self._lock:
            return len(self._subs)

    def publish(self, alert: AlertNotification) -> None:
        """Best-effort delivery; the ledger stays the source of truth."""
        with self._lock:
            lagging = []
            for sub in self._subs:
                try:
                    sub._queue.put_nowait(alert)
                except queue.Full:
                    sub.overflowed = True
                    lagging.append(sub)
            for sub in lagging:
                self._subs.remove(sub)
                # make room so the overflow marker always fits
                try:
                    sub._queue.get_nowait()
                except queue.Empty:
                    pass
                try:
                    sub._queue.put_nowait(OVERFLOW)
                except queue.Full:
                    pass
