"""Reference implementations-under-test.

These speak the bundled protocols' wire formats with hand-rolled byte
code on purpose: they share nothing with the codec library, so engine
verdicts against them actually exercise two independent implementations
of each format.
"""

from __future__ import annotations

import threading

from .. import channel as chan
from ..errors import ChannelError


class StreamReader:
    """Blocking buffered reader over a Channel."""

    def __init__(self, ch: chan.Channel, poll_ms: int = 10000):
        self.ch = ch
        self.poll_ms = poll_ms
        self.buf = b""
        self.closed = False

    def _fill(self) -> bool:
        if self.closed:
            return False
        try:
            result = self.ch.recv(self.poll_ms)
        except ChannelError:
            self.closed = True
            return False
        if isinstance(result, chan.Bytes):
            self.buf += result.data
            return True
        if result is chan.PEER_CLOSED:
            self.closed = True
        return False

    def read_exact(self, n: int) -> bytes | None:
        """Exactly n bytes, or None if the peer closed first."""
        while len(self.buf) < n:
            if not self._fill():
                return None
        out, self.buf = self.buf[:n], self.buf[n:]
        return out

    def read_line(self, terminator: bytes = b"\r\n") -> bytes | None:
        """A line without its terminator, or None if the peer closed first."""
        while terminator not in self.buf:
            if not self._fill():
                return None
        line, _, self.buf = self.buf.partition(terminator)
        return line


def start_in_thread(target, *args, **kwargs) -> threading.Thread:
    """Run an IUT loop on a daemon thread (for in-process harnesses)."""

    def run():
        try:
            target(*args, **kwargs)
        except ChannelError:
            pass

    thread = threading.Thread(target=run, daemon=True)
    thread.start()
    return thread
