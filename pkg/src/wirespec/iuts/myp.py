"""MyP reference server and client, plus two seeded server mutants.

Wire format (hand-coded): Ask = 0x40, Done = 0xC0, Data = header byte
0x00, a 32-bit big-endian item count, per item a 32-bit length n, n data
bytes and zero-padding closed by 0x01 up to a 32-bit boundary, then a
footer-flag byte (0xFF/0x00) and, when flagged, a footer line ending in
'\\n'.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random

from .. import channel as chan
from ..errors import ChannelError
from . import StreamReader

ASK = 0x40
DONE = 0xC0

FAULT_FORMAT = "format"  # Data carries reserved bits 000001
FAULT_TRACE = "trace"  # replies Data to Done

_FOOT_CHARS = bytes(range(0x20, 0x7F)).decode("ascii")


@dataclass
class IutBehavior:
    identifier: str
    role: str  # 'server' or 'client'
    fault: str | None = None  # None | FAULT_FORMAT | FAULT_TRACE


def build_data(rng: Random, fault_format: bool = False) -> bytes:
    parts = [b"\x01" if fault_format else b"\x00"]
    count = rng.randint(0, 4)
    parts.append(count.to_bytes(4, "big"))
    for _ in range(count):
        n = rng.randint(0, 500)
        parts.append(n.to_bytes(4, "big"))
        parts.append(rng.randbytes(n))
        pad = (4 - n % 4) % 4
        if pad:
            parts.append(b"\x00" * (pad - 1) + b"\x01")
    if rng.random() < 0.5:
        foot = "".join(rng.choice(_FOOT_CHARS) for _ in range(rng.randint(0, 16)))
        parts.append(b"\xff" + foot.encode("ascii") + b"\n")
    else:
        parts.append(b"\x00")
    return b"".join(parts)


def run_myp_server(ch: chan.Channel, behavior: IutBehavior | None = None, seed: int = 0):
    """Serve one connection until the peer closes."""
    behavior = behavior or IutBehavior("myp-server", "server")
    rng = Random(seed)
    reader = StreamReader(ch)
    while True:
        cmd = reader.read_exact(1)
        if cmd is None:
            return
        if cmd[0] == ASK:
            ch.send(build_data(rng, fault_format=behavior.fault == FAULT_FORMAT))
        elif cmd[0] == DONE:
            if behavior.fault == FAULT_TRACE:
                ch.send(build_data(rng))
        # anything else: not part of the protocol, ignore


def read_data_message(reader: StreamReader) -> dict | None:
    """Parse one Data message; None if the peer closed first."""
    header = reader.read_exact(1)
    if header is None:
        return None
    if header[0] != 0x00:
        raise ValueError(f"bad Data header byte {header[0]:#x}")
    raw = reader.read_exact(4)
    if raw is None:
        return None
    count = int.from_bytes(raw, "big")
    items = []
    for _ in range(count):
        raw = reader.read_exact(4)
        if raw is None:
            return None
        n = int.from_bytes(raw, "big")
        data = reader.read_exact(n)
        pad = reader.read_exact((4 - n % 4) % 4)
        if data is None or pad is None:
            return None
        items.append((n, data, pad))
    flag = reader.read_exact(1)
    if flag is None:
        return None
    foot = None
    if flag[0] == 0xFF:
        line = reader.read_line(b"\n")
        if line is None:
            return None
        foot = line.decode("ascii")
    elif flag[0] != 0x00:
        raise ValueError(f"bad footer flag {flag[0]:#x}")
    return {"items": items, "foot": foot}


def run_myp_client(ch: chan.Channel, seed: int = 0):
    """Ask for Data in bursts, send Done between bursts, quit eventually."""
    rng = Random(seed)
    reader = StreamReader(ch)
    try:
        while True:
            # Starting
            if rng.random() < 0.3:
                ch.close()
                return
            ch.send(bytes([ASK]))
            # Waiting: consume Data, maybe ask for more
            while True:
                if read_data_message(reader) is None:
                    return
                if rng.random() < 0.55:
                    ch.send(bytes([ASK]))
                else:
                    ch.send(bytes([DONE]))
                    break
    except ChannelError:
        return
