"""graph6 encoding (column-major upper triangle, 6-bit groups offset by 63)."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Iterator

from .errors import Graph6Error
from .graph import Graph

HEADER = ">>graph6<<"


def _encode_n(n: int) -> str:
    if n < 63:
        return chr(n + 63)
    if n < 258048:
        return chr(126) + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    return chr(126) * 2 + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))


def encode(G: Graph) -> str:
    n = G.n
    out = [_encode_n(n)]
    acc = 0
    nbits = 0
    for j in range(1, n):
        row = G.adj[j]
        for i in range(j):
            acc = (acc << 1) | ((row >> i) & 1)
            nbits += 1
            if nbits == 6:
                out.append(chr(acc + 63))
                acc = 0
                nbits = 0
    if nbits:
        out.append(chr((acc << (6 - nbits)) + 63))
    return "".join(out)


def decode(text: str | bytes) -> Graph:
    if isinstance(text, bytes):
        text = text.decode("ascii", errors="replace")
    s = text.strip()
    base = 0
    if s.startswith(HEADER):
        s = s[len(HEADER):]
        base = len(HEADER)
    if not s:
        raise Graph6Error("empty graph6 string", base)
    for i, ch in enumerate(s):
        if not 63 <= ord(ch) <= 126:
            raise Graph6Error(f"invalid graph6 byte {ch!r}", base + i)
    vals = [ord(ch) - 63 for ch in s]
    if vals[0] < 63:
        n, pos = vals[0], 1
    elif len(vals) >= 2 and vals[1] < 63:
        if len(vals) < 4:
            raise Graph6Error("truncated vertex count", base + len(vals))
        n = (vals[1] << 12) | (vals[2] << 6) | vals[3]
        pos = 4
    else:
        if len(vals) < 8:
            raise Graph6Error("truncated vertex count", base + len(vals))
        n = 0
        for v in vals[2:8]:
            n = (n << 6) | v
        pos = 8
    need_bits = n * (n - 1) // 2
    need = (need_bits + 5) // 6
    body = vals[pos:]
    if len(body) != need:
        off = base + pos + min(len(body), need)
        raise Graph6Error(f"expected {need} data bytes for n={n}, found {len(body)}", off)
    adj = [0] * n
    k = 0
    for j in range(1, n):
        for i in range(j):
            byte = body[k // 6]
            if (byte >> (5 - k % 6)) & 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
            k += 1
    return Graph._trusted(n, adj)


def read_file(path: str | Path) -> list[Graph]:
    graphs = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            graphs.append(decode(line))
    return graphs


def write_file(path: str | Path, graphs: Iterable[Graph]) -> None:
    Path(path).write_text("".join(encode(g) + "\n" for g in graphs))


def iter_lines(lines: Iterable[str]) -> Iterator[Graph]:
    for line in lines:
        if line.strip():
            yield decode(line)
