"""Minimal VCD reader used to validate emitted waveforms."""
from __future__ import annotations

from dataclasses import dataclass, field


class VcdError(ValueError):
    pass


@dataclass
class VcdData:
    timescale: str = ""
    signals: dict = field(default_factory=dict)  # id -> (name, width)
    changes: list = field(default_factory=list)  # (time, id, int value)

    def values_at(self, time: int) -> dict[str, int]:
        """Signal values (by name) after all changes at or before ``time``."""
        cur: dict[str, int] = {}
        for t, ident, v in self.changes:
            if t > time:
                break
            cur[self.signals[ident][0]] = v
        return cur


def read_vcd(text: str | bytes) -> VcdData:
    """Parse a VCD, checking declaration/usage consistency and monotone timestamps."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    toks = text.split()
    data = VcdData()
    i = 0
    in_defs = True
    time = None
    while i < len(toks):
        tok = toks[i]
        if in_defs:
            if not tok.startswith("$"):
                raise VcdError(f"unexpected token {tok!r} in header")
            try:
                end = toks.index("$end", i + 1)
            except ValueError:
                raise VcdError(f"unterminated {tok} section") from None
            body = toks[i + 1:end]
            if tok == "$timescale":
                data.timescale = " ".join(body)
            elif tok == "$var":
                if len(body) < 4:
                    raise VcdError(f"malformed $var: {body}")
                width, ident, name = int(body[1]), body[2], body[3]
                if width < 1:
                    raise VcdError(f"bad width for {name}")
                if ident in data.signals:
                    raise VcdError(f"duplicate identifier {ident!r}")
                data.signals[ident] = (name, width)
            elif tok == "$enddefinitions":
                in_defs = False
            i = end + 1
            continue
        if tok.startswith("#"):
            t = int(tok[1:])
            if time is not None and t <= time:
                raise VcdError(f"timestamp #{t} not increasing")
            time = t
            i += 1
            continue
        if tok in ("$dumpvars", "$end", "$dumpall", "$dumpon", "$dumpoff"):
            i += 1
            continue
        if time is None:
            raise VcdError("value change before first timestamp")
        if tok[0] in "bB":
            bits, ident = tok[1:], toks[i + 1] if i + 1 < len(toks) else None
            i += 2
        elif tok[0] in "01xXzZ":
            bits, ident = tok[0], tok[1:]
            i += 1
        else:
            raise VcdError(f"unexpected token {tok!r}")
        if ident not in data.signals:
            raise VcdError(f"value change for undeclared identifier {ident!r}")
        if any(c not in "01" for c in bits):
            raise VcdError(f"non-binary value {bits!r}")
        if len(bits) > data.signals[ident][1]:
            raise VcdError(f"value {bits!r} wider than {data.signals[ident]}")
        data.changes.append((time, ident, int(bits, 2)))
    if in_defs:
        raise VcdError("missing $enddefinitions")
    return data
