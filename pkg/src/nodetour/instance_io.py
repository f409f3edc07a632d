"""Reading and writing TSP instance files.

Two text formats are supported, both UTF-8 with LF line endings.

Canonical format (what `write_instance` emits), one or more blocks per file::

    tsp <n> <id>
    <x> <y>          # n coordinate lines
    tour <i0> ... <i{n-1}>   # optional, 0-based open cycle

Coordinates are written with shortest round-trip precision (`repr`), so a
write/read cycle is the identity.

Compatibility format ("coords"): one instance per line, as found in the public
TSP evaluation datasets. A line holds 2n whitespace-separated coordinates, the
literal token ``output``, then a 1-based closed tour whose final index repeats
the first::

    x1 y1 x2 y2 ... xn yn output t1 t2 ... tn t1
"""

from __future__ import annotations

from pathlib import Path

from .errors import ParseError
from .geometry import Tour, TspInstance, validate_tour


def write_instance(inst: TspInstance, tour: Tour | None, path) -> None:
    """Write one instance (and optionally its tour) in canonical format."""
    path = Path(path)
    if any(ch.isspace() for ch in inst.id):
        raise ValueError(f"instance id must not contain whitespace: {inst.id!r}")
    lines = [f"tsp {inst.n} {inst.id}"]
    for x, y in inst.nodes:
        lines.append(f"{x!r} {y!r}")
    if tour is not None:
        verdict = validate_tour(inst, tour)
        if not verdict:
            raise ValueError(f"refusing to write invalid tour: {verdict.reason}")
        lines.append("tour " + " ".join(str(i) for i in tour.order))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_instances(path, fmt: str = "auto") -> list[tuple[TspInstance, Tour | None]]:
    """Read all instances from a file, or from every file in a directory (sorted).

    `fmt` is "canonical", "coords", or "auto" (sniff the first token).
    """
    path = Path(path)
    if path.is_dir():
        out = []
        for child in sorted(p for p in path.iterdir() if p.is_file()):
            out.extend(read_instances(child, fmt))
        return out
    text = path.read_text(encoding="utf-8")
    if fmt == "auto":
        fmt = _sniff_format(text)
        if fmt is None:
            return []
    if fmt == "canonical":
        return _parse_canonical(text, path)
    if fmt == "coords":
        return _parse_coords(text, path)
    raise ValueError(f"unknown instance format {fmt!r}")


def _sniff_format(text: str) -> str | None:
    for line in text.splitlines():
        tokens = line.split()
        if not tokens:
            continue
        return "canonical" if tokens[0] == "tsp" else "coords"
    return None


def _parse_canonical(text: str, path) -> list[tuple[TspInstance, Tour | None]]:
    lines = text.splitlines()
    out: list[tuple[TspInstance, Tour | None]] = []
    ln = 0
    total = len(lines)
    while ln < total:
        tokens = lines[ln].split()
        ln += 1
        if not tokens:
            continue
        if tokens[0] != "tsp" or len(tokens) != 3:
            raise ParseError("expected header 'tsp <n> <id>'", path, ln)
        try:
            n = int(tokens[1])
        except ValueError:
            raise ParseError(f"bad node count {tokens[1]!r}", path, ln) from None
        inst_id = tokens[2]
        nodes = []
        for _ in range(n):
            if ln >= total:
                raise ParseError(f"unexpected end of file, expected {n} coordinate lines", path, ln)
            parts = lines[ln].split()
            ln += 1
            if len(parts) != 2:
                raise ParseError("expected coordinate line '<x> <y>'", path, ln)
            try:
                x, y = float(parts[0]), float(parts[1])
            except ValueError:
                raise ParseError(f"bad coordinate pair {lines[ln - 1]!r}", path, ln) from None
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                raise ParseError(f"coordinate ({x}, {y}) outside [0,1]", path, ln)
            nodes.append((x, y))
        inst = TspInstance(tuple(nodes), id=inst_id)
        tour = None
        if ln < total and lines[ln].split()[:1] == ["tour"]:
            parts = lines[ln].split()
            ln += 1
            try:
                order = tuple(int(t) for t in parts[1:])
            except ValueError:
                raise ParseError("bad tour index", path, ln) from None
            tour = Tour(order)
            verdict = validate_tour(inst, tour)
            if not verdict:
                raise ParseError(f"tour is not a permutation: {verdict.reason}", path, ln)
        out.append((inst, tour))
    return out


def _parse_coords(text: str, path) -> list[tuple[TspInstance, Tour | None]]:
    out: list[tuple[TspInstance, Tour | None]] = []
    stem = Path(path).stem if path is not None else "coords"
    for ln, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        if "output" not in tokens:
            raise ParseError("missing 'output' separator", path, ln)
        sep = tokens.index("output")
        raw_coords = tokens[:sep]
        raw_tour = tokens[sep + 1 :]
        if len(raw_coords) % 2 != 0:
            raise ParseError("odd number of coordinate values", path, ln)
        n = len(raw_coords) // 2
        try:
            nodes = [
                (float(raw_coords[2 * i]), float(raw_coords[2 * i + 1])) for i in range(n)
            ]
        except ValueError:
            raise ParseError("bad coordinate value", path, ln) from None
        for x, y in nodes:
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                raise ParseError(f"coordinate ({x}, {y}) outside [0,1]", path, ln)
        try:
            closed = [int(t) for t in raw_tour]
        except ValueError:
            raise ParseError("bad tour index", path, ln) from None
        if len(closed) != n + 1 or closed[0] != closed[-1]:
            raise ParseError("tour must be closed: n+1 1-based indices, last repeating first", path, ln)
        inst = TspInstance(tuple(nodes), id=f"{stem}-{ln}")
        tour = Tour(tuple(i - 1 for i in closed[:-1]))
        verdict = validate_tour(inst, tour)
        if not verdict:
            raise ParseError(f"tour is not a permutation: {verdict.reason}", path, ln)
        out.append((inst, tour))
    return out
