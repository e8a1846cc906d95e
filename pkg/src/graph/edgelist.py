"""
Edge-list text format.

A header line ``"n m"`` is followed by ``m`` lines ``"dst src"`` (1-based),
each meaning ``src -> dst``. The destination comes first so that a line reads
like the pair ``(v_j, v_i)`` where ``v_j`` receives from ``v_i``.
"""
from pathlib import Path

from .digraph import Digraph, GraphError


def read_edge_list(text: str) -> Digraph:
    """
    Parse edge-list text into a Digraph.

    Blank lines are ignored.

    Raises:
        GraphError: On a malformed line, out-of-range index, self-edge,
            duplicate edge or an edge count that disagrees with the header
    """
    lines = [(no, line.split()) for no, line in enumerate(text.splitlines(), start=1) if line.strip()]
    if not lines:
        raise GraphError("Empty edge list")

    header_no, header = lines[0]
    if len(header) != 2:
        raise GraphError(f"Line {header_no}: header must be 'n m'")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise GraphError(f"Line {header_no}: header must be two integers") from None
    if n < 2 or m < 0:
        raise GraphError(f"Line {header_no}: need n >= 2 and m >= 0")

    body = lines[1:]
    if len(body) != m:
        raise GraphError(f"Header announces {m} edges but {len(body)} edge lines follow")

    seen = set()
    edges = []
    for no, fields in body:
        if len(fields) != 2:
            raise GraphError(f"Line {no}: expected 'dst src'")
        try:
            dst, src = int(fields[0]), int(fields[1])
        except ValueError:
            raise GraphError(f"Line {no}: indices must be integers") from None
        if not (1 <= dst <= n and 1 <= src <= n):
            raise GraphError(f"Line {no}: index out of range 1..{n}")
        if dst == src:
            raise GraphError(f"Line {no}: self-edge at node {dst}")
        if (src, dst) in seen:
            raise GraphError(f"Line {no}: duplicate edge {src}->{dst}")
        seen.add((src, dst))
        edges.append((src - 1, dst - 1))

    return Digraph.from_edges(n, edges)


def write_edge_list(g: Digraph) -> str:
    """Serialise a Digraph, edges sorted by (dst, src)."""
    pairs = sorted((dst + 1, src + 1) for src, dst in g.edges())
    lines = [f"{g.node_count} {len(pairs)}"]
    lines.extend(f"{dst} {src}" for dst, src in pairs)
    return "\n".join(lines) + "\n"


def load_edge_list(path: str) -> Digraph:
    """Read a digraph from an edge-list file."""
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"Graph file not found: {path}")
    return read_edge_list(file_path.read_text(encoding="utf-8"))


def save_edge_list(g: Digraph, path: str) -> None:
    """Write a digraph to an edge-list file."""
    file_path = Path(path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(write_edge_list(g))
