"""Plain-text formats for two-point matrices and smearing specifications.

Two-point matrix::

    # comments and blank lines are ignored
    3                      <- d_test
    re im  re im  re im    <- one row per line, row-major
    ...

Smearing specification, one block per term::

    term
    stencil 0:-1 1:1       <- offset:coefficient pairs along ``axis`` (or ``identity``)
    axis 0                 <- optional, default 0
    g 0.1 0.5 ...          <- class-S generator, repeatable
    f 0.2 0.3 ...          <- or a bare smearing function (no class-S witness)
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .models import stencil_matrix
from .quasifree import TwoPointMatrix
from .wick import SmearingSpec, SmearingTerm


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _floats(tokens, where: str) -> list[float]:
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise ConfigurationError(f"{where}: {exc}") from None


def parse_two_point(text: str, source: str = "<string>") -> TwoPointMatrix:
    lines = list(_content_lines(text))
    if not lines:
        raise ConfigurationError(f"{source}: empty two-point file")
    lineno, head = lines[0]
    try:
        d = int(head)
    except ValueError:
        raise ConfigurationError(f"{source}:{lineno}: expected the dimension, got {head!r}") from None
    rows = lines[1:]
    if d < 1 or len(rows) != d:
        raise ConfigurationError(f"{source}: expected {d} rows, found {len(rows)}")
    W = np.empty((d, d), dtype=complex)
    for a, (lineno, line) in enumerate(rows):
        vals = _floats(line.split(), f"{source}:{lineno}")
        if len(vals) != 2 * d:
            raise ConfigurationError(f"{source}:{lineno}: expected {2 * d} numbers, found {len(vals)}")
        W[a] = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
    return TwoPointMatrix(W, f"file:{source}")


def load_two_point(path) -> TwoPointMatrix:
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"two-point file {str(path)!r} does not exist")
    return parse_two_point(path.read_text(), str(path))


def format_two_point(tp: TwoPointMatrix) -> str:
    out = [f"# {tp.provenance}" if tp.provenance else "# two-point matrix", str(tp.d_test)]
    for row in tp.W:
        out.append(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row))
    return "\n".join(out) + "\n"


def save_two_point(tp: TwoPointMatrix, path) -> None:
    Path(path).write_text(format_two_point(tp))


def parse_smearing(text: str, grid, source: str = "<string>") -> SmearingSpec:
    blocks: list[dict] = []
    for lineno, line in _content_lines(text):
        key, *rest = line.split()
        where = f"{source}:{lineno}"
        if key == "term":
            blocks.append({"stencil": None, "axis": 0, "g": [], "f": None, "line": lineno})
            continue
        if not blocks:
            raise ConfigurationError(f"{where}: expected 'term' before {key!r}")
        b = blocks[-1]
        if key == "stencil":
            if rest == ["identity"]:
                b["stencil"] = {0: 1.0}
                continue
            st = {}
            for tok in rest:
                off, _, coef = tok.partition(":")
                try:
                    st[int(off)] = st.get(int(off), 0.0) + float(coef)
                except ValueError:
                    raise ConfigurationError(f"{where}: bad stencil entry {tok!r}") from None
            b["stencil"] = st
        elif key == "axis":
            b["axis"] = int(rest[0])
        elif key == "g":
            b["g"].append(_floats(rest, where))
        elif key == "f":
            b["f"] = _floats(rest, where)
        else:
            raise ConfigurationError(f"{where}: unknown key {key!r}")
    if not blocks:
        raise ConfigurationError(f"{source}: no smearing terms")
    n = int(np.prod(grid.shape))
    terms = []
    for b in blocks:
        if b["stencil"] is None:
            raise ConfigurationError(f"{source}:{b['line']}: term without a stencil")
        if bool(b["g"]) == (b["f"] is not None):
            raise ConfigurationError(f"{source}:{b['line']}: give either g lines or one f line")
        vecs = b["g"] or [b["f"]]
        if any(len(v) != n for v in vecs):
            raise ConfigurationError(f"{source}:{b['line']}: smearing values must have {n} entries")
        Q = stencil_matrix(b["stencil"], grid, b["axis"])
        if b["g"]:
            terms.append(SmearingTerm.from_squares(Q, b["g"]))
        else:
            terms.append(SmearingTerm(Q, np.array(b["f"])))
    return SmearingSpec(tuple(terms))


def load_smearing(path, grid) -> SmearingSpec:
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"smearing file {str(path)!r} does not exist")
    return parse_smearing(path.read_text(), grid, str(path))
