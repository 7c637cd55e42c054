"""Label dumps (binary PGM) and SVG renders of cells and deformed meshes.

PGM codes, one byte per lattice cell of the bounding raster:

    two-label    OUT = 0, IN = 255
    three-label  SOLID_MINUS = 0, VOID = 128, SOLID_PLUS = 255
    outside the domain = 64

The first PGM row is the top of the cell (largest y).
"""
from __future__ import annotations

import numpy as np

from voidcell.geometry import IN, OUT, SOLID_MINUS, SOLID_PLUS, VOID, LabelField

OUTSIDE = 64
TWO_CODES = {OUT: 0, IN: 255}
THREE_CODES = {SOLID_MINUS: 0, VOID: 128, SOLID_PLUS: 255}

_COLORS = {0: "#3b6ea5", 128: "#f4f1de", 255: "#c0504d", OUTSIDE: "#ffffff"}
_TWO_COLORS = {0: "#f4f1de", 255: "#3b6ea5", OUTSIDE: "#ffffff"}


def label_codes(field: LabelField) -> np.ndarray:
    """Raster of PGM codes, row 0 at the top."""
    codes = TWO_CODES if field.mode == "two" else THREE_CODES
    lut = np.zeros(3, dtype=np.uint8)
    for k, v in codes.items():
        lut[k] = v
    vals = lut[field.labels.astype(np.int64)]
    img = field.domain.raster(vals.astype(np.int16), fill=OUTSIDE).astype(np.uint8)
    return img[::-1]


def write_pgm(path, img: np.ndarray, comment: str | None = None) -> None:
    img = np.asarray(img, dtype=np.uint8)
    head = "P5\n"
    if comment:
        head += "".join(f"# {line}\n" for line in comment.splitlines())
    head += f"{img.shape[1]} {img.shape[0]}\n255\n"
    with open(path, "wb") as fh:
        fh.write(head.encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path) -> tuple[np.ndarray, list[str]]:
    """Image and comment lines of a binary PGM written by ``write_pgm``."""
    with open(path, "rb") as fh:
        data = fh.read()
    pos, tokens, comments = 0, [], []
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            end = data.index(b"\n", pos)
            comments.append(data[pos + 1:end].decode("ascii").strip())
            pos = end + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end].decode("ascii"))
        pos = end
    if tokens[0] != "P5":
        raise ValueError("not a binary PGM")
    w, h = int(tokens[1]), int(tokens[2])
    pos += 1
    img = np.frombuffer(data[pos:pos + w * h], dtype=np.uint8).reshape(h, w)
    return img.copy(), comments


def codes_svg(img: np.ndarray, cell_px=4, title: str | None = None, three_label=None) -> str:
    """SVG of a PGM code raster, one rect per horizontal run of equal codes."""
    img = np.asarray(img)
    if three_label is None:
        three_label = bool(np.any(img == 128))
    colors = _COLORS if three_label else _TWO_COLORS
    h, w = img.shape
    top = 16 if title else 0
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * cell_px}" '
           f'height="{h * cell_px + top}" shape-rendering="crispEdges">']
    if title:
        out.append(f'<text x="2" y="12" font-family="monospace" font-size="11">{title}</text>')
    for r in range(h):
        row = img[r]
        c = 0
        while c < w:
            v = row[c]
            e = c
            while e < w and row[e] == v:
                e += 1
            if v != OUTSIDE:
                col = colors.get(int(v), "#888888")
                out.append(f'<rect x="{c * cell_px}" y="{r * cell_px + top}" '
                           f'width="{(e - c) * cell_px}" height="{cell_px}" fill="{col}"/>')
            c = e
    out.append("</svg>")
    return "\n".join(out) + "\n"


def labels_svg(field: LabelField, cell_px=4, title=None) -> str:
    return codes_svg(label_codes(field), cell_px, title, three_label=field.mode == "three")


def deformed_mesh_svg(mesh, displacement, scale=0.2, size_px=480, max_lines=48,
                      title=None) -> str:
    """Lattice lines of the mesh moved by the in-plane displacement (scalar mode: none)."""
    nodes = mesh.nodes
    h = mesh.domain.spacing
    u = np.asarray(displacement, dtype=float).reshape(len(nodes), -1)
    if u.shape[1] == 1:
        u = np.zeros((len(nodes), 2))
    pos = nodes + scale * u
    ij = np.rint((nodes - np.asarray(mesh.domain.center)) / h).astype(np.int64)
    lo, hi = pos.min(axis=0), pos.max(axis=0)
    span = max(hi - lo) or 1.0
    top = 16 if title else 0
    px = lambda p: ((p[:, 0] - lo[0]) / span * (size_px - 8) + 4,
                    (hi[1] - p[:, 1]) / span * (size_px - 8) + 4 + top)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size_px}" height="{size_px + top}">']
    if title:
        out.append(f'<text x="2" y="12" font-family="monospace" font-size="11">{title}</text>')
    for axis in (0, 1):
        vals = np.unique(ij[:, axis])
        step = max(1, int(np.ceil(len(vals) / max_lines)))
        for v in vals[::step]:
            sel = np.nonzero(ij[:, axis] == v)[0]
            sel = sel[np.argsort(ij[sel, 1 - axis], kind="stable")]
            x, y = px(pos[sel])
            pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(x, y))
            out.append(f'<polyline points="{pts}" fill="none" stroke="#3b6ea5" stroke-width="0.7"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
