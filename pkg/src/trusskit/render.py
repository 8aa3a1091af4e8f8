"""Deterministic SVG pictures of stratified 1- and 2-trusses, and text slices.

Layout: element ``i`` of the level-1 fiber sits at abscissa ``i``; singular
elements are vertical lines, regular elements are bands reaching to the
neighbouring lines.  Inside each column the level-2 fiber is spread evenly over
the height.  Colors come from a hash of the stratum name, so they do not change
between runs.
"""

from __future__ import annotations

import colorsys
import hashlib
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .errors import DimensionUnsupported
from .poset import sort_key
from .strat import StratTruss
from .truss import TrussBundle


@dataclass(frozen=True)
class RenderOptions:
    unit: float = 40.0
    height: float = 200.0
    margin: float = 20.0
    emphasize: frozenset = frozenset()  # labels drawn in black
    labels: bool = True


def stratum_color(name) -> str:
    digest = hashlib.sha256(repr(name).encode("utf-8")).digest()
    hue = int.from_bytes(digest[:2], "big") % 360
    r, g, b = colorsys.hls_to_rgb(hue / 360, 0.75, 0.6)
    return "#{:02x}{:02x}{:02x}".format(round(r * 255), round(g * 255), round(b * 255))


def _num(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _points(pts) -> str:
    return " ".join(f"{_num(x)},{_num(y)}" for x, y in pts)


class _Canvas:
    def __init__(self, width: float, height: float):
        self.width, self.height = width, height
        self.items: list[str] = []

    def add(self, tag: str, **attrs) -> None:
        text = attrs.pop("text", None)
        parts = " ".join(f'{k.rstrip("_").replace("_", "-")}="{escape(str(v))}"' for k, v in attrs.items())
        if text is None:
            self.items.append(f"<{tag} {parts}/>")
        else:
            self.items.append(f"<{tag} {parts}>{escape(text)}</{tag}>")

    def to_bytes(self) -> bytes:
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(self.width)}" height="{_num(self.height)}" '
            f'viewBox="0 0 {_num(self.width)} {_num(self.height)}">\n'
        )
        return (head + "".join(f" {it}\n" for it in self.items) + "</svg>\n").encode("utf-8")


def _style(X: StratTruss, x: tuple, opts: RenderOptions) -> tuple[str, bool]:
    name = X.stratum_of[x]
    strong = X.labeling[x] in opts.emphasize
    return ("black" if strong else stratum_color(name)), strong


def _render_1(X: StratTruss, opts: RenderOptions) -> bytes:
    word = X.bundle.fiber(())
    u, mg = opts.unit, opts.margin
    width = (len(word) + 1) * u + 2 * mg
    cv = _Canvas(width, 3 * mg + u)
    y = mg + u / 2

    def xpos(i: float) -> float:
        return mg + (i + 1) * u

    for i, letter in enumerate(word):
        if letter == "R":
            color, strong = _style(X, (i,), opts)
            cv.add("line", x1=_num(xpos(i - 1)), y1=_num(y), x2=_num(xpos(i + 1)), y2=_num(y),
                   stroke=color, stroke_width=6 if strong else 4)
    for i, letter in enumerate(word):
        if letter == "S":
            color, strong = _style(X, (i,), opts)
            cv.add("circle", cx=_num(xpos(i)), cy=_num(y), r=6 if strong else 4, fill=color, stroke="black")
    if opts.labels:
        for i in range(len(word)):
            cv.add("text", x=_num(xpos(i)), y=_num(y + u / 2 + mg / 2), font_size=10, text_anchor="middle",
                   text=str(X.labeling[(i,)]))
    return cv.to_bytes()


def _render_2(X: StratTruss, opts: RenderOptions) -> bytes:
    B = X.bundle
    base_word = B.fiber(())
    u, mg, H = opts.unit, opts.margin, opts.height
    L = len(base_word)
    width = (L + 1) * u + 2 * mg
    cv = _Canvas(width, H + 2 * mg)

    def xpos(i: float) -> float:
        return mg + (i + 1) * u

    def ypos(col: int, j: float) -> float:
        m = len(B.fiber((col,)))
        return mg + H - (j + 1) * H / (m + 1)

    def singular_image(r: int, s: int, a: int) -> int:
        """Singular element over ``s`` related to singular ``a`` over ``r``."""
        images = [b for (p, b) in B.rel((r,), (s,)) if p == a and B.fiber((s,))[b] == "S"]
        return min(images)

    def strand_path(r: int, a: int) -> list[tuple[float, float]]:
        pts = []
        left, right = r - 1, r + 1
        if left >= 0:
            pts.append((xpos(left), ypos(left, singular_image(r, left, a))))
        else:
            pts.append((xpos(r - 1), ypos(r, a)))
        pts.append((xpos(r), ypos(r, a)))
        if right < L:
            pts.append((xpos(right), ypos(right, singular_image(r, right, a))))
        else:
            pts.append((xpos(r + 1), ypos(r, a)))
        return pts

    bottom, top_y = mg + H, mg
    # regions: regular over regular
    for r, letter in enumerate(base_word):
        if letter != "R":
            continue
        w = B.fiber((r,))
        xs = [xpos(r - 1), xpos(r), xpos(r + 1)]
        for j, lj in enumerate(w):
            if lj != "R":
                continue
            lower = strand_path(r, j - 1) if j > 0 else [(x, bottom) for x in xs]
            upper = strand_path(r, j + 1) if j + 1 < len(w) else [(x, top_y) for x in xs]
            color, _ = _style(X, (r, j), opts)
            cv.add("polygon", points=_points(lower + upper[::-1]), fill=color, stroke="none")
    # strands: singular over regular
    for r, letter in enumerate(base_word):
        if letter != "R":
            continue
        for j, lj in enumerate(B.fiber((r,))):
            if lj == "S":
                color, strong = _style(X, (r, j), opts)
                cv.add("polyline", points=_points(strand_path(r, j)), fill="none", stroke=color,
                       stroke_width=4 if strong else 2)
    # vertical lines: regular over singular, then points
    for s, letter in enumerate(base_word):
        if letter != "S":
            continue
        w = B.fiber((s,))
        for j, lj in enumerate(w):
            if lj != "R":
                continue
            y0 = ypos(s, j - 1) if j > 0 else bottom
            y1 = ypos(s, j + 1) if j + 1 < len(w) else top_y
            color, strong = _style(X, (s, j), opts)
            cv.add("line", x1=_num(xpos(s)), y1=_num(y0), x2=_num(xpos(s)), y2=_num(y1), stroke=color,
                   stroke_width=4 if strong else 2)
        for j, lj in enumerate(w):
            if lj == "S":
                color, strong = _style(X, (s, j), opts)
                cv.add("circle", cx=_num(xpos(s)), cy=_num(ypos(s, j)), r=6 if strong else 4, fill=color,
                       stroke="black")
    return cv.to_bytes()


def render_svg(X: StratTruss, opts: RenderOptions | None = None) -> bytes:
    """SVG bytes for a stratified truss of dimension at most 2."""
    opts = opts or RenderOptions()
    if not X.bundle.is_truss:
        raise DimensionUnsupported("only trusses (not bundles over a base) are drawn")
    if X.n >= 3:
        raise DimensionUnsupported(f"SVG rendering is limited to n <= 2 (got n = {X.n}); use the text slices")
    if X.n == 0:
        cv = _Canvas(2 * opts.margin + opts.unit, 2 * opts.margin + opts.unit)
        color, strong = _style(X, (), opts)
        c = opts.margin + opts.unit / 2
        cv.add("circle", cx=_num(c), cy=_num(c), r=6 if strong else 4, fill=color, stroke="black")
        return cv.to_bytes()
    if X.n == 1:
        return _render_1(X, opts)
    return _render_2(X, opts)


def slices_text(B: TrussBundle, labeling: dict | None = None) -> str:
    """One line per fiber, level by level; with labels if given."""
    lines = []
    for i, lvl in enumerate(B.levels, start=1):
        lines.append(f"level {i}:")
        for p in sorted(lvl.fibers, key=sort_key):
            key = "-".join(map(str, p)) or "."
            w = lvl.fibers[p]
            line = f"  {key}: {w}"
            if labeling is not None and i == B.n:
                line += "  [" + " ".join(str(labeling[p + (j,)]) for j in range(len(w))) + "]"
            lines.append(line)
    return "\n".join(lines) + "\n"


__all__ = ["RenderOptions", "render_svg", "slices_text", "stratum_color"]
