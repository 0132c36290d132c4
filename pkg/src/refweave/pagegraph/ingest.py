"""PDF ingestion: content streams + link annotations -> PageGraph.

Text comes straight from the content streams (lossless for born-digital
files); coordinates are flipped to a top-left origin once, here. Scanned
documents surface as NoTextLayer.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path as FsPath

from ..errors import NoTextLayer, UnreadablePdf
from . import _stdfonts
from .model import Box, LinkAnnotation, Page, PageGraph, TextRun
from .order import mark_superscripts, reading_order
from .pdfread import Name, PdfReader, _Lexer


@dataclass
class _FontInfo:
    widths: list[int]
    default_width: int
    ascent: float  # per mille
    descent: float
    codec: str

    def decode(self, raw: bytes) -> str:
        return raw.decode(self.codec, errors="replace")

    def width(self, code: int) -> float:
        if 0 <= code < len(self.widths) and self.widths[code] > 0:
            return self.widths[code]
        return self.default_width


_FALLBACK_FONT = _FontInfo(
    widths=[],
    default_width=_stdfonts.DEFAULT_WIDTH,
    ascent=_stdfonts.DEFAULT_ASCENT,
    descent=_stdfonts.DEFAULT_DESCENT,
    codec="latin-1",
)


def _codec_for(encoding) -> str:
    if encoding == "WinAnsiEncoding":
        return "cp1252"
    if encoding == "MacRomanEncoding":
        return "mac-roman"
    return "latin-1"


def _font_info(reader: PdfReader, font_dict: dict | None) -> _FontInfo:
    if not isinstance(font_dict, dict):
        return _FALLBACK_FONT
    subtype = font_dict.get(Name("Subtype"))
    if subtype == "Type0":
        # CID fonts need a CMap machinery we don't carry; runs are skipped.
        return _FontInfo([], 0, 0, 0, "latin-1")
    base = str(reader.resolve(font_dict.get(Name("BaseFont"))) or "")
    base = re.sub(r"^[A-Z]{6}\+", "", base)
    encoding = reader.resolve(font_dict.get(Name("Encoding")))
    if isinstance(encoding, dict):
        encoding = reader.resolve(encoding.get(Name("BaseEncoding")))
    codec = _codec_for(encoding)

    widths = reader.resolve(font_dict.get(Name("Widths")))
    first = reader.resolve(font_dict.get(Name("FirstChar")))
    ascent, descent = _stdfonts.ASCENT_DESCENT.get(
        base, (_stdfonts.DEFAULT_ASCENT, _stdfonts.DEFAULT_DESCENT)
    )
    if isinstance(widths, list) and isinstance(first, int):
        table = [0] * 256
        for i, w in enumerate(widths):
            code = first + i
            if 0 <= code < 256 and isinstance(w, (int, float)):
                table[code] = int(w)
        desc = reader.resolve(font_dict.get(Name("FontDescriptor")))
        if isinstance(desc, dict):
            a = reader.resolve(desc.get(Name("Ascent")))
            d = reader.resolve(desc.get(Name("Descent")))
            if isinstance(a, (int, float)) and a > 0:
                ascent = float(a)
            if isinstance(d, (int, float)) and d < 0:
                descent = float(d)
        missing = reader.resolve(desc.get(Name("MissingWidth"))) if isinstance(desc, dict) else None
        default = int(missing) if isinstance(missing, (int, float)) else _stdfonts.DEFAULT_WIDTH
        return _FontInfo(table, default, ascent, descent, codec)
    if base in _stdfonts.WIDTHS:
        return _FontInfo(
            _stdfonts.WIDTHS[base], _stdfonts.DEFAULT_WIDTH, ascent, descent, codec
        )
    return _FontInfo([], _stdfonts.DEFAULT_WIDTH, ascent, descent, codec)


class _Matrix:
    """2x3 affine [a b c d e f]; we only honour scale + translation."""

    __slots__ = ("a", "b", "c", "d", "e", "f")

    def __init__(self, a=1.0, b=0.0, c=0.0, d=1.0, e=0.0, f=0.0):
        self.a, self.b, self.c, self.d, self.e, self.f = a, b, c, d, e, f

    def multiply(self, other: "_Matrix") -> "_Matrix":
        return _Matrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.e * other.a + self.f * other.c + other.e,
            self.e * other.b + self.f * other.d + other.f,
        )

    def apply(self, x: float, y: float) -> tuple[float, float]:
        return (self.a * x + self.c * y + self.e, self.b * x + self.d * y + self.f)

    def is_axis_aligned(self) -> bool:
        return abs(self.b) < 1e-6 and abs(self.c) < 1e-6 and self.a > 0 and self.d > 0

    def copy(self) -> "_Matrix":
        return _Matrix(self.a, self.b, self.c, self.d, self.e, self.f)


@dataclass
class _RawRun:
    text: str
    x0: float
    x1: float
    baseline: float  # PDF coordinates, bottom-left origin
    size: float
    ascent: float
    descent: float


_OPERATOR_RE = re.compile(rb"[A-Za-z'\"][A-Za-z0-9*']*")


def _tokenize_content(data: bytes):
    """Yield ('op', name) and ('operand', value) items from a content stream."""
    lexer = _Lexer(data, 0)
    n = len(data)
    while True:
        lexer.skip_ws()
        if lexer.pos >= n:
            return
        c = data[lexer.pos]
        if c in b"/([<" or c in b"+-." or (48 <= c <= 57):
            try:
                yield ("operand", lexer.parse_object())
            except UnreadablePdf:
                lexer.pos += 1
            continue
        m = _OPERATOR_RE.match(data, lexer.pos)
        if m:
            lexer.pos = m.end()
            yield ("op", m.group(0))
            continue
        lexer.pos += 1  # unknown byte; skip


class _TextExtractor:
    def __init__(self, reader: PdfReader, fonts: dict, page_height: float):
        self.reader = reader
        self.fonts = fonts
        self.height = page_height
        self.runs: list[_RawRun] = []
        self.ctm = _Matrix()
        self.ctm_stack: list[_Matrix] = []
        self.tm = _Matrix()
        self.tlm = _Matrix()
        self.font: _FontInfo = _FALLBACK_FONT
        self.font_size = 0.0
        self.char_spacing = 0.0
        self.word_spacing = 0.0
        self.horiz_scale = 1.0
        self.leading = 0.0
        self.rise = 0.0

    def run(self, content: bytes) -> list[_RawRun]:
        operands: list = []
        for kind, value in _tokenize_content(content):
            if kind == "operand":
                operands.append(value)
                continue
            try:
                self._execute(value, operands)
            except (IndexError, TypeError, ValueError):
                pass  # tolerate malformed operator usage
            operands = []
        return self.runs

    def _execute(self, op: bytes, args: list) -> None:
        if op == b"q":
            self.ctm_stack.append(self.ctm.copy())
        elif op == b"Q":
            if self.ctm_stack:
                self.ctm = self.ctm_stack.pop()
        elif op == b"cm":
            self.ctm = _Matrix(*map(float, args[-6:])).multiply(self.ctm)
        elif op == b"BT":
            self.tm = _Matrix()
            self.tlm = _Matrix()
        elif op == b"Tf":
            name = args[-2]
            self.font = self.fonts.get(str(name), _FALLBACK_FONT)
            self.font_size = float(args[-1])
        elif op == b"Td":
            self._translate_line(float(args[-2]), float(args[-1]))
        elif op == b"TD":
            self.leading = -float(args[-1])
            self._translate_line(float(args[-2]), float(args[-1]))
        elif op == b"Tm":
            self.tm = _Matrix(*map(float, args[-6:]))
            self.tlm = self.tm.copy()
        elif op == b"T*":
            self._translate_line(0.0, -self.leading)
        elif op == b"TL":
            self.leading = float(args[-1])
        elif op == b"Tc":
            self.char_spacing = float(args[-1])
        elif op == b"Tw":
            self.word_spacing = float(args[-1])
        elif op == b"Tz":
            self.horiz_scale = float(args[-1]) / 100.0
        elif op == b"Ts":
            self.rise = float(args[-1])
        elif op == b"Tj":
            self._show(args[-1])
        elif op == b"'":
            self._translate_line(0.0, -self.leading)
            self._show(args[-1])
        elif op == b'"':
            self.word_spacing = float(args[-3])
            self.char_spacing = float(args[-2])
            self._translate_line(0.0, -self.leading)
            self._show(args[-1])
        elif op == b"TJ":
            self._show_array(args[-1])

    def _translate_line(self, tx: float, ty: float) -> None:
        self.tlm = _Matrix(1, 0, 0, 1, tx, ty).multiply(self.tlm)
        self.tm = self.tlm.copy()

    def _advance_width(self, raw: bytes) -> float:
        """Advance in text space for a shown string, before Tm scaling."""
        total = 0.0
        for code in raw:
            w = self.font.width(code) / 1000.0 * self.font_size
            w += self.char_spacing
            if code == 32:
                w += self.word_spacing
            total += w
        return total * self.horiz_scale

    def _emit(self, raw: bytes) -> float:
        trm = self.tm.multiply(self.ctm)
        advance = self._advance_width(raw)
        if not raw:
            return advance
        if not self.font.widths and self.font.default_width == 0:
            return advance  # Type0: width unknown, skip text
        text = self.font.decode(raw)
        if trm.is_axis_aligned() and text.strip():
            x0, baseline = trm.apply(0.0, self.rise)
            x1, _ = trm.apply(advance, self.rise)
            size = self.font_size * trm.a
            self.runs.append(
                _RawRun(
                    text=text,
                    x0=x0,
                    x1=x1,
                    baseline=baseline,
                    size=size,
                    ascent=self.font.ascent / 1000.0 * size,
                    descent=self.font.descent / 1000.0 * size,
                )
            )
        return advance

    def _show(self, raw) -> None:
        if not isinstance(raw, bytes):
            return
        advance = self._emit(raw)
        self.tm = _Matrix(1, 0, 0, 1, advance, 0).multiply(self.tm)

    def _show_array(self, items) -> None:
        if not isinstance(items, list):
            return
        # One run per TJ op: concatenate the strings, fold kern adjustments
        # into the advance.
        parts: list[bytes] = []
        advance = 0.0
        for item in items:
            if isinstance(item, bytes):
                parts.append(item)
                advance += self._advance_width(item)
            elif isinstance(item, (int, float)):
                advance -= item / 1000.0 * self.font_size * self.horiz_scale
        raw = b"".join(parts)
        if raw:
            trm = self.tm.multiply(self.ctm)
            text = self.font.decode(raw)
            if trm.is_axis_aligned() and text.strip() and (self.font.widths or self.font.default_width):
                x0, baseline = trm.apply(0.0, self.rise)
                x1, _ = trm.apply(advance, self.rise)
                size = self.font_size * trm.a
                self.runs.append(
                    _RawRun(
                        text=text,
                        x0=x0,
                        x1=x1,
                        baseline=baseline,
                        size=size,
                        ascent=self.font.ascent / 1000.0 * size,
                        descent=self.font.descent / 1000.0 * size,
                    )
                )
        self.tm = _Matrix(1, 0, 0, 1, advance, 0).multiply(self.tm)


def _page_fonts(reader: PdfReader, page: dict) -> dict:
    resources = reader.resolve(page.get(Name("Resources")))
    fonts = {}
    if isinstance(resources, dict):
        font_map = reader.resolve(resources.get(Name("Font")))
        if isinstance(font_map, dict):
            for name, ref in font_map.items():
                fonts[str(name)] = _font_info(reader, reader.resolve(ref))
    return fonts


def _media_size(reader: PdfReader, page: dict) -> tuple[float, float]:
    box = reader.resolve(page.get(Name("MediaBox")))
    if not isinstance(box, list) or len(box) != 4:
        return 612.0, 792.0
    vals = [float(reader.resolve(v)) for v in box]
    return abs(vals[2] - vals[0]), abs(vals[3] - vals[1])


def _dest_target(reader: PdfReader, dest, heights: list[float]) -> tuple[int, float, float] | None:
    """Resolve a destination to (page index, x, y) in top-left coordinates."""
    if isinstance(dest, (bytes, Name)):
        dest = reader.lookup_named_dest(dest if isinstance(dest, bytes) else str(dest))
    dest = reader.resolve(dest)
    if isinstance(dest, dict):  # /D inside a dest dictionary
        dest = reader.resolve(dest.get(Name("D")))
    if not isinstance(dest, list) or not dest:
        return None
    page_index = reader.page_index_of(dest[0])
    if page_index is None:
        return None
    height = heights[page_index]
    fit = str(dest[1]) if len(dest) > 1 else "Fit"
    args = [reader.resolve(a) for a in dest[2:]]

    def num(i: int, default: float) -> float:
        if i < len(args) and isinstance(args[i], (int, float)):
            return float(args[i])
        return default

    if fit == "XYZ":
        return page_index, num(0, 0.0), height - num(1, height)
    if fit == "FitH" or fit == "FitBH":
        return page_index, 0.0, height - num(0, height)
    if fit == "FitV" or fit == "FitBV":
        return page_index, num(0, 0.0), 0.0
    if fit == "FitR":
        return page_index, num(0, 0.0), height - num(3, height)
    return page_index, 0.0, 0.0  # Fit / FitB: top of page


def _page_links(
    reader: PdfReader, page: dict, index: int, heights: list[float]
) -> list[LinkAnnotation]:
    annots = reader.resolve(page.get(Name("Annots")))
    links: list[LinkAnnotation] = []
    if not isinstance(annots, list):
        return links
    height = heights[index]
    for ref in annots:
        annot = reader.resolve(ref)
        if not isinstance(annot, dict) or annot.get(Name("Subtype")) != "Link":
            continue
        rect = reader.resolve(annot.get(Name("Rect")))
        if not isinstance(rect, list) or len(rect) != 4:
            continue
        xs = sorted((float(reader.resolve(rect[0])), float(reader.resolve(rect[2]))))
        ys = sorted((float(reader.resolve(rect[1])), float(reader.resolve(rect[3]))))
        if xs[0] >= xs[1] or ys[0] >= ys[1]:
            continue
        source_rect = Box(
            round(xs[0], 3), round(height - ys[1], 3), round(xs[1], 3), round(height - ys[0], 3)
        )

        dest = annot.get(Name("Dest"))
        uri = None
        if dest is None:
            action = reader.resolve(annot.get(Name("A")))
            if isinstance(action, dict):
                s = action.get(Name("S"))
                if s == "GoTo":
                    dest = action.get(Name("D"))
                elif s == "URI":
                    uri = action.get(Name("URI"))
        if dest is not None:
            target = _dest_target(reader, dest, heights)
            if target is None:
                continue
            tpage, tx, ty = target
            links.append(
                LinkAnnotation(
                    source_page=index,
                    source_rect=source_rect,
                    target_page=tpage,
                    target_point=(round(tx, 3), round(ty, 3)),
                    kind="internal",
                )
            )
        elif uri is not None:
            links.append(
                LinkAnnotation(
                    source_page=index,
                    source_rect=source_rect,
                    target_page=-1,
                    target_point=(0.0, 0.0),
                    kind="external",
                )
            )
    return links


def _clamp_run(raw: _RawRun, width: float, height: float) -> TextRun | None:
    y_top = height - (raw.baseline + raw.ascent)
    y_bot = height - (raw.baseline + raw.descent)
    x0 = max(raw.x0, 0.0)
    x1 = min(raw.x1, width + 1.0)
    y0 = max(y_top, 0.0)
    y1 = min(y_bot, height + 1.0)
    if x0 >= x1 or y0 >= y1 or raw.size <= 0:
        return None
    return TextRun(
        text=raw.text,
        bbox=Box(round(x0, 3), round(y0, 3), round(x1, 3), round(y1, 3)),
        font_size=round(raw.size, 3),
        baseline_y=round(height - raw.baseline, 3),
    )


def ingest_pdf(path: str | FsPath) -> PageGraph:
    """Read a born-digital PDF into a PageGraph.

    Raises UnreadablePdf on parse failure, EncryptedPdf for encrypted input
    and NoTextLayer when no page yields a single text run.
    """
    path = FsPath(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise UnreadablePdf(f"cannot read {path}: {exc}") from exc
    reader = PdfReader(data)
    page_dicts = reader.pages()
    sizes = [_media_size(reader, p) for p in page_dicts]
    heights = [h for _, h in sizes]
    graph = PageGraph(source_id=path.stem)
    total_runs = 0
    for index, page_dict in enumerate(page_dicts):
        width, height = sizes[index]
        extractor = _TextExtractor(reader, _page_fonts(reader, page_dict), height)
        try:
            content = reader.content_bytes(page_dict)
        except UnreadablePdf:
            content = b""
        raw_runs = extractor.run(content)
        page = Page(index=index, width=width, height=height)
        for raw in raw_runs:
            run = _clamp_run(raw, width, height)
            if run is not None:
                page.runs.append(run)
        total_runs += len(page.runs)
        page.links = _page_links(reader, page_dict, index, heights)
        graph.pages.append(page)
    if total_runs == 0:
        raise NoTextLayer(f"{path.name}: no extractable text (scanned input?)")
    for page in graph.pages:
        reading_order(page)
        mark_superscripts(page)
    return graph
