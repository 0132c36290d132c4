"""Minimal reader for born-digital PDFs.

Scope: enough of ISO 32000 to pull positioned text and link annotations out
of well-formed, unencrypted files - classic cross-reference tables or none
(objects are located by a sequential scan), FlateDecode streams, simple
single-byte fonts. Scanned pages, Type0/CID text and rotated content are
out of scope and are skipped rather than guessed at.
"""

from __future__ import annotations

import base64
import re
import zlib
from dataclasses import dataclass
from typing import Any

from ..errors import EncryptedPdf, UnreadablePdf

_WHITESPACE = b"\x00\t\n\x0c\r "
_DELIMITERS = b"()<>[]{}/%"


@dataclass(frozen=True)
class Ref:
    num: int
    gen: int


class Name(str):
    """A PDF name object; subclass so /Foo is distinct from the string 'Foo'."""

    __slots__ = ()


@dataclass
class Stream:
    dict: dict
    raw: bytes

    def data(self, reader: "PdfReader") -> bytes:
        filters = reader.resolve(self.dict.get(Name("Filter")))
        if filters is None:
            return self.raw
        if not isinstance(filters, list):
            filters = [filters]
        data = self.raw
        for f in filters:
            if f == "FlateDecode":
                try:
                    data = zlib.decompress(data)
                except zlib.error as exc:
                    raise UnreadablePdf(f"bad FlateDecode stream: {exc}") from exc
            elif f == "ASCII85Decode":
                try:
                    data = base64.a85decode(data.strip(), adobe=data.strip().endswith(b"~>"))
                except ValueError as exc:
                    raise UnreadablePdf(f"bad ASCII85 stream: {exc}") from exc
            elif f == "ASCIIHexDecode":
                text = re.sub(rb"[^0-9A-Fa-f]", b"", data.split(b">")[0])
                if len(text) % 2:
                    text += b"0"
                data = bytes.fromhex(text.decode("ascii"))
            else:
                raise UnreadablePdf(f"unsupported stream filter {f}")
        return data


class _Lexer:
    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def skip_ws(self) -> None:
        data, n = self.data, len(self.data)
        while self.pos < n:
            c = data[self.pos]
            if c in _WHITESPACE:
                self.pos += 1
            elif c == 0x25:  # '%' comment runs to end of line
                eol = data.find(b"\n", self.pos)
                self.pos = n if eol < 0 else eol + 1
            else:
                return

    def peek_keyword(self) -> bytes:
        self.skip_ws()
        m = re.compile(rb"[A-Za-z']+").match(self.data, self.pos)
        return m.group(0) if m else b""

    def expect_keyword(self, word: bytes) -> None:
        self.skip_ws()
        if not self.data.startswith(word, self.pos):
            raise UnreadablePdf(f"expected {word!r} at offset {self.pos}")
        self.pos += len(word)

    def parse_object(self) -> Any:
        self.skip_ws()
        data = self.data
        if self.pos >= len(data):
            raise UnreadablePdf("unexpected end of file")
        c = data[self.pos]
        if c == 0x2F:  # /Name
            return self._parse_name()
        if c == 0x28:  # (string)
            return self._parse_literal_string()
        if c == 0x3C:  # << dict or <hex>
            if data.startswith(b"<<", self.pos):
                return self._parse_dict()
            return self._parse_hex_string()
        if c == 0x5B:  # [ array
            return self._parse_array()
        if data.startswith(b"true", self.pos):
            self.pos += 4
            return True
        if data.startswith(b"false", self.pos):
            self.pos += 5
            return False
        if data.startswith(b"null", self.pos):
            self.pos += 4
            return None
        return self._parse_number_or_ref()

    def _parse_name(self) -> Name:
        self.pos += 1
        out = bytearray()
        data = self.data
        while self.pos < len(data):
            c = data[self.pos]
            if c in _WHITESPACE or c in _DELIMITERS:
                break
            if c == 0x23 and self.pos + 2 < len(data):  # #xx escape
                try:
                    out.append(int(data[self.pos + 1 : self.pos + 3], 16))
                    self.pos += 3
                    continue
                except ValueError:
                    pass
            out.append(c)
            self.pos += 1
        return Name(out.decode("latin-1"))

    def _parse_literal_string(self) -> bytes:
        self.pos += 1
        out = bytearray()
        depth = 1
        data = self.data
        while self.pos < len(data):
            c = data[self.pos]
            if c == 0x5C:  # backslash escape
                self.pos += 1
                if self.pos >= len(data):
                    break
                e = data[self.pos]
                mapping = {0x6E: 0x0A, 0x72: 0x0D, 0x74: 0x09, 0x62: 0x08, 0x66: 0x0C}
                if e in mapping:
                    out.append(mapping[e])
                    self.pos += 1
                elif e in b"()\\":
                    out.append(e)
                    self.pos += 1
                elif e in b"01234567":
                    octal = bytearray()
                    while len(octal) < 3 and self.pos < len(data) and data[self.pos] in b"01234567":
                        octal.append(data[self.pos])
                        self.pos += 1
                    out.append(int(octal, 8) & 0xFF)
                elif e in b"\r\n":  # line continuation
                    self.pos += 1
                    if e == 0x0D and self.pos < len(data) and data[self.pos] == 0x0A:
                        self.pos += 1
                else:
                    out.append(e)
                    self.pos += 1
                continue
            if c == 0x28:
                depth += 1
            elif c == 0x29:
                depth -= 1
                if depth == 0:
                    self.pos += 1
                    return bytes(out)
            out.append(c)
            self.pos += 1
        raise UnreadablePdf("unterminated string")

    def _parse_hex_string(self) -> bytes:
        end = self.data.find(b">", self.pos)
        if end < 0:
            raise UnreadablePdf("unterminated hex string")
        text = re.sub(rb"[^0-9A-Fa-f]", b"", self.data[self.pos + 1 : end])
        self.pos = end + 1
        if len(text) % 2:
            text += b"0"
        return bytes.fromhex(text.decode("ascii"))

    def _parse_dict(self) -> dict:
        self.pos += 2
        out: dict = {}
        while True:
            self.skip_ws()
            if self.data.startswith(b">>", self.pos):
                self.pos += 2
                return out
            key = self.parse_object()
            if not isinstance(key, Name):
                raise UnreadablePdf(f"dictionary key is not a name at offset {self.pos}")
            out[key] = self.parse_object()

    def _parse_array(self) -> list:
        self.pos += 1
        out = []
        while True:
            self.skip_ws()
            if self.pos >= len(self.data):
                raise UnreadablePdf("unterminated array")
            if self.data[self.pos] == 0x5D:
                self.pos += 1
                return out
            out.append(self.parse_object())

    _NUM_RE = re.compile(rb"[+-]?(?:\d+\.?\d*|\.\d+)")
    _REF_RE = re.compile(rb"(\d+)[\x00\t\n\x0c\r ]+(\d+)[\x00\t\n\x0c\r ]+R\b")

    def _parse_number_or_ref(self) -> Any:
        m = self._REF_RE.match(self.data, self.pos)
        if m:
            self.pos = m.end()
            return Ref(int(m.group(1)), int(m.group(2)))
        m = self._NUM_RE.match(self.data, self.pos)
        if not m:
            raise UnreadablePdf(f"cannot parse object at offset {self.pos}")
        self.pos = m.end()
        token = m.group(0)
        if b"." in token:
            return float(token)
        return int(token)


_OBJ_RE = re.compile(rb"(\d+)[\x00\t\n\x0c\r ]+(\d+)[\x00\t\n\x0c\r ]+obj\b")
_TRAILER_RE = re.compile(rb"trailer\b")


class PdfReader:
    """Parsed object soup plus the document structure hanging off /Root."""

    def __init__(self, data: bytes):
        if data[:1024].find(b"%PDF-") < 0:
            raise UnreadablePdf("missing %PDF header")
        self.data = data
        self.objects: dict[tuple[int, int], Any] = {}
        self._scan_objects()
        if not self.objects:
            raise UnreadablePdf("no objects found")
        self.trailer = self._find_trailer()
        if self.trailer and Name("Encrypt") in self.trailer:
            raise EncryptedPdf("document is encrypted")
        self.catalog = self._find_catalog()

    def _scan_objects(self) -> None:
        # Sequential scan instead of the xref table: parse each object fully
        # (including stream bodies) so matches inside streams are skipped.
        pos = 0
        data = self.data
        while True:
            m = _OBJ_RE.search(data, pos)
            if not m:
                return
            lexer = _Lexer(data, m.end())
            try:
                value = lexer.parse_object()
                if isinstance(value, dict) and lexer.peek_keyword() == b"stream":
                    value = self._read_stream(value, lexer)
            except UnreadablePdf:
                pos = m.end()
                continue
            key = (int(m.group(1)), int(m.group(2)))
            self.objects[key] = value  # incremental updates: the last write wins
            pos = lexer.pos

    def _read_stream(self, sdict: dict, lexer: _Lexer) -> Stream:
        lexer.expect_keyword(b"stream")
        data = self.data
        pos = lexer.pos
        if data.startswith(b"\r\n", pos):
            pos += 2
        elif data.startswith(b"\n", pos) or data.startswith(b"\r", pos):
            pos += 1
        length = self.resolve(sdict.get(Name("Length")))
        raw = None
        if isinstance(length, int) and length >= 0 and pos + length <= len(data):
            candidate = data[pos : pos + length]
            tail = data[pos + length : pos + length + 20]
            if re.match(rb"[\x00\t\n\x0c\r ]*endstream", tail):
                raw = candidate
                lexer.pos = pos + length
        if raw is None:  # /Length missing or wrong: fall back to the delimiter
            end = data.find(b"endstream", pos)
            if end < 0:
                raise UnreadablePdf("unterminated stream")
            raw = data[pos:end].rstrip(b"\r\n")
            lexer.pos = end
        lexer.expect_keyword(b"endstream")
        return Stream(sdict, raw)

    def _find_trailer(self) -> dict | None:
        merged: dict = {}
        for m in _TRAILER_RE.finditer(self.data):
            lexer = _Lexer(self.data, m.end())
            try:
                t = lexer.parse_object()
            except UnreadablePdf:
                continue
            if isinstance(t, dict):
                merged.update(t)
        return merged or None

    def _find_catalog(self) -> dict:
        if self.trailer:
            root = self.resolve(self.trailer.get(Name("Root")))
            if isinstance(root, dict):
                return root
        for value in self.objects.values():
            if isinstance(value, dict) and value.get(Name("Type")) == "Catalog":
                return value
        raise UnreadablePdf("no document catalog")

    def resolve(self, obj: Any, _depth: int = 0) -> Any:
        while isinstance(obj, Ref):
            if _depth > 32:
                raise UnreadablePdf("reference loop")
            obj = self.objects.get((obj.num, obj.gen))
            _depth += 1
        return obj

    # -- page tree -----------------------------------------------------------

    _INHERITED = (Name("MediaBox"), Name("Resources"), Name("Rotate"))

    def pages(self) -> list[dict]:
        """Flattened page dictionaries with inherited attributes filled in."""
        self.page_refs: list[Ref | None] = []
        out: list[dict] = []
        root = self.resolve(self.catalog.get(Name("Pages")))
        if not isinstance(root, dict):
            raise UnreadablePdf("catalog has no page tree")

        def walk(node: dict, ref: Ref | None, inherited: dict, depth: int) -> None:
            if depth > 64:
                raise UnreadablePdf("page tree too deep")
            attrs = dict(inherited)
            for key in self._INHERITED:
                if key in node:
                    attrs[key] = node[key]
            if node.get(Name("Type")) == "Pages" or Name("Kids") in node:
                kids = self.resolve(node.get(Name("Kids"))) or []
                for kid in kids:
                    kid_ref = kid if isinstance(kid, Ref) else None
                    kid_node = self.resolve(kid)
                    if isinstance(kid_node, dict):
                        walk(kid_node, kid_ref, attrs, depth + 1)
            else:
                page = dict(node)
                page.update({k: v for k, v in attrs.items() if k not in node})
                out.append(page)
                self.page_refs.append(ref)

        walk(root, None, {}, 0)
        if not out:
            raise UnreadablePdf("document has no pages")
        return out

    def page_index_of(self, ref_or_page: Any) -> int | None:
        if isinstance(ref_or_page, Ref):
            for i, ref in enumerate(self.page_refs):
                if ref == ref_or_page:
                    return i
        if isinstance(ref_or_page, int):
            return ref_or_page if 0 <= ref_or_page < len(self.page_refs) else None
        return None

    def content_bytes(self, page: dict) -> bytes:
        contents = self.resolve(page.get(Name("Contents")))
        if contents is None:
            return b""
        if isinstance(contents, Stream):
            return contents.data(self)
        if isinstance(contents, list):
            parts = []
            for ref in contents:
                item = self.resolve(ref)
                if isinstance(item, Stream):
                    parts.append(item.data(self))
            return b"\n".join(parts)
        return b""

    # -- named destinations ----------------------------------------------------

    def lookup_named_dest(self, name: bytes | str) -> Any:
        if isinstance(name, bytes):
            name = name.decode("latin-1")
        dests = self.resolve(self.catalog.get(Name("Dests")))
        if isinstance(dests, dict) and Name(name) in dests:
            return self.resolve(dests[Name(name)])
        names = self.resolve(self.catalog.get(Name("Names")))
        if isinstance(names, dict):
            tree = self.resolve(names.get(Name("Dests")))
            found = self._search_name_tree(tree, name, 0)
            if found is not None:
                return found
        return None

    def _search_name_tree(self, node: Any, name: str, depth: int) -> Any:
        if not isinstance(node, dict) or depth > 64:
            return None
        pairs = self.resolve(node.get(Name("Names")))
        if isinstance(pairs, list):
            for key, value in zip(pairs[::2], pairs[1::2]):
                key = key.decode("latin-1") if isinstance(key, bytes) else str(key)
                if key == name:
                    return self.resolve(value)
        kids = self.resolve(node.get(Name("Kids"))) or []
        for kid in kids:
            found = self._search_name_tree(self.resolve(kid), name, depth + 1)
            if found is not None:
                return found
        return None
