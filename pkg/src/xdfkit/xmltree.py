"""Minimal element/text XML tree used for stream metadata.

XDF metadata is element-based: a node has a name, optional text, and ordered
children. Attributes are rare but must not be lost, so they are preserved as
synthetic children named ``@attr:<name>`` and turned back into attributes on
serialization, which makes parse/serialize a lossless pair. Since XML gives
attributes no position among child elements, ``@attr:`` children always come
first in a parsed node.
"""

from __future__ import annotations

import xml.parsers.expat
from dataclasses import dataclass, field

from .errors import FormatError

ATTR_PREFIX = "@attr:"

_ESCAPES = {"&": "&amp;", "<": "&lt;", ">": "&gt;"}
_ATTR_ESCAPES = {**_ESCAPES, '"': "&quot;"}


@dataclass
class XmlNode:
    name: str
    text: str = ""
    children: list["XmlNode"] = field(default_factory=list)

    def child(self, name: str) -> "XmlNode | None":
        """First direct child with the given name, or None."""
        for c in self.children:
            if c.name == name:
                return c
        return None

    def text_of(self, name: str, default: str = "") -> str:
        c = self.child(name)
        return c.text if c is not None else default

    def find_all(self, name: str) -> list["XmlNode"]:
        return [c for c in self.children if c.name == name]

    def to_dict(self) -> dict:
        """Nested plain-dict form, used by the JSON metadata endpoint."""
        return {
            "name": self.name,
            "text": self.text,
            "children": [c.to_dict() for c in self.children],
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, XmlNode):
            return NotImplemented
        return (
            self.name == other.name
            and self.text == other.text
            and self.children == other.children
        )


def element(name: str, text: str = "", children: list[XmlNode] | None = None) -> XmlNode:
    return XmlNode(name, text, children or [])


class _TreeBuilder:
    def __init__(self) -> None:
        self.root: XmlNode | None = None
        self.stack: list[XmlNode] = []
        self.texts: list[list[str]] = []

    def start(self, name: str, attrs: dict[str, str]) -> None:
        node = XmlNode(name)
        for aname, avalue in attrs.items():
            node.children.append(XmlNode(ATTR_PREFIX + aname, avalue))
        if self.stack:
            self.stack[-1].children.append(node)
        elif self.root is None:
            self.root = node
        self.stack.append(node)
        self.texts.append([])

    def end(self, name: str) -> None:
        node = self.stack.pop()
        raw = "".join(self.texts.pop())
        node.text = raw if raw.strip() else ""

    def chars(self, data: str) -> None:
        if self.texts:
            self.texts[-1].append(data)


def parse_xml(text: str | bytes) -> XmlNode:
    """Parse one XML fragment (declaration optional) into an XmlNode tree.

    Attributes become ``@attr:<name>`` children; whitespace-only text is
    dropped. Raises FormatError carrying the byte position on malformed input.
    """
    parser = xml.parsers.expat.ParserCreate()
    builder = _TreeBuilder()
    parser.StartElementHandler = builder.start
    parser.EndElementHandler = builder.end
    parser.CharacterDataHandler = builder.chars
    parser.buffer_text = True
    try:
        parser.Parse(text, True)
    except xml.parsers.expat.ExpatError as exc:
        raise FormatError(
            f"malformed XML at byte {parser.ErrorByteIndex}: "
            f"{xml.parsers.expat.errors.messages[parser.ErrorCode]}"
        ) from exc
    if builder.root is None:
        raise FormatError("malformed XML at byte 0: no root element")
    return builder.root


def _escape(value: str, table: dict[str, str]) -> str:
    for ch, rep in table.items():
        if ch in value:
            value = value.replace(ch, rep)
    return value


def serialize_xml(node: XmlNode) -> str:
    """Canonical single-line serialization: text first, then children.

    ``@attr:`` children are emitted as attributes, so serialize(parse(x))
    reparses to the same tree.
    """
    parts: list[str] = []
    _write(node, parts)
    return "".join(parts)


def _write(node: XmlNode, parts: list[str]) -> None:
    attrs: list[str] = []
    children: list[XmlNode] = []
    for c in node.children:
        if c.name.startswith(ATTR_PREFIX):
            attrs.append(f' {c.name[len(ATTR_PREFIX):]}="{_escape(c.text, _ATTR_ESCAPES)}"')
        else:
            children.append(c)
    open_tag = f"<{node.name}{''.join(attrs)}"
    if not node.text and not children:
        parts.append(open_tag + "/>")
        return
    parts.append(open_tag + ">")
    if node.text:
        parts.append(_escape(node.text, _ESCAPES))
    for c in children:
        _write(c, parts)
    parts.append(f"</{node.name}>")
