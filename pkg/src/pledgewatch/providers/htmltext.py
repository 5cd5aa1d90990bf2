"""Main-text extraction from HTML without external dependencies.

Strips script/style and obvious boilerplate containers (nav, header,
footer, aside, form), prefers <article> content when present, and pulls
title and publication date from page metadata when available.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from datetime import date
from html.parser import HTMLParser

_SKIP_TAGS = {"script", "style", "noscript", "template", "svg", "iframe"}
_BOILERPLATE_TAGS = {"nav", "header", "footer", "aside", "form", "button"}
_BLOCK_TAGS = {"p", "li", "h1", "h2", "h3", "h4", "blockquote", "figcaption", "td"}

_DATE_META_KEYS = {
    "article:published_time",
    "article:published",
    "og:published_time",
    "date",
    "publication_date",
    "publish-date",
    "pubdate",
    "dc.date",
    "dc.date.issued",
    "datepublished",
    "parsely-pub-date",
}
_ISO_PREFIX = re.compile(r"(\d{4})-(\d{2})-(\d{2})")


@dataclass
class ExtractedPage:
    title: str
    publication_date: date | None
    body: str


class _PageParser(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.title_parts: list[str] = []
        self.meta_title: str | None = None
        self.date_candidates: list[str] = []
        self.blocks: list[str] = []
        self.article_blocks: list[str] = []
        self._skip_depth = 0
        self._boiler_depth = 0
        self._article_depth = 0
        self._in_title = False
        self._current: list[str] = []
        self._block_depth = 0
        self._in_ldjson = False
        self._ldjson_parts: list[str] = []

    def handle_starttag(self, tag, attrs):
        attrs = dict(attrs)
        if tag in _SKIP_TAGS:
            self._skip_depth += 1
            if tag == "script" and attrs.get("type", "").lower() == "application/ld+json":
                self._in_ldjson = True
            return
        if tag in _BOILERPLATE_TAGS:
            self._boiler_depth += 1
            return
        if tag == "article":
            self._article_depth += 1
        if tag == "title":
            self._in_title = True
        if tag == "meta":
            key = (attrs.get("property") or attrs.get("name") or attrs.get("itemprop") or "").lower()
            content = attrs.get("content", "")
            if key in _DATE_META_KEYS and content:
                self.date_candidates.append(content)
            if key == "og:title" and content:
                self.meta_title = content
        if tag == "time" and attrs.get("datetime"):
            self.date_candidates.append(attrs["datetime"])
        if tag in _BLOCK_TAGS and not self._skip_depth and not self._boiler_depth:
            self._block_depth += 1

    def handle_endtag(self, tag):
        if tag in _SKIP_TAGS:
            self._skip_depth = max(0, self._skip_depth - 1)
            if tag == "script" and self._in_ldjson:
                self._in_ldjson = False
                self._harvest_ldjson()
            return
        if tag in _BOILERPLATE_TAGS:
            self._boiler_depth = max(0, self._boiler_depth - 1)
            return
        if tag == "article":
            self._article_depth = max(0, self._article_depth - 1)
        if tag == "title":
            self._in_title = False
        if tag in _BLOCK_TAGS and self._block_depth:
            self._block_depth -= 1
            if not self._block_depth:
                self._flush_block()

    def handle_data(self, data):
        if self._in_ldjson:
            self._ldjson_parts.append(data)
            return
        if self._skip_depth or self._boiler_depth:
            return
        if self._in_title:
            self.title_parts.append(data)
            return
        if self._block_depth:
            self._current.append(data)

    def _flush_block(self):
        text = " ".join(" ".join(self._current).split())
        self._current = []
        if not text:
            return
        self.blocks.append(text)
        if self._article_depth:
            self.article_blocks.append(text)

    def _harvest_ldjson(self):
        raw = "".join(self._ldjson_parts)
        self._ldjson_parts = []
        try:
            data = json.loads(raw)
        except (json.JSONDecodeError, ValueError):
            return
        nodes = data if isinstance(data, list) else [data]
        for node in nodes:
            if isinstance(node, dict) and node.get("datePublished"):
                self.date_candidates.append(str(node["datePublished"]))


def _parse_date(candidates: list[str]) -> date | None:
    for value in candidates:
        match = _ISO_PREFIX.search(value)
        if not match:
            continue
        try:
            return date(int(match.group(1)), int(match.group(2)), int(match.group(3)))
        except ValueError:
            continue
    return None


def extract_page(html: str) -> ExtractedPage:
    """Title, best-effort publication date, and main body text."""
    parser = _PageParser()
    parser.feed(html)
    parser.close()
    blocks = parser.article_blocks or parser.blocks
    # Very short fragments are almost always chrome, not content.
    body = "\n\n".join(b for b in blocks if len(b) >= 20) or "\n\n".join(blocks)
    title = parser.meta_title or " ".join("".join(parser.title_parts).split())
    return ExtractedPage(
        title=title.strip(),
        publication_date=_parse_date(parser.date_candidates),
        body=body.strip(),
    )
