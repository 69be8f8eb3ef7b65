"""Text normalization into marker tokens.

Pipeline (fixed order): lowercase, category abstraction of token-shaped
spans, whitespace + punctuation tokenization with category tokens kept
intact, then suffix stripping of purely alphabetic tokens.
"""

from __future__ import annotations

import re
import string
import warnings
from dataclasses import dataclass, replace
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

from coorank.porter import stem

URL_TOKEN = "<url>"
PATH_TOKEN = "<path>"
SYMBOL_TOKEN = "<symbol>"
EXT_TOKEN = "<ext>"
NUMBER_TOKEN = "<number>"
ADDRESS_TOKEN = "<address>"

CATEGORY_TOKENS = frozenset({
    URL_TOKEN, PATH_TOKEN, SYMBOL_TOKEN, EXT_TOKEN, NUMBER_TOKEN,
    ADDRESS_TOKEN,
})

# com/net/org left out so bare domains tokenize as words instead.
KNOWN_EXTENSIONS = frozenset("""
    7z apk asc avi bak bash bat bin bmp bz2 c cab cc cert cfg conf cpp crt
    css csv dat db deb diff dll doc docx dts el exe flac flv gif go gz h
    hh hpp htm html ico img ini iso jar java jpeg jpg js json key ko list
    lock log lua md mkv mov mp3 mp4 msi odt ods ogg old patc pdf pem php
    pl png ppt ps pub py pyc rar rb rpm rs rtf sh sig so sql srt svg swp
    tar tex tgz tif tmp ts tsv txt vdi vhd war wav wmv xls xlsx xml xz
    yaml yml zip
""".split())

# kept out of the strip set: ~ and / (path markers), < and > (category
# token delimiters)
_STRIP_CHARS = "".join(c for c in string.punctuation if c not in "~/<>")

_URL_RE = re.compile(r"[a-z][a-z0-9+.\-]*://")
_WWW_RE = re.compile(r"^\W*www\.")
_IPV4_RE = re.compile(r"\d{1,3}(?:\.\d{1,3}){3}")
_HOSTPORT_RE = re.compile(r"([a-z0-9][\w.\-]*):\d{1,5}")
_NUMBER_RE = re.compile(r"\d+(?:[.,:]\d+)*")
_EXT_RE = re.compile(r"[a-z0-9][\w.\-]*\.([a-z0-9]{1,4})")
_WORD_RE = re.compile(r"[^\W_]+")
_ALNUM_RE = re.compile(r"[^\W_]")


def _is_path(chunk: str) -> bool:
    if chunk.startswith("~/"):
        return True
    if "/" not in chunk:
        return False
    return len([seg for seg in chunk.split("/") if seg]) >= 2


def _is_hostport(core: str) -> bool:
    m = _HOSTPORT_RE.fullmatch(core)
    if m is None:
        return False
    host = m.group(1)
    return bool(re.search(r"[a-z]", host)) or bool(_IPV4_RE.fullmatch(host))


def _abstract_chunk(chunk: str) -> str | None:
    """Classify one whitespace-delimited chunk, most specific class first."""
    if chunk in CATEGORY_TOKENS:
        return chunk
    if _URL_RE.search(chunk) or _WWW_RE.match(chunk):
        return URL_TOKEN
    core = chunk.strip(_STRIP_CHARS)
    if core in CATEGORY_TOKENS:
        return core
    if _IPV4_RE.fullmatch(core) or _is_hostport(core):
        return ADDRESS_TOKEN
    if _is_path(chunk):
        return PATH_TOKEN
    m = _EXT_RE.fullmatch(core)
    if m is not None and m.group(1) in KNOWN_EXTENSIONS:
        return EXT_TOKEN
    if _NUMBER_RE.fullmatch(core):
        return NUMBER_TOKEN
    if not _ALNUM_RE.search(chunk):
        return SYMBOL_TOKEN
    return None


@lru_cache(maxsize=16384)
def _normalize_cached(text: str) -> tuple[str, ...]:
    tokens: list[str] = []
    for chunk in text.lower().split():
        abstracted = _abstract_chunk(chunk)
        if abstracted is not None:
            tokens.append(abstracted)
            continue
        for word in _WORD_RE.findall(chunk):
            if word.isascii() and word.isalpha():
                word = stem(word)
            if word:
                tokens.append(word)
    return tuple(tokens)


def normalize(text: str) -> list[str]:
    """Normalize raw text to a (possibly empty) marker token sequence."""
    return list(_normalize_cached(text))


@dataclass(frozen=True)
class FilterLists:
    """Marker sets ignored by the coordination measure."""

    stopwords: frozenset[str]
    interjections: frozenset[str]
    number_words: frozenset[str]
    common_words: frozenset[str] = frozenset()

    @cached_property
    def ignore_set(self) -> frozenset[str]:
        return (
            self.stopwords
            | self.interjections
            | self.number_words
            | self.common_words
        )

    def with_common_words(self, words: Iterable[str]) -> "FilterLists":
        return replace(self, common_words=frozenset(words))

    @classmethod
    def bundled(cls) -> "FilterLists":
        data = resources.files("coorank").joinpath("data")
        return cls(
            stopwords=_parse_filter_lines(
                data.joinpath("stopwords.txt").read_text("utf-8").splitlines(),
                "stopwords.txt",
            ),
            interjections=_parse_filter_lines(
                data.joinpath("interjections.txt").read_text("utf-8").splitlines(),
                "interjections.txt",
            ),
            number_words=_parse_filter_lines(
                data.joinpath("number_words.txt").read_text("utf-8").splitlines(),
                "number_words.txt",
            ),
        )


def _parse_filter_lines(lines: Iterable[str], source: str) -> frozenset[str]:
    markers: set[str] = set()
    for raw in lines:
        token = raw.split("#", 1)[0].strip()
        if not token:
            continue
        normalized = normalize(token)
        if normalized == [token]:
            markers.add(token)
        elif token.isascii() and token.isalpha() and token.islower():
            # stemming is not idempotent (because -> becaus -> becau), so
            # an already-stemmed entry may still re-stem; keep both forms.
            markers.add(token)
            markers.update(normalized)
        else:
            warnings.warn(
                f"{source}: token {token!r} is not pre-normalized, "
                f"using {normalized!r}",
                stacklevel=2,
            )
            markers.update(normalized)
    return frozenset(markers)


def load_filter_file(path: str | Path) -> frozenset[str]:
    """Load a one-marker-per-line filter file; `#` starts a comment."""
    text = Path(path).read_text(encoding="utf-8")
    return _parse_filter_lines(text.splitlines(), str(path))


def marker_types(tokens: Iterable[str], filters: FilterLists) -> set[str]:
    """Distinct markers carrying coordination signal.

    Category tokens are abstraction artifacts, not lexical choices, so
    they are always dropped along with the configured ignore set.
    """
    ignore = filters.ignore_set
    return {
        t for t in tokens if t not in CATEGORY_TOKENS and t not in ignore
    }
