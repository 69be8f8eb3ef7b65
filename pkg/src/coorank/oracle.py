"""Independent brute-force reference for the reranking pipeline.

Everything here is written separately from the production modules so
the two paths cannot share a bug: its own tokenizer and chunk
classifier, a second table-driven suffix stripper, its own counting
loops, and a full decorate-and-sort rerank. Only closed data constants
(the category token strings and the known-extension set) and the plain
data containers are reused. Test-only; nothing in the package imports
this module.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping, Sequence

from coorank.corpus_io import Dialogue, ScoreTable
from coorank.reranker import RerankConfig
from coorank.textnorm import CATEGORY_TOKENS, KNOWN_EXTENSIONS, FilterLists

# ---------------------------------------------------------------------------
# suffix stripper, table-driven variant


def _form(word: str) -> str:
    """Per-letter consonant/vowel pattern, e.g. "troubl" -> "CCVVCC"."""
    out = []
    for i, ch in enumerate(word):
        if ch in "aeiou":
            out.append("V")
        elif ch == "y" and i > 0 and out[i - 1] == "C":
            out.append("V")
        else:
            out.append("C")
    return "".join(out)


def _m_of(stem: str) -> int:
    return len(re.findall(r"V+C+", _form(stem)))


def _contains_vowel(stem: str) -> bool:
    return "V" in _form(stem)


def _ends_cvc_not_wxy(stem: str) -> bool:
    return (
        len(stem) >= 3
        and _form(stem).endswith("CVC")
        and stem[-1] not in "wxy"
    )


def _ends_double_consonant(stem: str) -> bool:
    return len(stem) >= 2 and stem[-1] == stem[-2] and _form(stem)[-1] == "C"


def _pick_rule(word: str, rules: Sequence[tuple[str, str]]):
    matches = [rule for rule in rules if word.endswith(rule[0])]
    if not matches:
        return None
    return max(matches, key=lambda rule: len(rule[0]))


_STEP2 = [
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"),
    ("anci", "ance"), ("izer", "ize"), ("abli", "able"), ("alli", "al"),
    ("entli", "ent"), ("eli", "e"), ("ousli", "ous"), ("ization", "ize"),
    ("ation", "ate"), ("ator", "ate"), ("alism", "al"), ("iveness", "ive"),
    ("fulness", "ful"), ("ousness", "ous"), ("aliti", "al"),
    ("iviti", "ive"), ("biliti", "ble"),
]
_STEP3 = [
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
]
_STEP4 = [
    (s, "") for s in (
        "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
        "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive",
        "ize",
    )
]


def reference_stem(word: str) -> str:
    # step 1a
    for suffix, repl in (("sses", "ss"), ("ies", "i"), ("ss", "ss"),
                         ("s", "")):
        if word.endswith(suffix):
            word = word[: len(word) - len(suffix)] + repl
            break
    # step 1b with cleanup
    if word.endswith("eed"):
        if _m_of(word[:-3]) > 0:
            word = word[:-1]
    else:
        removed = False
        for suffix in ("ed", "ing"):
            if word.endswith(suffix) and _contains_vowel(
                word[: len(word) - len(suffix)]
            ):
                word = word[: len(word) - len(suffix)]
                removed = True
                break
        if removed:
            if word.endswith(("at", "bl", "iz")):
                word += "e"
            elif _ends_double_consonant(word) and word[-1] not in "lsz":
                word = word[:-1]
            elif _m_of(word) == 1 and _ends_cvc_not_wxy(word):
                word += "e"
    # step 1c
    if word.endswith("y") and _contains_vowel(word[:-1]):
        word = word[:-1] + "i"
    # steps 2-4: longest matching suffix decides, its condition gates
    for rules, condition in ((_STEP2, 1), (_STEP3, 1), (_STEP4, 2)):
        rule = _pick_rule(word, rules)
        if rule is not None:
            suffix, repl = rule
            stem = word[: len(word) - len(suffix)]
            if _m_of(stem) >= condition:
                if rules is _STEP4 and suffix == "ion" and (
                    not stem or stem[-1] not in "st"
                ):
                    pass
                else:
                    word = stem + repl
    # step 5a
    if word.endswith("e"):
        stem = word[:-1]
        m = _m_of(stem)
        if m > 1 or (m == 1 and not _ends_cvc_not_wxy(stem)):
            word = stem
    # step 5b
    if (
        _ends_double_consonant(word)
        and word.endswith("l")
        and _m_of(word) > 1
    ):
        word = word[:-1]
    return word


# ---------------------------------------------------------------------------
# normalization, re-derived from the documented pipeline

_PUNCT = set("!\"#$%&'()*+,-.:;=?@[\\]^_`{|}")


def _strip_punct(chunk: str) -> str:
    start, end = 0, len(chunk)
    while start < end and chunk[start] in _PUNCT:
        start += 1
    while end > start and chunk[end - 1] in _PUNCT:
        end -= 1
    return chunk[start:end]


def _looks_like_ipv4(text: str) -> bool:
    parts = text.split(".")
    return len(parts) == 4 and all(
        part.isdigit() and 1 <= len(part) <= 3 for part in parts
    )


def _looks_like_number(text: str) -> bool:
    if not text:
        return False
    groups = re.split(r"[.,:]", text)
    return all(group.isdigit() and group for group in groups)


def _classify(chunk: str) -> str | None:
    if chunk in CATEGORY_TOKENS:
        return chunk
    if "://" in chunk and re.search(r"[a-z][a-z0-9+.\-]*://", chunk):
        return "<url>"
    if re.match(r"^\W*www\.", chunk):
        return "<url>"
    core = _strip_punct(chunk)
    if core in CATEGORY_TOKENS:
        return core
    if _looks_like_ipv4(core):
        return "<address>"
    if core.count(":") == 1:
        host, _, port = core.partition(":")
        if (
            port.isdigit() and 1 <= len(port) <= 5
            and re.fullmatch(r"[a-z0-9][\w.\-]*", host)
            and (any(c.isalpha() for c in host) or _looks_like_ipv4(host))
        ):
            return "<address>"
    if chunk.startswith("~/"):
        return "<path>"
    if "/" in chunk and sum(1 for seg in chunk.split("/") if seg) >= 2:
        return "<path>"
    if "." in core:
        name, _, ext = core.rpartition(".")
        if (
            ext in KNOWN_EXTENSIONS
            and re.fullmatch(r"[a-z0-9][\w.\-]*", name)
        ):
            return "<ext>"
    if _looks_like_number(core):
        return "<number>"
    if not any(ch.isalnum() for ch in chunk):
        return "<symbol>"
    return None


def reference_normalize(text: str) -> list[str]:
    tokens: list[str] = []
    for chunk in text.lower().split():
        label = _classify(chunk)
        if label is not None:
            tokens.append(label)
            continue
        word = ""
        for ch in chunk + " ":
            if ch.isalnum() and ch != "_":
                word += ch
            elif word:
                if word.isascii() and word.isalpha():
                    word = reference_stem(word)
                if word:
                    tokens.append(word)
                word = ""
    return tokens


def _ignored(filters: FilterLists) -> set[str]:
    ignore = set(filters.stopwords)
    ignore.update(filters.interjections)
    ignore.update(filters.number_words)
    ignore.update(filters.common_words)
    ignore.update(CATEGORY_TOKENS)
    return ignore


def reference_markers(texts: Iterable[str], filters: FilterLists) -> set[str]:
    ignore = _ignored(filters)
    found: set[str] = set()
    for text in texts:
        for token in reference_normalize(text):
            if token not in ignore:
                found.add(token)
    return found


# ---------------------------------------------------------------------------
# counting and scoring


def reference_stats(
    corpus: Iterable[Dialogue],
    extra_responses: Mapping[str, Sequence[str]] | None = None,
) -> tuple[dict[str, int], dict[str, int]]:
    """(count_total, count_response) recounted from scratch."""
    extra_responses = extra_responses or {}
    total: dict[str, int] = {}
    response: dict[str, int] = {}
    for dialogue in corpus:
        response_texts = [c.text for c in dialogue.candidates]
        response_texts += list(extra_responses.get(dialogue.dialogue_id, ()))
        for utterance in dialogue.context:
            for token in reference_normalize(utterance.text):
                total[token] = total.get(token, 0) + 1
        for text in response_texts:
            for token in reference_normalize(text):
                total[token] = total.get(token, 0) + 1
                response[token] = response.get(token, 0) + 1
    return total, response


def reference_rerank(
    corpus: Iterable[Dialogue],
    scores: ScoreTable,
    stats_total: Mapping[str, int],
    stats_response: Mapping[str, int],
    filters: FilterLists,
    cfg: RerankConfig,
) -> dict[str, list[tuple[str, float, float, float]]]:
    """Full rankings recomputed from first principles.

    Returns per dialogue the ranked (candidate_id, S, G, Coor) tuples
    at 6-decimal precision; tractable for small candidate lists only
    (full decorate-and-sort per dialogue). Bypassed dialogues and
    candidates frozen below the top N carry S = w_g*G and Coor = 0.
    """
    rankings: dict[str, list[tuple[str, float, float, float]]] = {}
    for dialogue in corpus:
        did = dialogue.dialogue_id
        pairs = [
            (cand, scores[(did, cand.candidate_id)])
            for cand in dialogue.candidates
        ]
        ordered = [
            pairs[i]
            for i in sorted(range(len(pairs)),
                            key=lambda i: (-pairs[i][1], i))
        ]
        if max(g for _, g in pairs) > cfg.bypass_threshold:
            rankings[did] = [
                (cand.candidate_id, round(cfg.w_g * g, 6), round(g, 6), 0.0)
                for cand, g in ordered
            ]
            continue

        context_markers = reference_markers(
            (u.text for u in dialogue.context), filters
        )
        decorated = []
        for position, (cand, g) in enumerate(ordered[: cfg.top_n]):
            overlap = sorted(
                m for m in reference_markers([cand.text], filters)
                if m in context_markers
            )
            credits = []
            for marker in overlap:
                p = (stats_response.get(marker, 0) + 1.0) / (
                    stats_total.get(marker, 0) + 1.0
                )
                credit = 1.0 - cfg.k * p
                if credit > 0.0:
                    credits.append(credit)
            coor = sum(credits) / len(credits) if credits else 0.0
            fused = cfg.w_g * g + cfg.w_coor * coor
            decorated.append((-fused, position, cand.candidate_id, g, coor))
        decorated.sort()
        rankings[did] = [
            (cid, round(-neg_fused, 6), round(g, 6), round(coor, 6))
            for neg_fused, _, cid, g, coor in decorated
        ] + [
            (cand.candidate_id, round(cfg.w_g * g, 6), round(g, 6), 0.0)
            for cand, g in ordered[cfg.top_n:]
        ]
    return rankings
