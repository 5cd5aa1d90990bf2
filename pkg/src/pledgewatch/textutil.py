"""Shared text machinery: tokenizers, sentence splitting, shallow chunking.

The noun-phrase chunker is deliberately lightweight: a coarse lexicon
tagger plus a determiner? (adjective|number)* noun+ pattern. It targets
short pledge claims, not arbitrary prose.
"""

from __future__ import annotations

import re

STOPWORDS = frozenset(
    """a an the and or but nor so yet of in on at by for with from to into onto over
    under about after before between during through since until within across against
    towards toward per via as is are was were be been being am do does did done has
    have had having will would shall should can could may might must not no this that
    these those it its they them their he she his her him we us our you your i me my
    who whom which what when where why how than then there here if because although
    while whether also just only very too still already such own same more most other
    some any all both each few many much several""".split()
)

_DETERMINERS = frozenset(
    """the a an this that these those my your his her its our their any some each
    every no all both few many much several most other another such""".split()
)
_PRONOUNS = frozenset(
    """i you he she it we they me him us them who whom which what someone anyone
    everyone nobody nothing something anything themselves itself himself herself
    myself yourself ourselves""".split()
)
_AUXILIARIES = frozenset(
    """will would shall should can could may might must do does did is are was were
    be been being am has have had""".split()
)
_PREPOSITIONS = frozenset(
    """of in on at by for with from to into onto over under about above after before
    between during through since until within across against towards toward per via
    as like near amid among around behind beyond despite except including""".split()
)
_CONJUNCTIONS = frozenset(
    """and or but nor so yet because although while if when than whether once
    unless""".split()
)
_ADVERBS = frozenset(
    """not never also already still just only very too now then here there further
    recently soon currently formerly newly almost nearly even again once more
    most""".split()
)
_ADJECTIVES = frozenset(
    """new great public private local national central major key good bad big small
    recent former current late early free full whole clear due illegal legal
    potential possible annual general main own same wild rural urban young old
    high low long short strong weak""".split()
)
_VERBS = frozenset(
    """ban bans banned build builds built deliver delivers delivered end ends ended
    capitalise capitalize create creates created cut cuts introduce introduces
    introduced ensure ensures ensured make makes made recruit recruits recruited
    invest invests invested reduce reduces reduced increase increases increased
    abolish abolishes abolished establish establishes established launch launches
    launched provide provides provided support supports supported protect protects
    protected improve improves improved reform reforms reformed scrap scraps
    scrapped halve halves halved double doubles doubled announce announces announced
    plan plans planned propose proposes proposed commit commits committed pledge
    pledges pledged promise promises promised win wins won hear hears heard publish
    publishes published receive receives received reject rejects rejected urge urges
    urged call calls called claim claims claimed say says said confirm confirms
    confirmed set sets take takes took taken bring brings brought give gives gave
    get gets got go goes went keep keeps kept put puts remain remains remained
    become becomes became lose loses lost tackle tackles tackled fund funds funded
    open opens opened close closes closed review reviews reviewed begin begins began
    start starts started stop stops stopped""".split()
)
_NUMBER_WORDS = frozenset(
    """one two three four five six seven eight nine ten eleven twelve thirteen
    fourteen fifteen sixteen seventeen eighteen nineteen twenty thirty forty fifty
    sixty seventy eighty ninety hundred""".split()
)
_ADJ_SUFFIXES = ("ous", "ful", "ive", "ic", "able", "ible", "ish", "less", "ary", "ial")

_NUM_RE = re.compile(r"^[£$€]?\d[\d,.]*\w*%?$")
_TOKEN_RE = re.compile(r"[£$€]?\d[\d,.]*\w*%?|[A-Za-z][A-Za-z'’\-]*|[^\sA-Za-z0-9£$€]")
_WORD_RE = re.compile(r"[a-z0-9]+")

_SENTENCE_END = re.compile(r"([.!?]+)(\s+|$)")
_ABBREVIATIONS = frozenset(
    """mr mrs ms dr prof sen rep st no vs etc fig gov dept approx inc ltd co
    jan feb mar apr jun jul aug sep sept oct nov dec e.g i.e u.k u.s""".split()
)


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric tokens; the shared unit for BM25 and TF-IDF."""
    return _WORD_RE.findall(text.lower())


def split_sentences(text: str) -> list[str]:
    """Rule-based sentence splitter on terminal punctuation.

    Guards against common abbreviations and single-letter initials so
    "Dr. Smith" and "J. Doe" do not split mid-name.
    """
    sentences = []
    start = 0
    for match in _SENTENCE_END.finditer(text):
        preceding = text[start:match.start()].rstrip()
        last_word = preceding.rsplit(None, 1)[-1].lower().lstrip("(\"'") if preceding else ""
        last_word = last_word.rstrip(".")
        if last_word in _ABBREVIATIONS or (len(last_word) == 1 and last_word.isalpha()):
            continue
        candidate = text[start:match.end()].strip()
        if candidate:
            sentences.append(candidate)
        start = match.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _tag(tokens: list[str]) -> list[str]:
    """Coarse part-of-speech tags; unknown words default to NOUN."""
    tags = []
    expect_verb = False
    for i, raw in enumerate(tokens):
        token = raw.lower()
        if not raw[0].isalnum() and raw[0] not in "£$€":
            tags.append("PUNCT")
            expect_verb = False
            continue
        if _NUM_RE.match(raw) or token in _NUMBER_WORDS:
            tags.append("NUM")
            continue
        if token in _DETERMINERS:
            tags.append("DET")
            expect_verb = False
            continue
        if token in _PRONOUNS:
            tags.append("PRON")
            continue
        if token in _AUXILIARIES:
            tags.append("AUX")
            expect_verb = True
            continue
        if token in _PREPOSITIONS:
            tags.append("ADP")
            expect_verb = False
            continue
        if token in _CONJUNCTIONS:
            tags.append("CONJ")
            continue
        if token in _ADVERBS:
            tags.append("ADV")
            continue
        if expect_verb:
            tags.append("VERB")
            expect_verb = False
            continue
        prev = tags[-1] if tags else None
        if prev in ("DET", "ADJ"):
            tags.append("ADJ" if _looks_adjectival(token) else "NOUN")
            continue
        if token in _VERBS:
            tags.append("VERB")
            continue
        if token.endswith("ed") and len(token) > 4:
            tags.append("VERB")
            continue
        tags.append("ADJ" if _looks_adjectival(token) else "NOUN")
    return tags


def _looks_adjectival(token: str) -> bool:
    return token in _ADJECTIVES or (len(token) > 4 and token.endswith(_ADJ_SUFFIXES))


def noun_phrases(text: str) -> list[str]:
    """Maximal determiner? (adjective|number)* noun+ chunks, lowercased.

    Chunks made only of stopwords are dropped; order of first appearance
    is kept and repeats are removed.
    """
    if not text or not text.strip():
        return []
    tokens = _TOKEN_RE.findall(text)
    tags = _tag(tokens)
    chunks: list[str] = []
    seen: set[str] = set()
    i = 0
    n = len(tokens)
    while i < n:
        if tags[i] not in ("DET", "ADJ", "NUM", "NOUN"):
            i += 1
            continue
        start = i
        if tags[i] == "DET":
            i += 1
        while i < n and tags[i] in ("ADJ", "NUM"):
            i += 1
        noun_start = i
        while i < n and tags[i] == "NOUN":
            i += 1
        if i == noun_start:  # no noun head; not a phrase
            i = start + 1
            continue
        words = [t.lower() for t in tokens[start:i]]
        if all(w in STOPWORDS for w in words):
            continue
        phrase = " ".join(words)
        if phrase not in seen:
            seen.add(phrase)
            chunks.append(phrase)
    return chunks
