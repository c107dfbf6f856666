"""Corpus fidelity statistics: token frequencies, vocabulary diversity,
per-sentence hapax-legomena ratio, and shallow phrase-type distribution.

All statistics are pure functions of (corpus, config). The tokenizer is a
word-character-run pattern with a bundled, versioned stopword list whose
checksum is embedded in every report, since swapping the list changes the
numbers. The built-in part-of-speech tagger is a deliberately naive
placeholder (closed-class lexicon plus suffix heuristics); accurate phrase
distributions should come from an external tag sidecar.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .spans import Corpus

_DATA_DIR = Path(__file__).parent / "data"
DEFAULT_STOPWORD_LIST = "stopwords_en_v1"


class EmptyAfterFiltering(ValueError):
    pass


class MissingPos(KeyError):
    pass


def _load_stopwords(name: str) -> tuple[frozenset[str], str]:
    path = _DATA_DIR / f"{name}.txt"
    raw = path.read_bytes()
    words = frozenset(
        line.strip()
        for line in raw.decode("utf-8").splitlines()
        if line.strip() and not line.startswith("#")
    )
    return words, hashlib.sha256(raw).hexdigest()


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    token_pattern: str = r"\w+"
    stopword_list: str = DEFAULT_STOPWORD_LIST

    def stopwords(self) -> frozenset[str]:
        return _load_stopwords(self.stopword_list)[0]

    def stopword_checksum(self) -> str:
        return _load_stopwords(self.stopword_list)[1]


DEFAULT_CONFIG = TokenizerConfig()


def tokenize(text: str, config: TokenizerConfig = DEFAULT_CONFIG) -> list[str]:
    tokens = re.findall(config.token_pattern, text)
    if config.lowercase:
        tokens = [t.lower() for t in tokens]
    return tokens


def content_tokens(text: str, config: TokenizerConfig = DEFAULT_CONFIG) -> list[str]:
    """Tokens with stopwords removed (stopword matching is case-insensitive)."""
    stop = config.stopwords()
    return [t for t in tokenize(text, config) if t.lower() not in stop]


_SENTENCE_SPLIT = re.compile(r"[.!?]+(?:\s+|$)")


def split_sentences(text: str) -> list[str]:
    """Split on ., ! or ? followed by whitespace or end of text.

    A sample with no terminator is one sentence.
    """
    return [part for part in _SENTENCE_SPLIT.split(text) if part.strip()]


def token_frequencies(
    corpus: Corpus, config: TokenizerConfig = DEFAULT_CONFIG, k: int = 10
) -> list[tuple[str, int]]:
    """Top-k content tokens, descending by count, ties lexicographic."""
    if k < 1:
        raise ValueError("k must be >= 1")
    counts: Counter[str] = Counter()
    for sample in corpus:
        counts.update(content_tokens(sample.text, config))
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ordered[:k]


def vocab_diversity(corpus: Corpus, config: TokenizerConfig = DEFAULT_CONFIG) -> float:
    """Distinct types / total tokens over the whole corpus, stopwords removed."""
    total = 0
    types: set[str] = set()
    for sample in corpus:
        toks = content_tokens(sample.text, config)
        total += len(toks)
        types.update(toks)
    if total == 0:
        raise EmptyAfterFiltering("no tokens left after stopword filtering")
    return len(types) / total


@dataclass(frozen=True)
class HapaxReport:
    per_sentence: tuple[float, ...]
    mean: float


def hapax_ratio(corpus: Corpus, config: TokenizerConfig = DEFAULT_CONFIG) -> HapaxReport:
    """Share of once-occurring tokens per sentence, after stopword removal.

    Sentences with no remaining tokens are skipped; the mean runs over the
    retained sentences.
    """
    ratios: list[float] = []
    for sample in corpus:
        for sentence in split_sentences(sample.text):
            toks = content_tokens(sentence, config)
            if not toks:
                continue
            counts = Counter(toks)
            hapaxes = sum(1 for t in toks if counts[t] == 1)
            ratios.append(hapaxes / len(toks))
    mean = sum(ratios) / len(ratios) if ratios else 0.0
    return HapaxReport(per_sentence=tuple(ratios), mean=mean)


# -- shallow phrase chunking --

PHRASE_TYPES = ("NP", "VP", "PP", "SBAR")

_DETERMINERS = {
    "the", "a", "an", "this", "these", "those", "my", "your", "his", "her",
    "its", "our", "their", "some", "any", "no", "every", "each", "all", "both",
    "another", "such",
}
_PREPOSITIONS = {
    "of", "in", "on", "at", "by", "for", "with", "from", "to", "into", "onto",
    "over", "under", "about", "against", "between", "through", "during",
    "without", "within", "across", "behind", "beyond", "near", "after",
    "before", "around", "among", "toward", "towards", "off", "despite", "via",
}
_SUBORDINATORS = {
    "because", "although", "though", "while", "if", "unless", "since", "that",
    "whether", "until", "whereas", "once", "when", "where", "why", "how",
    "which", "who", "whom",
}
_PRONOUNS = {
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "us", "them",
    "someone", "everyone", "anyone", "nobody", "everybody", "anything",
    "everything", "nothing", "something", "what",
}
_CONJUNCTIONS = {"and", "or", "but", "nor", "yet"}
_ADVERBS = {
    "not", "never", "always", "often", "very", "too", "really", "just",
    "still", "also", "again", "soon", "now", "then", "here", "there", "even",
    "only", "already", "maybe", "probably", "actually", "literally",
}
_VERBS = {
    "is", "are", "was", "were", "be", "been", "being", "am", "do", "does",
    "did", "have", "has", "had", "can", "could", "will", "would", "shall",
    "should", "may", "might", "must", "go", "goes", "went", "gone", "get",
    "gets", "got", "make", "makes", "made", "say", "says", "said", "see",
    "sees", "saw", "seen", "know", "knows", "knew", "think", "thinks",
    "thought", "want", "wants", "need", "needs", "run", "runs", "ran", "come",
    "comes", "came", "take", "takes", "took", "give", "gives", "gave", "look",
    "looks", "use", "uses", "find", "finds", "found", "tell", "tells", "told",
    "ask", "asks", "seem", "seems", "feel", "feels", "felt", "try", "tries",
    "leave", "leaves", "left", "call", "calls", "keep", "keeps", "kept", "let",
    "lets", "begin", "begins", "began", "show", "shows", "hear", "hears",
    "heard", "play", "plays", "move", "moves", "live", "lives", "believe",
    "believes", "bring", "brings", "brought", "happen", "happens", "write",
    "writes", "wrote", "sit", "sits", "sat", "stand", "stands", "stood",
    "lose", "loses", "lost", "pay", "pays", "paid", "meet", "meets", "met",
    "win", "wins", "won", "fight", "fights", "fought", "argue", "argues",
    "claim", "claims", "blame", "blames", "send", "sends", "sent", "buy",
    "buys", "bought", "speak", "speaks", "spoke", "read", "reads", "grow",
    "grows", "grew", "fall", "falls", "fell", "stop", "stops", "put", "puts",
    "mean", "means", "meant", "die", "dies", "died", "kill", "kills", "stay",
    "stays", "turn", "turns", "burn", "burns", "hate", "hates", "love",
    "loves", "push", "pushes", "provide", "provides", "support", "supports",
}

_NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ity", "ance", "ence", "ship", "ism", "ist", "er", "or")
_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "ish", "less", "ian", "al", "ic")


def naive_pos_tag(tokens: Sequence[str]) -> list[tuple[str, str]]:
    """Closed-class lexicon plus suffix heuristics; everything else is a noun.

    Coarse tags: DT, PRP, IN, SC, CC, RB, VB, JJ, NN.
    """
    tagged: list[tuple[str, str]] = []
    for token in tokens:
        low = token.lower()
        if low in _DETERMINERS:
            tag = "DT"
        elif low in _SUBORDINATORS:
            tag = "SC"
        elif low in _PREPOSITIONS:
            tag = "IN"
        elif low in _PRONOUNS:
            tag = "PRP"
        elif low in _CONJUNCTIONS:
            tag = "CC"
        elif low in _ADVERBS:
            tag = "RB"
        elif low in _VERBS:
            tag = "VB"
        elif low.isdigit():
            tag = "JJ"
        elif low.endswith("ly"):
            tag = "RB"
        elif low.endswith(("ing", "ed")):
            tag = "VB"
        elif low.endswith(_NOUN_SUFFIXES):
            tag = "NN"
        elif low.endswith(_ADJ_SUFFIXES):
            tag = "JJ"
        else:
            tag = "NN"
        tagged.append((token, tag))
    return tagged


# Penn-style sidecar tags are folded onto the coarse set used by the grammar.
_PENN_FOLD = {
    "NN": "NN", "NNS": "NN", "NNP": "NN", "NNPS": "NN",
    "VB": "VB", "VBD": "VB", "VBG": "VB", "VBN": "VB", "VBP": "VB",
    "VBZ": "VB", "MD": "VB",
    "JJ": "JJ", "JJR": "JJ", "JJS": "JJ", "CD": "JJ",
    "DT": "DT", "PDT": "DT", "WDT": "DT",
    "RB": "RB", "RBR": "RB", "RBS": "RB",
    "PRP": "PRP", "PRP$": "DT", "WP": "PRP",
    "IN": "IN", "TO": "IN", "CC": "CC", "SC": "SC",
}


def fold_tag(tag: str, token: str = "") -> str:
    coarse = _PENN_FOLD.get(tag.upper(), tag.upper())
    if coarse == "IN" and token.lower() in _SUBORDINATORS:
        return "SC"
    return coarse


_CLAUSE_START = {"DT", "JJ", "NN", "PRP", "VB", "RB"}


def _np_end(tags: Sequence[str], i: int) -> int:
    """End of a DT? JJ* NN+ match starting at i, or i when none."""
    j = i
    if j < len(tags) and tags[j] == "DT":
        j += 1
    while j < len(tags) and tags[j] == "JJ":
        j += 1
    k = j
    while k < len(tags) and tags[k] == "NN":
        k += 1
    return k if k > j else i


def chunk_phrases(tagged: Sequence[tuple[str, str]]) -> Counter:
    """Count phrase chunks with a fixed regular grammar over coarse tags.

    NP: DT? JJ* NN+.  PP: IN immediately followed by an NP (the embedded NP
    is tallied on its own as well).  VP: a maximal VB run.  SBAR: an SC token
    followed by a clause start.
    """
    tags = [fold_tag(tag, token) for token, tag in tagged]
    counts: Counter = Counter()
    i = 0
    while i < len(tags):
        tag = tags[i]
        if tag == "SC" and i + 1 < len(tags) and tags[i + 1] in _CLAUSE_START:
            counts["SBAR"] += 1
            i += 1
            continue
        if tag == "IN" and _np_end(tags, i + 1) > i + 1:
            counts["PP"] += 1
            i += 1
            continue
        np_end = _np_end(tags, i)
        if np_end > i:
            counts["NP"] += 1
            i = np_end
            continue
        if tag == "VB":
            counts["VP"] += 1
            while i < len(tags) and tags[i] == "VB":
                i += 1
            continue
        i += 1
    return counts


PosSidecar = Mapping[str, Sequence[tuple[str, str]]]


def read_pos_sidecar(path: Path) -> dict[str, list[tuple[str, str]]]:
    """Tab-separated sidecar: sample_id, token, tag per line."""
    out: dict[str, list[tuple[str, str]]] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"sidecar line {line_no}: expected 3 tab-separated fields")
            sample_id, token, tag = parts
            out.setdefault(sample_id, []).append((token, tag))
    return out


def phrase_distribution(
    corpus: Corpus,
    pos: Optional[PosSidecar] = None,
    config: TokenizerConfig = DEFAULT_CONFIG,
) -> dict[str, float]:
    """Proportion of NP/VP/PP/SBAR chunks over the corpus.

    With a sidecar, every sample must be covered or MissingPos is raised;
    without one the naive tagger runs on the tokenizer's output. All-zero
    counts return zero proportions (normalization skipped).
    """
    totals: Counter = Counter()
    for sample in corpus:
        if pos is not None:
            if sample.sample_id not in pos:
                raise MissingPos(f"no POS tags for sample {sample.sample_id!r}")
            tagged = list(pos[sample.sample_id])
        else:
            tagged = naive_pos_tag(tokenize(sample.text, config))
        totals.update(chunk_phrases(tagged))
    grand = sum(totals.values())
    if grand == 0:
        return {name: 0.0 for name in PHRASE_TYPES}
    return {name: totals.get(name, 0) / grand for name in PHRASE_TYPES}


@dataclass(frozen=True)
class StatsReport:
    top_k: tuple[tuple[str, int], ...]
    vocab_diversity: float
    hapax: HapaxReport
    phrase_dist: Mapping[str, float]
    n_samples: int
    stopword_checksum: str
    config: TokenizerConfig = DEFAULT_CONFIG

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_samples": self.n_samples,
                "top_k": [[t, c] for t, c in self.top_k],
                "vocab_diversity": self.vocab_diversity,
                "hapax": {
                    "mean": self.hapax.mean,
                    "n_sentences": len(self.hapax.per_sentence),
                    "per_sentence": list(self.hapax.per_sentence),
                },
                "phrase_dist": dict(self.phrase_dist),
                "stopword_checksum": self.stopword_checksum,
                "tokenizer": {
                    "lowercase": self.config.lowercase,
                    "token_pattern": self.config.token_pattern,
                    "stopword_list": self.config.stopword_list,
                },
            },
            indent=2,
        )

    def hapax_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["sentence_index", "hapax_ratio"])
        for i, ratio in enumerate(self.hapax.per_sentence):
            writer.writerow([i, f"{ratio:.6f}"])
        return buf.getvalue()

    def phrase_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["phrase_type", "proportion"])
        for name in PHRASE_TYPES:
            writer.writerow([name, f"{self.phrase_dist.get(name, 0.0):.6f}"])
        return buf.getvalue()


def compute_stats(
    corpus: Corpus,
    config: TokenizerConfig = DEFAULT_CONFIG,
    k: int = 10,
    pos: Optional[PosSidecar] = None,
) -> StatsReport:
    try:
        diversity = vocab_diversity(corpus, config)
    except EmptyAfterFiltering:
        diversity = 0.0
    return StatsReport(
        top_k=tuple(token_frequencies(corpus, config, k)) if len(corpus) else (),
        vocab_diversity=diversity,
        hapax=hapax_ratio(corpus, config),
        phrase_dist=phrase_distribution(corpus, pos, config),
        n_samples=len(corpus),
        stopword_checksum=config.stopword_checksum(),
    )
