"""CoNLL-U treebank ingestion and grammatical-relation extraction.

Parses the 10-column CoNLL-U format into immutable sentences and turns each
non-root token into a head-dependent relation instance labeled with its
universal dependency relation.
"""

from collections import Counter
from dataclasses import dataclass

from .errors import ConlluParseError

# The 36 universal relation labels: the full v2 inventory minus "root",
# which names the sentence head rather than a relation between two words.
UNIVERSAL_RELATIONS = frozenset(
    {
        "acl", "advcl", "advmod", "amod", "appos", "aux", "case", "cc",
        "ccomp", "clf", "compound", "conj", "cop", "csubj", "dep", "det",
        "discourse", "dislocated", "expl", "fixed", "flat", "goeswith",
        "iobj", "list", "mark", "nmod", "nsubj", "nummod", "obj", "obl",
        "orphan", "parataxis", "punct", "reparandum", "vocative", "xcomp",
    }
)

_NUM_COLUMNS = 10


@dataclass(frozen=True)
class Token:
    index: int  # 1-based position within the sentence
    form: str
    upos: str
    head: int  # 0 = sentence root
    deprel: str


@dataclass(frozen=True)
class Sentence:
    id: str
    tokens: tuple


@dataclass(frozen=True)
class RelationInstance:
    sentence_id: str
    head_index: int
    dep_index: int
    label: str


@dataclass(frozen=True)
class RejectedRelation:
    """A dropped instance whose label is outside the universal inventory."""

    sentence_id: str
    dep_index: int
    label: str


@dataclass(frozen=True)
class Treebank:
    language: str
    sentences: tuple
    label_inventory: frozenset  # raw non-root deprel strings present


def parse_conllu(text, language="und"):
    """Parse CoNLL-U text into a :class:`Treebank`.

    Accepts a string or any iterable of lines. Comment lines are kept only to
    recover ``# sent_id``; multiword-token ranges (``3-4``) and empty nodes
    (``1.1``) are skipped, so token indices refer to syntactic words.
    """
    if isinstance(text, str):
        lines = text.splitlines()
    else:
        lines = [line.rstrip("\n") for line in text]

    sentences = []
    labels = set()
    pending = []  # (line_number, columns) for the sentence being read
    pending_id = None

    def flush(last_line):
        nonlocal pending, pending_id
        if not pending:
            pending_id = None
            return
        sent_id = pending_id if pending_id is not None else str(len(sentences) + 1)
        tokens = []
        for lineno, cols in pending:
            try:
                index = int(cols[0])
            except ValueError:
                raise ConlluParseError(f"non-integer token id {cols[0]!r}", lineno)
            try:
                head = int(cols[6])
            except ValueError:
                raise ConlluParseError(f"non-integer head {cols[6]!r}", lineno)
            deprel = cols[7]
            if not deprel or deprel == "_":
                raise ConlluParseError("empty deprel", lineno)
            if head < 0:
                raise ConlluParseError(f"negative head {head}", lineno)
            tokens.append(Token(index=index, form=cols[1], upos=cols[3], head=head, deprel=deprel))
        n = len(tokens)
        if [t.index for t in tokens] != list(range(1, n + 1)):
            raise ConlluParseError(f"sentence {sent_id!r}: token ids not contiguous 1..{n}", last_line)
        roots = [t for t in tokens if t.head == 0]
        if len(roots) != 1:
            raise ConlluParseError(f"sentence {sent_id!r}: expected exactly one root, found {len(roots)}", last_line)
        for t in tokens:
            if t.head > n:
                raise ConlluParseError(f"sentence {sent_id!r}: head {t.head} exceeds sentence length {n}", last_line)
            if t.head != 0:
                labels.add(t.deprel)
        sentences.append(Sentence(id=sent_id, tokens=tuple(tokens)))
        pending = []
        pending_id = None

    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            flush(lineno)
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("sent_id") and "=" in body:
                pending_id = body.split("=", 1)[1].strip()
            continue
        cols = line.split("\t")
        if len(cols) != _NUM_COLUMNS:
            raise ConlluParseError(f"expected {_NUM_COLUMNS} tab-separated columns, got {len(cols)}", lineno)
        if "-" in cols[0] or "." in cols[0]:
            continue  # multiword-token range or empty node
        pending.append((lineno, cols))
    flush(len(lines))

    return Treebank(language=language, sentences=tuple(sentences), label_inventory=frozenset(labels))


def strip_subtype(label):
    """Reduce a possibly language-specific label to its universal part."""
    return label.split(":", 1)[0]


def extract_relations(tb, strip_subtypes=True):
    """One :class:`RelationInstance` per non-root token, in treebank order.

    Returns ``(instances, rejects)``: tokens whose label falls outside the
    universal inventory (after optional subtype stripping) are dropped and
    reported rather than silently kept.
    """
    instances = []
    rejects = []
    for sent in tb.sentences:
        for tok in sent.tokens:
            if tok.head == 0:
                continue
            label = strip_subtype(tok.deprel) if strip_subtypes else tok.deprel
            base = strip_subtype(label)
            if base == "root" or base not in UNIVERSAL_RELATIONS:
                rejects.append(RejectedRelation(sent.id, tok.index, tok.deprel))
                continue
            instances.append(
                RelationInstance(
                    sentence_id=sent.id,
                    head_index=tok.head,
                    dep_index=tok.index,
                    label=label,
                )
            )
    return instances, rejects


def relations_tsv(instances):
    """Tab-separated export: one row per instance."""
    lines = ["sentence_id\thead_index\tdep_index\tlabel"]
    for inst in instances:
        lines.append(f"{inst.sentence_id}\t{inst.head_index}\t{inst.dep_index}\t{inst.label}")
    return "\n".join(lines) + "\n"


def treebank_summary(tb, instances):
    """Sentence count, token count, and a relation-label histogram."""
    histogram = Counter(inst.label for inst in instances)
    return {
        "language": tb.language,
        "sentences": len(tb.sentences),
        "tokens": sum(len(s.tokens) for s in tb.sentences),
        "relations": len(instances),
        "labels": dict(sorted(histogram.items())),
    }
