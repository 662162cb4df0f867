"""Word-embedding storage and labeled-dataset assembly.

Two binary formats live here. LDEB carries per-word contextual vectors for
one language, model and layer; LDDS carries an assembled labeled dataset
(relation vectors plus labels). Files store float32; all arithmetic after
loading is float64, which keeps the downstream transport solves stable.

A relation is represented by the difference between the head word's vector
and the dependent word's vector.
"""

import io
import json
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DatasetJoinError,
    EmptyDatasetError,
    LdebCorruptionError,
    LdebFormatError,
)
from .treebank import extract_relations
from ._util import substream

LDEB_MAGIC = b"LDEB"
LDDS_MAGIC = b"LDDS"
FORMAT_VERSION = 1
MAX_LAYER = 12

DEFAULT_MAX_ITEMS = 5000
DEFAULT_PER_LABEL_MIN = 1


@dataclass(frozen=True)
class EmbeddingSet:
    """Per-word vectors for one (language, model, layer), keyed by sentence."""

    language: str
    model_id: str
    layer: int
    dim: int
    sentences: dict  # sentence_id -> float32 array of shape (word_count, dim)

    def vector(self, sentence_id, index):
        """Vector of the word at 1-based `index` in `sentence_id`."""
        sent = self.sentences.get(sentence_id)
        if sent is None or not 1 <= index <= len(sent):
            raise DatasetJoinError(
                f"no embedding for sentence {sentence_id!r} token {index}"
            )
        return sent[index - 1]

    def has(self, sentence_id, index):
        sent = self.sentences.get(sentence_id)
        return sent is not None and 1 <= index <= len(sent)


@dataclass(frozen=True)
class RelationVector:
    features: np.ndarray  # float64, length dim
    label: str
    language: str


@dataclass(frozen=True)
class LabeledDataset:
    """Empirical joint distribution of relation vectors and their labels."""

    language: str
    model_id: str
    layer: int
    features: np.ndarray  # (n, dim) float64
    labels: tuple
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.labels)

    @property
    def dim(self):
        return self.features.shape[1]

    @property
    def label_set(self):
        return frozenset(self.labels)

    def items(self):
        for row, label in zip(self.features, self.labels):
            yield RelationVector(features=row, label=label, language=self.language)


# ---------------------------------------------------------------------------
# LDEB reader / writer
# ---------------------------------------------------------------------------


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, n, what):
        if self.pos + n > len(self.data):
            raise LdebCorruptionError(f"truncated while reading {what}", self.pos)
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u8(self, what):
        return self.take(1, what)[0]

    def u16(self, what):
        return struct.unpack("<H", self.take(2, what))[0]

    def u32(self, what):
        return struct.unpack("<I", self.take(4, what))[0]

    def string(self, length, what):
        return self.take(length, what).decode("utf-8")


def read_embedding_file(path):
    """Load an LDEB file into an :class:`EmbeddingSet`."""
    with open(path, "rb") as f:
        data = f.read()
    r = _Reader(data)
    if r.take(4, "magic") != LDEB_MAGIC:
        raise LdebFormatError(f"{path}: bad magic, not an LDEB file")
    version = r.u16("version")
    if version != FORMAT_VERSION:
        raise LdebFormatError(f"{path}: unsupported version {version}")
    language = r.string(r.u8("language length"), "language")
    model_id = r.string(r.u16("model_id length"), "model_id")
    layer = r.u8("layer")
    if layer > MAX_LAYER:
        raise LdebFormatError(f"{path}: layer {layer} outside 0..{MAX_LAYER}")
    dim = r.u32("dim")
    if dim == 0:
        raise LdebFormatError(f"{path}: zero vector width")
    sentence_count = r.u32("sentence count")

    sentences = {}
    for _ in range(sentence_count):
        sid = r.string(r.u16("sentence_id length"), "sentence_id")
        if sid in sentences:
            raise LdebFormatError(f"{path}: duplicate sentence id {sid!r}")
        word_count = r.u32("word count")
        raw = r.take(word_count * dim * 4, f"vectors of sentence {sid!r}")
        vectors = np.frombuffer(raw, dtype="<f4").reshape(word_count, dim)
        if not np.isfinite(vectors).all():
            raise LdebFormatError(f"{path}: non-finite values in sentence {sid!r}")
        sentences[sid] = vectors
    if r.pos != len(data):
        raise LdebFormatError(f"{path}: {len(data) - r.pos} trailing bytes after last record")

    return EmbeddingSet(
        language=language, model_id=model_id, layer=layer, dim=dim, sentences=sentences
    )


def encode_embedding_set(es):
    """Serialize an :class:`EmbeddingSet` to LDEB bytes, bit-exactly."""
    if not 0 <= es.layer <= MAX_LAYER:
        raise LdebFormatError(f"layer {es.layer} outside 0..{MAX_LAYER}")
    buf = io.BytesIO()
    buf.write(LDEB_MAGIC)
    buf.write(struct.pack("<H", FORMAT_VERSION))
    lang = es.language.encode("utf-8")
    buf.write(struct.pack("<B", len(lang)))
    buf.write(lang)
    model = es.model_id.encode("utf-8")
    buf.write(struct.pack("<H", len(model)))
    buf.write(model)
    buf.write(struct.pack("<B", es.layer))
    buf.write(struct.pack("<I", es.dim))
    buf.write(struct.pack("<I", len(es.sentences)))
    for sid, vectors in es.sentences.items():
        vectors = np.ascontiguousarray(vectors, dtype="<f4")
        if vectors.ndim != 2 or vectors.shape[1] != es.dim:
            raise LdebFormatError(
                f"sentence {sid!r}: vectors of width {vectors.shape[-1]} in a dim-{es.dim} set"
            )
        if not np.isfinite(vectors).all():
            raise LdebFormatError(f"sentence {sid!r}: non-finite values")
        sid_bytes = sid.encode("utf-8")
        buf.write(struct.pack("<H", len(sid_bytes)))
        buf.write(sid_bytes)
        buf.write(struct.pack("<I", len(vectors)))
        buf.write(vectors.tobytes())
    return buf.getvalue()


def write_embedding_file(path, es):
    with open(path, "wb") as f:
        f.write(encode_embedding_set(es))


# ---------------------------------------------------------------------------
# Relation vectors and dataset assembly
# ---------------------------------------------------------------------------


def relation_vector(es, inst):
    """Head vector minus dependent vector, in float64."""
    head = es.vector(inst.sentence_id, inst.head_index).astype(np.float64)
    dep = es.vector(inst.sentence_id, inst.dep_index).astype(np.float64)
    return RelationVector(features=head - dep, label=inst.label, language=es.language)


def _stratified_counts(counts, max_items, per_label_min):
    """Per-label sample counts: proportional allocation with a floor.

    Largest-remainder apportionment keeps every label within one item of its
    exact proportional share; the floor then claws back items for rare labels
    from the most over-represented ones. Label-name ordering breaks all ties,
    so the outcome is deterministic.
    """
    total = sum(counts.values())
    if total <= max_items:
        return dict(counts)

    labels = sorted(counts)
    quota = {l: max_items * counts[l] / total for l in labels}
    alloc = {l: math.floor(quota[l]) for l in labels}
    remainder = max_items - sum(alloc.values())
    for l in sorted(labels, key=lambda l: (-(quota[l] - alloc[l]), l))[:remainder]:
        alloc[l] += 1

    floors = {l: min(per_label_min, counts[l]) for l in labels}
    if sum(floors.values()) > max_items:
        # Minima cannot all be honored inside the cap; fall back to the
        # plain proportional allocation.
        return alloc

    for l in labels:
        if alloc[l] < floors[l]:
            alloc[l] = floors[l]
    excess = sum(alloc.values()) - max_items
    while excess > 0:
        donors = [l for l in labels if alloc[l] > floors[l]]
        donor = max(donors, key=lambda l: (alloc[l] - quota[l], l))
        alloc[donor] -= 1
        excess -= 1
    return alloc


def assemble_dataset(
    tb,
    es,
    max_items=DEFAULT_MAX_ITEMS,
    per_label_min=DEFAULT_PER_LABEL_MIN,
    seed=0,
    strip_subtypes=True,
):
    """Vectorize a treebank's relation instances into a :class:`LabeledDataset`.

    Instances without a matching embedding are skipped (counted in metadata).
    When more than `max_items` instances join, a label-stratified subsample is
    drawn deterministically from `seed`; surviving items keep treebank order.
    """
    if tb.language != es.language:
        raise DatasetJoinError(
            f"treebank language {tb.language!r} does not match embeddings {es.language!r}"
        )
    instances, rejects = extract_relations(tb, strip_subtypes=strip_subtypes)
    joinable = [
        inst
        for inst in instances
        if es.has(inst.sentence_id, inst.head_index) and es.has(inst.sentence_id, inst.dep_index)
    ]
    if not joinable:
        raise EmptyDatasetError(
            f"no relation instance of {tb.language!r} joins the embedding set"
        )

    counts = {}
    for inst in joinable:
        counts[inst.label] = counts.get(inst.label, 0) + 1
    alloc = _stratified_counts(counts, max_items, per_label_min)

    rng = substream(seed, "sampling")
    keep = set()
    by_label = {}
    for pos, inst in enumerate(joinable):
        by_label.setdefault(inst.label, []).append(pos)
    for label in sorted(by_label):
        positions = by_label[label]
        want = alloc.get(label, 0)
        if want >= len(positions):
            keep.update(positions)
        else:
            chosen = rng.choice(len(positions), size=want, replace=False)
            keep.update(positions[i] for i in chosen)

    selected = [joinable[i] for i in sorted(keep)]
    features = np.empty((len(selected), es.dim), dtype=np.float64)
    labels = []
    for row, inst in enumerate(selected):
        rv = relation_vector(es, inst)
        features[row] = rv.features
        labels.append(inst.label)

    metadata = {
        "max_items": max_items,
        "per_label_min": per_label_min,
        "seed": seed,
        "strip_subtypes": strip_subtypes,
        "instances_total": len(instances),
        "instances_joined": len(joinable),
        "instances_skipped": len(instances) - len(joinable),
        "instances_rejected": len(rejects),
    }
    return LabeledDataset(
        language=tb.language,
        model_id=es.model_id,
        layer=es.layer,
        features=features,
        labels=tuple(labels),
        metadata=metadata,
    )


# ---------------------------------------------------------------------------
# LDDS reader / writer
# ---------------------------------------------------------------------------


def encode_dataset(ds):
    """Serialize a :class:`LabeledDataset` to LDDS bytes."""
    buf = io.BytesIO()
    buf.write(LDDS_MAGIC)
    buf.write(struct.pack("<H", FORMAT_VERSION))
    lang = ds.language.encode("utf-8")
    buf.write(struct.pack("<B", len(lang)))
    buf.write(lang)
    model = ds.model_id.encode("utf-8")
    buf.write(struct.pack("<H", len(model)))
    buf.write(model)
    buf.write(struct.pack("<B", ds.layer))
    buf.write(struct.pack("<I", ds.features.shape[1]))
    meta = json.dumps(ds.metadata, sort_keys=True).encode("utf-8")
    buf.write(struct.pack("<I", len(meta)))
    buf.write(meta)
    label_table = sorted(set(ds.labels))
    index = {label: i for i, label in enumerate(label_table)}
    buf.write(struct.pack("<H", len(label_table)))
    for label in label_table:
        raw = label.encode("utf-8")
        buf.write(struct.pack("<H", len(raw)))
        buf.write(raw)
    buf.write(struct.pack("<I", len(ds.labels)))
    feats32 = np.ascontiguousarray(ds.features, dtype="<f4")
    for row, label in enumerate(ds.labels):
        buf.write(struct.pack("<H", index[label]))
        buf.write(feats32[row].tobytes())
    return buf.getvalue()


def save_dataset(path, ds):
    with open(path, "wb") as f:
        f.write(encode_dataset(ds))


def load_dataset(path):
    with open(path, "rb") as f:
        data = f.read()
    r = _Reader(data)
    if r.take(4, "magic") != LDDS_MAGIC:
        raise LdebFormatError(f"{path}: bad magic, not an LDDS file")
    version = r.u16("version")
    if version != FORMAT_VERSION:
        raise LdebFormatError(f"{path}: unsupported version {version}")
    language = r.string(r.u8("language length"), "language")
    model_id = r.string(r.u16("model_id length"), "model_id")
    layer = r.u8("layer")
    dim = r.u32("dim")
    if dim == 0:
        raise LdebFormatError(f"{path}: zero vector width")
    metadata = json.loads(r.string(r.u32("metadata length"), "metadata"))
    label_table = []
    for _ in range(r.u16("label count")):
        label_table.append(r.string(r.u16("label length"), "label"))
    n = r.u32("item count")
    features = np.empty((n, dim), dtype=np.float64)
    labels = []
    for row in range(n):
        idx = r.u16("label index")
        if idx >= len(label_table):
            raise LdebFormatError(f"{path}: label index {idx} outside table")
        labels.append(label_table[idx])
        raw = r.take(dim * 4, f"features of item {row}")
        features[row] = np.frombuffer(raw, dtype="<f4")
    if r.pos != len(data):
        raise LdebFormatError(f"{path}: {len(data) - r.pos} trailing bytes after last record")
    if not np.isfinite(features).all():
        raise LdebFormatError(f"{path}: non-finite feature values")
    return LabeledDataset(
        language=language,
        model_id=model_id,
        layer=layer,
        features=features,
        labels=tuple(labels),
        metadata=metadata,
    )
