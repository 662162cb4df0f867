"""Run a BERT-style encoder over treebank sentences, write LDEB per layer.

Words are tokenized one at a time so the subword-to-word alignment is exact
by construction. A word's vector is the mean (or first) of its subword
hidden states at each requested layer. Sentences whose subwords exceed the
length cap are truncated at a word boundary and flagged; sentences
containing a word with no surviving subwords are skipped and logged.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

from .conllu import read_sentences
from .ldeb import write_ldeb

POOLING_MODES = ("mean", "first")
VARIANTS = ("pretrained", "random-weights", "finetuned")


@dataclass
class ExtractionJob:
    treebank: str
    language: str
    model_path: str
    output_dir: str
    variant: str = "pretrained"
    checkpoint: str = None
    layers: tuple = tuple(range(13))
    pooling: str = "mean"
    max_seq_len: int = 128
    batch_size: int = 8
    seed: int = 0
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.variant == "finetuned" and not self.checkpoint:
            raise ValueError("the finetuned variant needs --checkpoint")
        if self.pooling not in POOLING_MODES:
            raise ValueError(f"pooling must be one of {POOLING_MODES}")
        bad = [l for l in self.layers if not 0 <= l <= 12]
        if bad:
            raise ValueError(f"layers outside 0..12: {bad}")


def _load_model(job):
    if job.variant == "finetuned":
        model = AutoModel.from_pretrained(job.checkpoint)
        model_id = f"finetuned-{os.path.basename(os.path.normpath(job.checkpoint))}"
    else:
        model = AutoModel.from_pretrained(job.model_path)
        model_id = "pretrained"
    if job.variant == "random-weights":
        # fresh random weights everywhere except the subword embeddings,
        # which keep their trained values
        embeddings_state = model.embeddings.state_dict()
        torch.manual_seed(job.seed)
        model = type(model)(model.config)
        model.embeddings.load_state_dict(embeddings_state)
        model_id = f"random-weights-seed{job.seed}"
    model.eval()
    return model, model_id


def _tokenize_sentences(tokenizer, sentences, max_seq_len):
    """Per-word tokenization with truncation at word boundaries.

    Returns (prepared, truncated_ids, skipped). Each prepared entry is
    (sentence_id, kept_word_count, piece_ids, word_spans).
    """
    budget = max_seq_len - 2  # room for the [CLS] and [SEP] markers
    prepared = []
    truncated = []
    skipped = []
    for sid, forms in sentences:
        spans = []
        piece_ids = []
        kept = 0
        drop = None
        for form in forms:
            pieces = tokenizer.tokenize(form)
            if not pieces:
                drop = form
                break
            if len(piece_ids) + len(pieces) > budget:
                truncated.append(sid)
                break
            start = len(piece_ids)
            piece_ids.extend(tokenizer.convert_tokens_to_ids(pieces))
            spans.append((start, len(piece_ids)))
            kept += 1
        if drop is not None:
            skipped.append({"sentence_id": sid, "reason": f"word without subwords: {drop!r}"})
            continue
        if kept == 0:
            skipped.append({"sentence_id": sid, "reason": "no words fit the length cap"})
            continue
        prepared.append((sid, kept, piece_ids, spans))
    return prepared, truncated, skipped


def _encode_batch(model, tokenizer, batch, layers, pooling, dim):
    cls_id = tokenizer.cls_token_id
    sep_id = tokenizer.sep_token_id
    pad_id = tokenizer.pad_token_id or 0
    width = max(len(ids) for _, _, ids, _ in batch) + 2
    input_ids = torch.full((len(batch), width), pad_id, dtype=torch.long)
    mask = torch.zeros((len(batch), width), dtype=torch.long)
    for row, (_, _, ids, _) in enumerate(batch):
        seq = [cls_id, *ids, sep_id]
        input_ids[row, : len(seq)] = torch.tensor(seq)
        mask[row, : len(seq)] = 1
    with torch.no_grad():
        out = model(input_ids=input_ids, attention_mask=mask, output_hidden_states=True)
    per_layer = {layer: {} for layer in layers}
    for row, (sid, kept, _, spans) in enumerate(batch):
        for layer in layers:
            states = out.hidden_states[layer][row]
            vectors = np.empty((kept, dim), dtype=np.float32)
            for w, (start, stop) in enumerate(spans):
                block = states[1 + start : 1 + stop]
                pooled = block[0] if pooling == "first" else block.mean(dim=0)
                vectors[w] = pooled.numpy()
            per_layer[layer][sid] = vectors
    return per_layer


def extract(job):
    """Run the job; returns {"files": {layer: path}, "report": {...}}."""
    with open(job.treebank, "r", encoding="utf-8") as f:
        sentences = read_sentences(f.read())
    tokenizer = AutoTokenizer.from_pretrained(job.model_path)
    model, model_id = _load_model(job)
    layers = sorted(set(job.layers))
    n_states = model.config.num_hidden_layers + 1
    beyond = [l for l in layers if l >= n_states]
    if beyond:
        raise ValueError(f"model has {n_states} hidden-state layers; requested {beyond}")
    dim = model.config.hidden_size

    prepared, truncated, skipped = _tokenize_sentences(
        tokenizer, sentences, job.max_seq_len
    )
    collected = {layer: {} for layer in layers}
    for start in range(0, len(prepared), job.batch_size):
        batch = prepared[start : start + job.batch_size]
        chunk = _encode_batch(model, tokenizer, batch, layers, job.pooling, dim)
        for layer in layers:
            collected[layer].update(chunk[layer])

    os.makedirs(job.output_dir, exist_ok=True)
    files = {}
    for layer in layers:
        path = os.path.join(job.output_dir, f"{job.language}-{model_id}-layer{layer:02d}.ldeb")
        write_ldeb(path, job.language, model_id, layer, dim, collected[layer])
        files[layer] = path

    report = {
        "language": job.language,
        "model_id": model_id,
        "layers": layers,
        "pooling": job.pooling,
        "max_seq_len": job.max_seq_len,
        "sentences_total": len(sentences),
        "sentences_written": len(prepared),
        "truncated": sorted(truncated),
        "skipped": skipped,
    }
    report_path = os.path.join(job.output_dir, f"{job.language}-{model_id}-extract-report.json")
    with open(report_path, "w", encoding="utf-8") as f:
        json.dump(report, f, sort_keys=True, indent=2)
    report["report_path"] = report_path
    return {"files": files, "report": report}
