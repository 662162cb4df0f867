import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from syndiff.embeddings import EmbeddingSet, LabeledDataset
from syndiff.treebank import parse_conllu

TWO_TOKEN_CONLLU = """\
# sent_id = s1
1\tHe\the\tPRON\t_\t_\t2\tnsubj\t_\t_
2\truns\trun\tVERB\t_\t_\t0\troot\t_\t_
"""

MULTIWORD_CONLLU = """\
# sent_id = m1
1\tThe\tthe\tDET\t_\t_\t4\tdet\t_\t_
2\tdog\tdog\tNOUN\t_\t_\t4\tnsubj\t_\t_
3-4\tisn't\t_\t_\t_\t_\t_\t_\t_\t_
3\tis\tbe\tAUX\t_\t_\t4\taux\t_\t_
4\tbarking\tbark\tVERB\t_\t_\t0\troot\t_\t_
"""


def conllu_line(index, form, head, deprel, upos="X"):
    return f"{index}\t{form}\t_\t{upos}\t_\t_\t{head}\t{deprel}\t_\t_"


def synthetic_treebank_text(n_sentences, labels, sent_prefix="s"):
    """Sentences of 1 + len(labels) tokens: a root and one dependent per label."""
    blocks = []
    for s in range(n_sentences):
        lines = [f"# sent_id = {sent_prefix}{s}"]
        lines.append(conllu_line(1, "head", 0, "root"))
        for i, label in enumerate(labels, start=2):
            lines.append(conllu_line(i, f"w{i}", 1, label))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def synthetic_language(
    seed,
    language,
    label_means,
    n_sentences=40,
    noise=1.0,
    shift=0.0,
    model_id="toy",
    layer=7,
):
    """Treebank plus embeddings whose relation vectors follow per-label Gaussians.

    The root word's vector is zero and each dependent's vector is the negated
    sample, so head minus dependent reproduces the designed distribution.
    """
    labels = sorted(label_means)
    dim = len(next(iter(label_means.values())))
    rng = np.random.default_rng(seed)
    tb = parse_conllu(synthetic_treebank_text(n_sentences, labels), language=language)
    sentences = {}
    for s in range(n_sentences):
        rows = [np.zeros(dim, dtype=np.float32)]
        for label in labels:
            target = np.asarray(label_means[label]) + shift + rng.normal(0.0, noise, dim)
            rows.append(-target.astype(np.float32))
        sentences[f"s{s}"] = np.vstack(rows)
    es = EmbeddingSet(
        language=language, model_id=model_id, layer=layer, dim=dim, sentences=sentences
    )
    return tb, es


def gaussian_dataset(seed, language, label_means, n_items, noise=1.0, shift=0.0, layer=7):
    """LabeledDataset sampled directly from per-label Gaussians."""
    labels = sorted(label_means)
    dim = len(next(iter(label_means.values())))
    rng = np.random.default_rng(seed)
    feats = np.empty((n_items, dim))
    labs = []
    for i in range(n_items):
        label = labels[i % len(labels)]
        feats[i] = np.asarray(label_means[label]) + shift + rng.normal(0.0, noise, dim)
        labs.append(label)
    return LabeledDataset(
        language=language,
        model_id="toy",
        layer=layer,
        features=feats,
        labels=tuple(labs),
    )


@pytest.fixture
def label_means_4():
    rng = np.random.default_rng(999)
    return {f"rel{i}": rng.normal(0.0, 3.0, 8) for i in range(4)}
