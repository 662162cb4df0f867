"""Round-trip the LDEB embedding format and assemble a labeled dataset.

LDEB stores per-word float32 vectors for one language, model and layer.
Joining it with a parsed treebank yields relation vectors (head minus
dependent) labeled by their grammatical relation, which is what every
distance computation downstream consumes.
"""

import tempfile
from pathlib import Path

import numpy as np

from syndiff.embeddings import (
    EmbeddingSet,
    assemble_dataset,
    load_dataset,
    read_embedding_file,
    save_dataset,
    write_embedding_file,
)
from syndiff.treebank import parse_conllu

rng = np.random.default_rng(0)

# a tiny two-sentence treebank: root plus two dependents each
lines = []
for sid in ("a", "b"):
    lines.append(f"# sent_id = {sid}")
    lines.append("1\thead\t_\tVERB\t_\t_\t0\troot\t_\t_")
    lines.append("2\tsubj\t_\tNOUN\t_\t_\t1\tnsubj\t_\t_")
    lines.append("3\tobj\t_\tNOUN\t_\t_\t1\tobj\t_\t_")
    lines.append("")
tb = parse_conllu("\n".join(lines), language="xx")

dim = 6
sentences = {
    sid: rng.normal(size=(3, dim)).astype(np.float32) for sid in ("a", "b")
}
es = EmbeddingSet(language="xx", model_id="demo", layer=7, dim=dim, sentences=sentences)

with tempfile.TemporaryDirectory() as tmp:
    ldeb = Path(tmp) / "xx-layer7.ldeb"
    write_embedding_file(ldeb, es)
    print(f"wrote {ldeb.stat().st_size} bytes of LDEB")

    loaded = read_embedding_file(ldeb)
    identical = all(
        np.array_equal(loaded.sentences[s], es.sentences[s]) for s in sentences
    )
    print(f"read back bit-exactly: {identical}")

    ds = assemble_dataset(tb, loaded, max_items=100, seed=0)
    print(f"\ndataset: {len(ds)} items, labels {sorted(ds.label_set)}, dim {ds.dim}")
    print("first relation vector:", np.round(ds.features[0], 3))

    ldds = Path(tmp) / "xx.ldds"
    save_dataset(ldds, ds)
    again = load_dataset(ldds)
    # the file carries float32, so what comes back is the float32 rounding
    # of the in-memory float64 vectors
    stored = ds.features.astype(np.float32).astype(np.float64)
    print(f"LDDS round trip (float32 storage): {np.array_equal(again.features, stored)}")
