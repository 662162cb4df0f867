"""The full pipeline through the command line, in a temporary directory.

parse-treebank -> build-dataset -> distance-matrix -> cluster, plus the
validate verb. Every artifact embeds its configuration and input digests
(JSON outputs inline, CSV outputs via a .meta.json sidecar), and identical
seeds give byte-identical artifacts.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from syndiff.embeddings import EmbeddingSet, write_embedding_file

LABELS = ("nsubj", "obj")
rng = np.random.default_rng(5)
MEANS = {label: rng.normal(0.0, 2.0, 6) for label in LABELS}


def make_language(root, code, seed, shift=0.0, n_sentences=30):
    lines = []
    g = np.random.default_rng(seed)
    sentences = {}
    for s in range(n_sentences):
        sid = f"{code}{s}"
        lines.append(f"# sent_id = {sid}")
        lines.append("1\thead\t_\tVERB\t_\t_\t0\troot\t_\t_")
        rows = [np.zeros(6, dtype=np.float32)]
        for i, label in enumerate(LABELS, start=2):
            lines.append(f"{i}\tw{i}\t_\tNOUN\t_\t_\t1\t{label}\t_\t_")
            vec = MEANS[label] + shift + g.normal(0.0, 1.0, 6)
            rows.append(-vec.astype(np.float32))
        lines.append("")
        sentences[sid] = np.vstack(rows)
    (root / f"{code}.conllu").write_text("\n".join(lines))
    es = EmbeddingSet(language=code, model_id="demo", layer=7, dim=6, sentences=sentences)
    write_embedding_file(root / f"{code}.ldeb", es)


def run(*args):
    cmd = [sys.executable, "-m", "syndiff.cli", *map(str, args)]
    proc = subprocess.run(cmd, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp)
    for code, seed, shift in (("aa", 1, 0.0), ("bb", 2, 0.0), ("cc", 3, 2.0)):
        make_language(root, code, seed, shift)

    report = run("validate", "--ldeb", root / "aa.ldeb")
    print("validate:", "clean" if not report["problems"] else report["problems"])

    for code in ("aa", "bb", "cc"):
        out = run(
            "parse-treebank", "--input", root / f"{code}.conllu",
            "--language", code, "--output", root / f"{code}.tsv",
        )
        print(f"parse-treebank {code}: {out['summary']['relations']} relations")
        run(
            "build-dataset", "--treebank", root / f"{code}.conllu",
            "--language", code, "--embeddings", root / f"{code}.ldeb",
            "--output", root / f"{code}.ldds", "--max-items", "50", "--seed", "0",
        )

    out = run(
        "distance-matrix",
        "--datasets", root / "aa.ldds", root / "bb.ldds", root / "cc.ldds",
        "--output", root / "otdd.csv", "--max-iter", "800",
    )
    print(f"distance-matrix over {out['languages']}: {out['pairs']} pairs")
    print((root / "otdd.csv").read_text())

    run("cluster", "--matrix", root / "otdd.csv", "--output", root / "tree.nwk")
    print("cluster:", (root / "tree.nwk").read_text().strip())
    print("(aa and bb share generators, so they merge first)")

    meta = json.loads((root / "otdd.csv.meta.json").read_text())
    print(f"\nartifact metadata keys: {sorted(meta)}")
