"""Minimal CoNLL-U reading: sentence ids and word forms only.

The adapter needs the surface words in order, nothing else. Multiword-token
ranges and empty nodes are skipped so the word sequence matches the
syntactic-word indexing used downstream.
"""


def read_sentences(text):
    """Yield (sentence_id, [form, ...]) from CoNLL-U text."""
    sentences = []
    forms = []
    sent_id = None
    counter = 0

    def flush():
        nonlocal forms, sent_id, counter
        if forms:
            counter += 1
            sentences.append((sent_id if sent_id is not None else str(counter), forms))
        forms = []
        sent_id = None

    for raw in text.splitlines():
        line = raw.rstrip("\r")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("sent_id") and "=" in body:
                sent_id = body.split("=", 1)[1].strip()
            continue
        cols = line.split("\t")
        if len(cols) < 2:
            raise ValueError(f"not a CoNLL-U token line: {line!r}")
        if "-" in cols[0] or "." in cols[0]:
            continue
        forms.append(cols[1])
    flush()
    return sentences
