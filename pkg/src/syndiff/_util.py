"""Small shared helpers: seeded RNG substreams, atomic writes, input digests."""

import hashlib
import os
import tempfile

import numpy as np


def substream(seed, name):
    """Independent RNG derived from the run seed and a purpose name.

    All randomness in the toolkit flows from one integer seed; distinct
    purposes ("sampling", "cv", "permutation", ...) get distinct streams so a
    module rerun in isolation reproduces its in-pipeline behaviour.
    """
    tag = int.from_bytes(hashlib.sha256(name.encode("utf-8")).digest()[:8], "little")
    return np.random.default_rng(np.random.SeedSequence([int(seed), tag]))


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_bytes_atomic(path, data):
    """Write via a temp file in the destination directory, then rename.

    A failed run never leaves a partial artifact at `path`.
    """
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_text_atomic(path, text):
    write_bytes_atomic(path, text.encode("utf-8"))
