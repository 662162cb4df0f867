"""LDEB writing and validation, implemented against the published format.

Little-endian layout: magic "LDEB", version u16 = 1, language (u8 length +
bytes), model_id (u16 length + bytes), layer u8, dim u32, sentence_count
u32; then per sentence: sentence_id (u16 length + bytes), word_count u32,
word_count x dim float32 values row-major.
"""

import struct

import numpy as np

MAGIC = b"LDEB"
VERSION = 1
MAX_LAYER = 12


def write_ldeb(path, language, model_id, layer, dim, sentences):
    """Write word vectors to an LDEB file.

    `sentences` is an ordered mapping sentence_id -> (word_count, dim)
    float32 array.
    """
    if not 0 <= layer <= MAX_LAYER:
        raise ValueError(f"layer {layer} outside 0..{MAX_LAYER}")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<H", VERSION))
        lang = language.encode("utf-8")
        f.write(struct.pack("<B", len(lang)))
        f.write(lang)
        model = model_id.encode("utf-8")
        f.write(struct.pack("<H", len(model)))
        f.write(model)
        f.write(struct.pack("<B", layer))
        f.write(struct.pack("<I", dim))
        f.write(struct.pack("<I", len(sentences)))
        for sid, vectors in sentences.items():
            vectors = np.ascontiguousarray(vectors, dtype="<f4")
            if vectors.ndim != 2 or vectors.shape[1] != dim:
                raise ValueError(f"sentence {sid!r}: expected (*, {dim}) vectors")
            raw = sid.encode("utf-8")
            f.write(struct.pack("<H", len(raw)))
            f.write(raw)
            f.write(struct.pack("<I", len(vectors)))
            f.write(vectors.tobytes())


def validate_ldeb(path):
    """Structural check of an LDEB file: (ok, report).

    The report lists every problem found plus the header fields and
    per-sentence word counts when the file parses.
    """
    problems = []
    header = {}
    word_counts = {}
    with open(path, "rb") as f:
        data = f.read()
    pos = 0

    def take(n, what):
        nonlocal pos
        if pos + n > len(data):
            raise EOFError(f"truncated while reading {what} at byte {pos}")
        chunk = data[pos : pos + n]
        pos += n
        return chunk

    try:
        if take(4, "magic") != MAGIC:
            problems.append("bad magic: not an LDEB file")
            return False, {"problems": problems}
        version = struct.unpack("<H", take(2, "version"))[0]
        if version != VERSION:
            problems.append(f"unsupported version {version}")
        lang_len = take(1, "language length")[0]
        header["language"] = take(lang_len, "language").decode("utf-8")
        model_len = struct.unpack("<H", take(2, "model_id length"))[0]
        header["model_id"] = take(model_len, "model_id").decode("utf-8")
        header["layer"] = take(1, "layer")[0]
        if header["layer"] > MAX_LAYER:
            problems.append(f"layer {header['layer']} outside 0..{MAX_LAYER}")
        header["dim"] = struct.unpack("<I", take(4, "dim"))[0]
        if header["dim"] == 0:
            problems.append("zero vector width")
        count = struct.unpack("<I", take(4, "sentence count"))[0]
        header["sentences"] = count
        for _ in range(count):
            sid_len = struct.unpack("<H", take(2, "sentence_id length"))[0]
            sid = take(sid_len, "sentence_id").decode("utf-8")
            if sid in word_counts:
                problems.append(f"duplicate sentence id {sid!r}")
            words = struct.unpack("<I", take(4, "word count"))[0]
            raw = take(words * header["dim"] * 4, f"vectors of {sid!r}")
            vectors = np.frombuffer(raw, dtype="<f4")
            if not np.isfinite(vectors).all():
                problems.append(f"non-finite values in sentence {sid!r}")
            word_counts[sid] = words
        if pos != len(data):
            problems.append(f"{len(data) - pos} trailing bytes")
    except EOFError as exc:
        problems.append(str(exc))
    return not problems, {"problems": problems, "header": header, "word_counts": word_counts}
