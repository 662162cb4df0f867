"""Typological distances: binary-parameter Jaccard and WALS cosine features.

Two views of cross-linguistic difference live here. The formal one compares
binary syntactic-parameter lists with Jaccard distance. The typological one
encodes each WALS feature as a multi-hot vector of its possible values,
measures per-feature cosine distance, and stacks the per-feature distances
of a language pair into the vector consumed by the regressor.
"""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import TypologyDataError

# Default morphosyntax inventory: the 116 WALS features covering Morphology
# through Complex Sentences, excluding the three word-order features that are
# derivable from the others.
DEFAULT_FEATURES = (
    "20A", "21A", "21B", "22A", "23A", "24A", "25A", "25B", "26A", "27A",
    "28A", "29A", "30A", "31A", "32A", "33A", "34A", "35A", "36A", "37A",
    "38A", "39A", "40A", "41A", "42A", "43A", "44A", "45A", "46A", "47A",
    "48A", "49A", "50A", "51A", "52A", "53A", "54A", "55A", "56A", "57A",
    "58A", "58B", "59A", "60A", "61A", "62A", "63A", "64A", "65A", "66A",
    "67A", "68A", "69A", "70A", "71A", "72A", "73A", "74A", "75A", "76A",
    "77A", "78A", "79A", "79B", "80A", "81A", "82A", "83A", "84A", "85A",
    "86A", "87A", "88A", "89A", "90A", "91A", "92A", "93A", "94A", "98A",
    "99A", "100A", "101A", "102A", "103A", "104A", "105A", "106A", "107A",
    "108A", "108B", "109A", "109B", "110A", "111A", "112A", "113A", "114A",
    "115A", "116A", "117A", "118A", "119A", "120A", "121A", "122A", "123A",
    "124A", "125A", "126A", "127A", "128A", "143A", "143B", "144A", "144B",
)

IMPUTATION_MODES = ("none", "mean", "sentinel")
SENTINEL = -1.0


@dataclass(frozen=True)
class ParameterProfile:
    """Binary syntactic parameters of one language; None marks undefined slots."""

    language: str
    parameters: tuple

    def __post_init__(self):
        bad = {p for p in self.parameters if p not in (0, 1, None)}
        if bad:
            raise TypologyDataError(f"{self.language}: parameter values outside {{0,1,undefined}}: {bad}")


@dataclass(frozen=True)
class WalsProfile:
    """Multi-hot value vectors per WALS feature; absent feature = missing."""

    language: str
    features: dict  # feature id -> tuple of 0/1


@dataclass(frozen=True)
class FeatureDistanceVector:
    """Per-feature distances for one language pair, with an imputation mask."""

    language_a: str
    language_b: str
    feature_ids: tuple
    distances: np.ndarray  # float64; NaN only in imputation mode "none"
    imputed: np.ndarray  # bool; True where the distance was not computable


def jaccard_distance(a, b):
    """1 - |intersection| / |union| over slots defined in both profiles."""
    if len(a.parameters) != len(b.parameters):
        raise TypologyDataError(
            f"parameter lists differ in length: {a.language} has {len(a.parameters)}, "
            f"{b.language} has {len(b.parameters)}"
        )
    both = inter = union = 0
    for pa, pb in zip(a.parameters, b.parameters):
        if pa is None or pb is None:
            continue
        both += 1
        if pa == 1 and pb == 1:
            inter += 1
        if pa == 1 or pb == 1:
            union += 1
    if union == 0:
        return 0.0
    return 1.0 - inter / union


def wals_feature_distance(a, b, feature_id):
    """Cosine distance between two value vectors; None when either is absent."""
    va = a.features.get(feature_id)
    vb = b.features.get(feature_id)
    if va is None or vb is None:
        return None
    if len(va) != len(vb):
        raise TypologyDataError(
            f"feature {feature_id}: value vectors differ in length "
            f"({a.language}: {len(va)}, {b.language}: {len(vb)})"
        )
    na = math.sqrt(sum(v * v for v in va))
    nb = math.sqrt(sum(v * v for v in vb))
    if na == 0 or nb == 0:
        zero = a.language if na == 0 else b.language
        raise TypologyDataError(f"feature {feature_id}: all-zero vector for defined feature of {zero}")
    if tuple(va) == tuple(vb):
        return 0.0
    dot = sum(x * y for x, y in zip(va, vb))
    return min(max(1.0 - dot / (na * nb), 0.0), 1.0)


def feature_distance_vector(a, b, features=DEFAULT_FEATURES, imputation="none", mean_table=None):
    """Stack per-feature distances of a language pair into one vector.

    Missing entries are left NaN ("none"), filled from a per-feature mean
    table ("mean"), or set to -1 ("sentinel"); the mask records which ones.
    """
    if imputation not in IMPUTATION_MODES:
        raise ValueError(f"imputation must be one of {IMPUTATION_MODES}")
    if imputation == "mean" and mean_table is None:
        raise TypologyDataError("mean imputation needs a mean table")
    distances = np.empty(len(features))
    imputed = np.zeros(len(features), dtype=bool)
    for i, fid in enumerate(features):
        d = wals_feature_distance(a, b, fid)
        if d is not None:
            distances[i] = d
            continue
        imputed[i] = True
        if imputation == "none":
            distances[i] = np.nan
        elif imputation == "sentinel":
            distances[i] = SENTINEL
        else:
            if fid not in mean_table:
                raise TypologyDataError(f"unknown feature id {fid!r}: not in the imputation table")
            distances[i] = mean_table[fid]
    return FeatureDistanceVector(
        language_a=a.language,
        language_b=b.language,
        feature_ids=tuple(features),
        distances=distances,
        imputed=imputed,
    )


def average_feature_distance(v):
    """Mean distance over the defined (non-imputed) entries."""
    defined = v.distances[~v.imputed]
    if len(defined) == 0:
        raise TypologyDataError(
            f"no defined feature distances between {v.language_a} and {v.language_b}"
        )
    return float(defined.mean())


def imputation_table(profiles, features=DEFAULT_FEATURES, fallback=0.5):
    """Per-feature mean distance over all fully defined unordered pairs."""
    sums = {fid: 0.0 for fid in features}
    counts = {fid: 0 for fid in features}
    ordered = sorted(profiles, key=lambda p: p.language)
    for i, a in enumerate(ordered):
        for b in ordered[i + 1 :]:
            for fid in features:
                d = wals_feature_distance(a, b, fid)
                if d is not None:
                    sums[fid] += d
                    counts[fid] += 1
    return {
        fid: (sums[fid] / counts[fid] if counts[fid] else fallback) for fid in features
    }


# ---------------------------------------------------------------------------
# CSV ingestion and export
# ---------------------------------------------------------------------------

WALS_HEADER = ["language_code", "feature_id", "value_index", "value_flag"]


def load_wals_csv(text):
    """Parse WALS rows (language_code, feature_id, value_index, value_flag).

    The width of each feature's value vector is the largest value_index seen
    for it anywhere in the file, so vectors are comparable across languages.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != WALS_HEADER:
        missing = [c for c in WALS_HEADER if c not in (header or [])]
        if missing:
            raise TypologyDataError(f"WALS header missing columns {missing}")
        raise TypologyDataError(f"WALS header must be {WALS_HEADER}, got {header}")
    rows = []
    width = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise TypologyDataError(f"WALS line {lineno}: expected 4 columns, got {len(row)}")
        lang, fid, idx_s, flag_s = row
        try:
            idx = int(idx_s)
            flag = int(flag_s)
        except ValueError:
            raise TypologyDataError(f"WALS line {lineno}: non-integer value fields")
        if idx < 0 or flag not in (0, 1):
            raise TypologyDataError(f"WALS line {lineno}: bad value_index/value_flag")
        width[fid] = max(width.get(fid, 0), idx + 1)
        rows.append((lang, fid, idx, flag))

    values = {}
    for lang, fid, idx, flag in rows:
        vec = values.setdefault(lang, {}).setdefault(fid, [0] * width[fid])
        vec[idx] = flag
    profiles = {}
    for lang in sorted(values):
        feats = {}
        for fid, vec in values[lang].items():
            if not any(vec):
                raise TypologyDataError(f"{lang}: feature {fid} defined but all-zero")
            feats[fid] = tuple(vec)
        profiles[lang] = WalsProfile(language=lang, features=feats)
    return profiles


def load_parameters_csv(text):
    """Parse the binary-parameter table: language_code, p1, p2, ... with '?' undefined."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if not header or header[0] != "language_code" or len(header) < 2:
        raise TypologyDataError("parameter table must start with a language_code column")
    n_params = len(header) - 1
    profiles = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != n_params + 1:
            raise TypologyDataError(
                f"parameter line {lineno}: expected {n_params + 1} columns, got {len(row)}"
            )
        lang = row[0]
        params = []
        for cell in row[1:]:
            cell = cell.strip()
            if cell == "?":
                params.append(None)
            elif cell in ("0", "1"):
                params.append(int(cell))
            else:
                raise TypologyDataError(f"parameter line {lineno}: bad cell {cell!r}")
        profiles[lang] = ParameterProfile(language=lang, parameters=tuple(params))
    return profiles


def feature_pairs_csv(profiles, features=DEFAULT_FEATURES):
    """One row per unordered language pair, one raw distance column per feature.

    Missing distances are left as empty cells, so downstream consumers can
    apply their own imputation policy.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["language_a", "language_b", *features])
    ordered = sorted(profiles)
    for i, la in enumerate(ordered):
        for lb in ordered[i + 1 :]:
            v = feature_distance_vector(profiles[la], profiles[lb], features, imputation="none")
            cells = ["" if np.isnan(d) else repr(float(d)) for d in v.distances]
            writer.writerow([la, lb, *cells])
    return out.getvalue()


def load_feature_pairs_csv(text):
    """Inverse of :func:`feature_pairs_csv`: pairs, feature ids, distance matrix with NaN."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if not header or header[:2] != ["language_a", "language_b"]:
        raise TypologyDataError("feature-pair CSV must start with language_a,language_b")
    features = tuple(header[2:])
    pairs = []
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise TypologyDataError(f"feature-pair line {lineno}: wrong column count")
        pairs.append((row[0], row[1]))
        rows.append([np.nan if cell == "" else float(cell) for cell in row[2:]])
    return pairs, features, np.asarray(rows, dtype=np.float64)
