import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from syndiff.errors import TypologyDataError
from syndiff.typology import (
    DEFAULT_FEATURES,
    ParameterProfile,
    WalsProfile,
    average_feature_distance,
    feature_distance_vector,
    feature_pairs_csv,
    imputation_table,
    jaccard_distance,
    load_feature_pairs_csv,
    load_parameters_csv,
    load_wals_csv,
    wals_feature_distance,
)

# relative-clause order vectors: values (NRel, RelN, Correlative)
REL_ORDER = {
    "en": (1, 0, 0),
    "hi": (0, 0, 1),
    "hu": (1, 1, 0),
    "ja": (0, 1, 0),
}


def wals(lang, **features):
    return WalsProfile(language=lang, features=features)


def params(lang, *values):
    return ParameterProfile(language=lang, parameters=tuple(values))


def test_default_inventory():
    assert len(DEFAULT_FEATURES) == 116
    assert "90A" in DEFAULT_FEATURES
    assert len(set(DEFAULT_FEATURES)) == 116


def test_jaccard_identity():
    a = params("aa", 1, 0, 1, 1)
    assert jaccard_distance(a, a) == 0.0


def test_jaccard_hand_value():
    a = params("aa", 1, 0, 1)
    b = params("bb", 1, 1, 0)
    assert jaccard_distance(a, b) == pytest.approx(2.0 / 3.0, abs=1e-15)


def test_jaccard_empty_union():
    assert jaccard_distance(params("aa", 0, 0), params("bb", 0, 0)) == 0.0


def test_jaccard_skips_undefined():
    a = params("aa", 1, None, 1)
    b = params("bb", 1, 1, None)
    # only slot 0 defined in both: intersection 1, union 1
    assert jaccard_distance(a, b) == 0.0


def test_jaccard_length_mismatch():
    with pytest.raises(TypologyDataError, match="length"):
        jaccard_distance(params("aa", 1), params("bb", 1, 0))


def test_parameter_values_validated():
    with pytest.raises(TypologyDataError):
        params("aa", 2, 0)


@given(
    st.lists(st.sampled_from([0, 1, None]), min_size=1, max_size=12),
    st.lists(st.sampled_from([0, 1, None]), min_size=1, max_size=12),
)
def test_jaccard_bounds_and_symmetry(pa, pb):
    n = min(len(pa), len(pb))
    a = params("aa", *pa[:n])
    b = params("bb", *pb[:n])
    d = jaccard_distance(a, b)
    assert 0.0 <= d <= 1.0
    assert d == jaccard_distance(b, a)


def test_wals_90a_orthogonal():
    en = wals("en", **{"90A": REL_ORDER["en"]})
    hi = wals("hi", **{"90A": REL_ORDER["hi"]})
    assert wals_feature_distance(en, hi, "90A") == pytest.approx(1.0, abs=1e-15)


def test_wals_90a_en_hu():
    en = wals("en", **{"90A": REL_ORDER["en"]})
    hu = wals("hu", **{"90A": REL_ORDER["hu"]})
    expected = 1.0 - 1.0 / math.sqrt(2.0)
    assert wals_feature_distance(en, hu, "90A") == pytest.approx(expected, abs=1e-12)


def test_wals_identical_zero():
    a = wals("aa", **{"90A": (1, 1, 0)})
    b = wals("bb", **{"90A": (1, 1, 0)})
    assert wals_feature_distance(a, b, "90A") == 0.0


def test_wals_missing_feature():
    a = wals("aa", **{"90A": (1, 0, 0)})
    b = wals("bb")
    assert wals_feature_distance(a, b, "90A") is None
    assert wals_feature_distance(a, b, "81A") is None


def test_wals_zero_vector_rejected():
    a = wals("aa", **{"90A": (0, 0, 0)})
    b = wals("bb", **{"90A": (1, 0, 0)})
    with pytest.raises(TypologyDataError, match="all-zero"):
        wals_feature_distance(a, b, "90A")


def test_wals_zero_padding_invariance():
    a = wals("aa", **{"90A": (1, 1, 0)})
    b = wals("bb", **{"90A": (1, 0, 1)})
    a_pad = wals("aa", **{"90A": (1, 1, 0, 0, 0)})
    b_pad = wals("bb", **{"90A": (1, 0, 1, 0, 0)})
    assert wals_feature_distance(a, b, "90A") == wals_feature_distance(a_pad, b_pad, "90A")


@given(
    st.lists(st.sampled_from([0, 1]), min_size=1, max_size=10).filter(any),
    st.lists(st.sampled_from([0, 1]), min_size=1, max_size=10).filter(any),
)
def test_wals_bounds_and_symmetry(va, vb):
    n = min(len(va), len(vb))
    if not any(va[:n]) or not any(vb[:n]):
        return
    a = wals("aa", f=tuple(va[:n]))
    b = wals("bb", f=tuple(vb[:n]))
    d = wals_feature_distance(a, b, "f")
    assert 0.0 <= d <= 1.0
    assert d == wals_feature_distance(b, a, "f")


def test_vector_fully_defined_no_mask():
    feats = ("f1", "f2")
    a = wals("aa", f1=(1, 0), f2=(0, 1))
    b = wals("bb", f1=(1, 0), f2=(1, 0))
    v = feature_distance_vector(a, b, feats)
    assert not v.imputed.any()
    assert v.distances[0] == 0.0
    assert v.distances[1] == 1.0


def test_vector_mean_imputation():
    feats = ("f1", "f2")
    a = wals("aa", f1=(1, 0))
    b = wals("bb", f1=(1, 0), f2=(1, 0))
    v = feature_distance_vector(a, b, feats, imputation="mean", mean_table={"f1": 0.1, "f2": 0.4})
    assert v.distances[1] == 0.4
    assert v.imputed.tolist() == [False, True]


def test_vector_sentinel_imputation():
    a = wals("aa")
    b = wals("bb")
    v = feature_distance_vector(a, b, ("f1",), imputation="sentinel")
    assert v.distances[0] == -1.0
    assert v.imputed.all()


def test_vector_default_inventory_width():
    a = wals("aa", **{"90A": (1, 0, 0)})
    b = wals("bb", **{"90A": (0, 1, 0)})
    v = feature_distance_vector(a, b)
    assert len(v.distances) == 116
    assert v.imputed.sum() == 115


def test_vector_unknown_feature_in_mean_mode():
    a = wals("aa")
    b = wals("bb")
    with pytest.raises(TypologyDataError, match="unknown feature"):
        feature_distance_vector(a, b, ("mystery",), imputation="mean", mean_table={})


def test_average_all_zero():
    a = wals("aa", f1=(1, 0), f2=(0, 1))
    v = feature_distance_vector(a, a, ("f1", "f2"))
    assert average_feature_distance(v) == 0.0


def test_average_hand_values():
    feats = ("f1", "f2")
    a = wals("aa", f1=(1, 1, 0), f2=(1, 1, 0))
    b = wals("bb", f1=(1, 0, 1), f2=(0, 1, 1))
    v = feature_distance_vector(a, b, feats)
    expected = float(np.mean([v.distances[0], v.distances[1]]))
    assert average_feature_distance(v) == pytest.approx(expected)


def test_average_excludes_missing():
    feats = ("f1", "f2", "f3")
    a = wals("aa", f1=(1, 0), f3=(1, 0))
    b = wals("bb", f1=(0, 1), f2=(1, 0), f3=(1, 0))
    v = feature_distance_vector(a, b, feats)
    assert average_feature_distance(v) == pytest.approx((1.0 + 0.0) / 2)


def test_average_all_missing():
    v = feature_distance_vector(wals("aa"), wals("bb"), ("f1",))
    with pytest.raises(TypologyDataError, match="no defined"):
        average_feature_distance(v)


def test_imputation_table_hand_check():
    a = wals("aa", f1=(1, 0))
    b = wals("bb", f1=(0, 1))
    c = wals("cc", f1=(1, 0), f2=(1, 0))
    table = imputation_table([a, b, c], ("f1", "f2"))
    # pairs: (aa,bb)=1, (aa,cc)=0, (bb,cc)=1 -> mean 2/3; f2 never co-defined
    assert table["f1"] == pytest.approx(2.0 / 3.0)
    assert table["f2"] == 0.5


WALS_CSV = """language_code,feature_id,value_index,value_flag
en,90A,0,1
en,90A,1,0
en,90A,2,0
hi,90A,2,1
hu,90A,0,1
hu,90A,1,1
ja,90A,1,1
en,81A,0,1
hi,81A,1,1
"""


def test_load_wals_csv():
    profiles = load_wals_csv(WALS_CSV)
    assert sorted(profiles) == ["en", "hi", "hu", "ja"]
    assert profiles["en"].features["90A"] == (1, 0, 0)
    assert profiles["hu"].features["90A"] == (1, 1, 0)
    assert profiles["hi"].features["90A"] == (0, 0, 1)
    assert profiles["ja"].features["90A"] == (0, 1, 0)
    assert "81A" not in profiles["ja"].features
    d = wals_feature_distance(profiles["en"], profiles["hi"], "90A")
    assert d == pytest.approx(1.0)


def test_load_wals_missing_column_named():
    bad = "language_code,feature_id,value_index\nen,90A,0\n"
    with pytest.raises(TypologyDataError, match="value_flag"):
        load_wals_csv(bad)


def test_load_wals_bad_flag():
    bad = WALS_CSV + "zz,90A,0,7\n"
    with pytest.raises(TypologyDataError, match="bad value_index/value_flag"):
        load_wals_csv(bad)


PARAMS_CSV = """language_code,p1,p2,p3
en,1,0,1
it,1,1,0
ja,?,1,0
"""


def test_load_parameters_csv():
    profiles = load_parameters_csv(PARAMS_CSV)
    assert profiles["en"].parameters == (1, 0, 1)
    assert profiles["ja"].parameters == (None, 1, 0)
    assert jaccard_distance(profiles["en"], profiles["it"]) == pytest.approx(2.0 / 3.0)


def test_load_parameters_bad_cell():
    with pytest.raises(TypologyDataError, match="bad cell"):
        load_parameters_csv("language_code,p1\nen,x\n")


def test_feature_pairs_csv_roundtrip():
    profiles = load_wals_csv(WALS_CSV)
    text = feature_pairs_csv(profiles, ("90A", "81A"))
    pairs, features, X = load_feature_pairs_csv(text)
    assert features == ("90A", "81A")
    assert ("en", "hi") in pairs
    row = X[pairs.index(("en", "hi"))]
    assert row[0] == pytest.approx(1.0)
    assert row[1] == pytest.approx(1.0)  # 81A: en (1,0) vs hi (0,1)
    row = X[pairs.index(("en", "ja"))]
    assert np.isnan(row[1])  # 81A missing for ja
