import pytest

from syndiff.errors import ConlluParseError
from syndiff.treebank import (
    UNIVERSAL_RELATIONS,
    extract_relations,
    parse_conllu,
    relations_tsv,
    treebank_summary,
)

from conftest import MULTIWORD_CONLLU, TWO_TOKEN_CONLLU, conllu_line, synthetic_treebank_text


def test_empty_input():
    tb = parse_conllu("")
    assert len(tb.sentences) == 0
    assert tb.label_inventory == frozenset()


def test_two_token_fixture():
    tb = parse_conllu(TWO_TOKEN_CONLLU, language="en")
    assert len(tb.sentences) == 1
    sent = tb.sentences[0]
    assert sent.id == "s1"
    assert len(sent.tokens) == 2
    assert sent.tokens[1].head == 0
    assert sent.tokens[0].deprel == "nsubj"
    assert tb.language == "en"


def test_multiword_range_skipped():
    tb = parse_conllu(MULTIWORD_CONLLU)
    tokens = tb.sentences[0].tokens
    assert [t.index for t in tokens] == [1, 2, 3, 4]
    assert [t.form for t in tokens] == ["The", "dog", "is", "barking"]


def test_empty_node_skipped():
    text = "\n".join(
        [
            conllu_line(1, "a", 2, "nsubj"),
            "1.1\tghost\t_\t_\t_\t_\t_\t_\t_\t_",
            conllu_line(2, "b", 0, "root"),
        ]
    )
    tb = parse_conllu(text)
    assert len(tb.sentences[0].tokens) == 2


def test_sentence_id_fallback_counter():
    text = synthetic_treebank_text(1, ["nsubj"])
    text_no_comment = "\n".join(l for l in text.splitlines() if not l.startswith("#"))
    tb = parse_conllu(text_no_comment)
    assert tb.sentences[0].id == "1"


def test_accepts_line_iterable():
    tb = parse_conllu(TWO_TOKEN_CONLLU.splitlines())
    assert len(tb.sentences) == 1


def test_bad_column_count_reports_line():
    text = TWO_TOKEN_CONLLU + "1\tonly\tthree\n"
    with pytest.raises(ConlluParseError) as err:
        parse_conllu(text)
    assert "line 4" in str(err.value)
    assert err.value.line == 4


def test_non_integer_head():
    bad = conllu_line(1, "x", 0, "root").replace("\t0\t", "\tzero\t")
    with pytest.raises(ConlluParseError, match="non-integer head"):
        parse_conllu(bad)


def test_head_beyond_sentence():
    text = "\n".join([conllu_line(1, "a", 5, "nsubj"), conllu_line(2, "b", 0, "root")])
    with pytest.raises(ConlluParseError, match="exceeds sentence length"):
        parse_conllu(text)


def test_missing_root():
    text = "\n".join([conllu_line(1, "a", 2, "nsubj"), conllu_line(2, "b", 1, "obj")])
    with pytest.raises(ConlluParseError, match="exactly one root"):
        parse_conllu(text)


def test_non_contiguous_indices():
    text = "\n".join([conllu_line(1, "a", 3, "nsubj"), conllu_line(3, "b", 0, "root")])
    with pytest.raises(ConlluParseError, match="not contiguous"):
        parse_conllu(text)


def test_parse_deterministic():
    text = synthetic_treebank_text(5, ["nsubj", "obj", "amod"])
    assert parse_conllu(text) == parse_conllu(text)


def test_inventory_has_36_relations():
    assert len(UNIVERSAL_RELATIONS) == 36
    assert "root" not in UNIVERSAL_RELATIONS
    assert {"nsubj", "obj", "obl", "clf"} <= UNIVERSAL_RELATIONS


def test_root_excluded():
    tb = parse_conllu(synthetic_treebank_text(1, ["nsubj", "obj"]))
    instances, rejects = extract_relations(tb)
    assert len(instances) == 2
    assert rejects == []
    assert all(inst.label != "root" for inst in instances)


def test_subtype_stripping():
    text = "\n".join([conllu_line(1, "x", 2, "obl:tmod"), conllu_line(2, "y", 0, "root")])
    instances, _ = extract_relations(parse_conllu(text))
    assert instances[0].label == "obl"
    kept, _ = extract_relations(parse_conllu(text), strip_subtypes=False)
    assert kept[0].label == "obl:tmod"


def test_relation_count_formula():
    n, k = 7, 3
    tb = parse_conllu(synthetic_treebank_text(n, ["nsubj", "obj", "amod"][:k]))
    instances, _ = extract_relations(tb)
    assert len(instances) == n * k


def test_roundtrip_count_property():
    # instances = tokens - sentences for any well-formed treebank
    import random

    rng = random.Random(3)
    labels = sorted(UNIVERSAL_RELATIONS)
    for _ in range(10):
        chosen = rng.sample(labels, rng.randint(1, 6))
        tb = parse_conllu(synthetic_treebank_text(rng.randint(1, 8), chosen))
        instances, rejects = extract_relations(tb)
        total_tokens = sum(len(s.tokens) for s in tb.sentences)
        assert rejects == []
        assert len(instances) == total_tokens - len(tb.sentences)


def test_unknown_label_rejected():
    text = "\n".join([conllu_line(1, "x", 2, "weirdrel"), conllu_line(2, "y", 0, "root")])
    instances, rejects = extract_relations(parse_conllu(text))
    assert instances == []
    assert len(rejects) == 1
    assert rejects[0].label == "weirdrel"


def test_emitted_labels_in_inventory():
    text = "\n".join(
        [
            conllu_line(1, "x", 3, "nsubj:pass"),
            conllu_line(2, "y", 3, "foo:bar"),
            conllu_line(3, "z", 0, "root"),
        ]
    )
    instances, rejects = extract_relations(parse_conllu(text))
    assert {i.label for i in instances} <= UNIVERSAL_RELATIONS
    assert [r.label for r in rejects] == ["foo:bar"]


def test_tsv_and_summary():
    tb = parse_conllu(TWO_TOKEN_CONLLU, language="en")
    instances, _ = extract_relations(tb)
    tsv = relations_tsv(instances)
    lines = tsv.strip().splitlines()
    assert lines[0] == "sentence_id\thead_index\tdep_index\tlabel"
    assert lines[1] == "s1\t2\t1\tnsubj"
    summary = treebank_summary(tb, instances)
    assert summary["sentences"] == 1
    assert summary["tokens"] == 2
    assert summary["labels"] == {"nsubj": 1}
