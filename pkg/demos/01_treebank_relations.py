"""Parse a CoNLL-U sample and pull out head-dependent relation instances.

Multiword-token ranges and empty nodes are skipped, subtype suffixes are
stripped by default, and anything outside the universal relation inventory
lands in a rejects report instead of the data.
"""

from syndiff.treebank import extract_relations, parse_conllu, treebank_summary

SAMPLE = """\
# sent_id = demo-1
1\tThe\tthe\tDET\t_\t_\t2\tdet\t_\t_
2\tdog\tdog\tNOUN\t_\t_\t4\tnsubj\t_\t_
3-4\tisn't\t_\t_\t_\t_\t_\t_\t_\t_
3\tis\tbe\tAUX\t_\t_\t4\taux\t_\t_
4\tbarking\tbark\tVERB\t_\t_\t0\troot\t_\t_

# sent_id = demo-2
1\tShe\tshe\tPRON\t_\t_\t2\tnsubj\t_\t_
2\tread\tread\tVERB\t_\t_\t0\troot\t_\t_
3\tit\tit\tPRON\t_\t_\t2\tobj\t_\t_
4\tyesterday\tyesterday\tNOUN\t_\t_\t2\tobl:tmod\t_\t_
"""

tb = parse_conllu(SAMPLE, language="en")
print(f"parsed {len(tb.sentences)} sentences in language {tb.language!r}")
for sent in tb.sentences:
    forms = " ".join(t.form for t in sent.tokens)
    print(f"  {sent.id}: {forms}")

instances, rejects = extract_relations(tb)
print(f"\n{len(instances)} relation instances (root excluded), {len(rejects)} rejected")
for inst in instances:
    sent = next(s for s in tb.sentences if s.id == inst.sentence_id)
    head = sent.tokens[inst.head_index - 1].form
    dep = sent.tokens[inst.dep_index - 1].form
    print(f"  {inst.sentence_id}: {head} -> {dep}  [{inst.label}]")

print("\nnote: 'obl:tmod' was reduced to its universal part 'obl'")
print("\nsummary:", treebank_summary(tb, instances))
