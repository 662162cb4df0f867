import os

os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")

import pytest
import torch
from transformers import BertConfig, BertModel, BertTokenizer

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "dog", "cat", "bark", "##ing", "run", "##s", "he", "she",
    "fast", "very", "a", "b", "c", "d",
]

CONLLU = """\
# sent_id = s1
1\tthe\tthe\tDET\t_\t_\t2\tdet\t_\t_
2\tdog\tdog\tNOUN\t_\t_\t3\tnsubj\t_\t_
3\tbarking\tbark\tVERB\t_\t_\t0\troot\t_\t_

# sent_id = s2
1\the\the\tPRON\t_\t_\t2\tnsubj\t_\t_
2\truns\trun\tVERB\t_\t_\t0\troot\t_\t_
3\tfast\tfast\tADV\t_\t_\t2\tadvmod\t_\t_
"""


@pytest.fixture(scope="session")
def model_dir(tmp_path_factory):
    """A tiny randomly initialized BERT with a real WordPiece vocab on disk."""
    root = tmp_path_factory.mktemp("tiny-bert")
    (root / "vocab.txt").write_text("\n".join(VOCAB) + "\n")
    tokenizer = BertTokenizer(str(root / "vocab.txt"), do_lower_case=True)
    tokenizer.save_pretrained(str(root))
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=12,
        num_attention_heads=4,
        intermediate_size=64,
        max_position_embeddings=64,
    )
    torch.manual_seed(0)
    model = BertModel(config)
    model.save_pretrained(str(root))
    return str(root)


@pytest.fixture(scope="session")
def finetuned_dir(tmp_path_factory, model_dir):
    """Same embeddings as the base model, perturbed encoder layers."""
    root = tmp_path_factory.mktemp("tiny-bert-finetuned")
    model = BertModel.from_pretrained(model_dir)
    with torch.no_grad():
        for name, param in model.named_parameters():
            if not name.startswith("embeddings."):
                param.add_(0.05 * torch.randn_like(param))
    model.save_pretrained(str(root))
    BertTokenizer.from_pretrained(model_dir).save_pretrained(str(root))
    return str(root)


@pytest.fixture
def treebank_path(tmp_path):
    path = tmp_path / "xx.conllu"
    path.write_text(CONLLU)
    return str(path)
