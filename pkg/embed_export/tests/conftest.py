import pytest
import torch
from tokenizers import BertWordPieceTokenizer
from transformers import BertConfig, BertModel, PreTrainedTokenizerFast

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "this", "painting", "is", "great", ".", "he", "runs", "fast",
    "un", "##paint", "##able", "a", "b", "c", "d", "e", "f", "g", "h",
]


def build_model_dir(path, hidden_size=32, num_layers=2, max_positions=64):
    backend = BertWordPieceTokenizer(
        vocab={token: i for i, token in enumerate(VOCAB)}, lowercase=True
    )
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_object=backend._tokenizer,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
    )
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=hidden_size,
        num_hidden_layers=num_layers,
        num_attention_heads=4,
        intermediate_size=hidden_size * 2,
        max_position_embeddings=max_positions,
    )
    torch.manual_seed(1234)
    model = BertModel(config)
    model.save_pretrained(path)
    tokenizer.save_pretrained(path)
    return path


@pytest.fixture(scope="session")
def tiny_model(tmp_path_factory):
    return build_model_dir(tmp_path_factory.mktemp("tinybert"))


@pytest.fixture(scope="session")
def wide_model(tmp_path_factory):
    # the reference encoder width, kept shallow so the test stays quick
    return build_model_dir(
        tmp_path_factory.mktemp("widebert"), hidden_size=768, num_layers=1
    )


@pytest.fixture(scope="session")
def cramped_model(tmp_path_factory):
    # position table of 8: anything beyond a handful of words must be skipped
    return build_model_dir(
        tmp_path_factory.mktemp("crampedbert"), max_positions=8
    )


CONLLU = (
    "# sent_id = first\n"
    "1\tthis\t_\tDT\t_\t_\t2\tdet\t_\t_\n"
    "2\tpainting\t_\tNN\t_\t_\t3\tnsubj\t_\t_\n"
    "3\tis\t_\tVBZ\t_\t_\t4\tcop\t_\t_\n"
    "4\tgreat\t_\tJJ\t_\t_\t0\troot\t_\t_\n"
    "5\t.\t_\t.\t_\t_\t3\tpunct\t_\t_\n"
    "\n"
    "1\the\t_\tPRON\t_\t_\t2\tnsubj\t_\t_\n"
    "2\truns\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
    "\n"
    "# sent_id = third\n"
    "1\tunpaintable\t_\tJJ\t_\t_\t0\troot\t_\t_\n"
    "2\t.\t_\t.\t_\t_\t1\tpunct\t_\t_\n"
    "\n"
)


@pytest.fixture()
def conllu_file(tmp_path):
    path = tmp_path / "demo.conllu"
    path.write_text(CONLLU, encoding="utf-8")
    return path
