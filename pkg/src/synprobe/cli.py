"""Command-line entry point: encode, decode, probe, and eval subcommands.

Exit codes: 0 on success, 1 on usage errors, 2 on data errors (unreadable
files, parse failures, misaligned inputs).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from synprobe import constcodec, depcodec, metrics, probe, report
from synprobe.treebank import (
    BracketParseError,
    ConlluParseError,
    const_sentences,
    dep_sentences,
    read_brackets,
    read_conllu,
    write_brackets,
    write_conllu,
)

ENCODINGS = ("relhead", "2planar", "archybrid", "constlevels")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class DataError(Exception):
    """Wraps any input problem so main() can map it to exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        raise SystemExit_(message)


class SystemExit_(Exception):
    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="synprobe", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="linearize a treebank into a label file")
    enc.add_argument("treebank", help="input treebank path")
    enc.add_argument("--encoding", required=True, choices=ENCODINGS)
    enc.add_argument("--out", default=None, help="output label file (default stdout)")

    dec = sub.add_parser("decode", help="rebuild a treebank from a label file")
    dec.add_argument("labels", help="input label file path")
    dec.add_argument("--encoding", required=True, choices=ENCODINGS)
    dec.add_argument("--out", default=None, help="output treebank (default stdout)")

    prb = sub.add_parser("probe", help="train and score linear probes on embeddings")
    prb.add_argument("--encoding", required=True, choices=ENCODINGS)
    prb.add_argument("--train", required=True, help="training treebank")
    prb.add_argument("--dev", default=None, help="dev treebank (accepted, unused)")
    prb.add_argument("--test", required=True, help="test treebank")
    prb.add_argument(
        "--frz-embeddings",
        nargs=2,
        metavar=("TRAIN_EMB", "TEST_EMB"),
        default=None,
        help="frozen-setup EMB1 files for the train and test splits",
    )
    prb.add_argument(
        "--rnd-embeddings",
        nargs=2,
        metavar=("TRAIN_EMB", "TEST_EMB"),
        default=None,
        help="random-control EMB1 files for the train and test splits",
    )
    prb.add_argument(
        "--setup",
        choices=("both", "frz", "rnd"),
        default="both",
        help="which setups to train (default both, enabling error reduction)",
    )
    prb.add_argument("--ftd-score", type=float, default=None,
                     help="externally produced fine-tuned score to report against")
    prb.add_argument("--seed", type=int, default=0)
    prb.add_argument("--epochs", type=int, default=20)
    prb.add_argument("--lr", type=float, default=2e-3)
    prb.add_argument("--batch-size", type=int, default=128)
    prb.add_argument("--min-support", type=int, default=10)
    prb.add_argument("--out", default=None, help="report JSON path (default stdout)")

    ev = sub.add_parser("eval", help="score a predicted treebank against gold")
    ev.add_argument("--formalism", required=True, choices=("dep", "const"))
    ev.add_argument("--gold", required=True)
    ev.add_argument("--pred", required=True)
    ev.add_argument("--min-support", type=int, default=10)
    ev.add_argument("--out", default=None, help="report JSON path (default stdout)")
    return parser


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8", errors="strict")
    except FileNotFoundError:
        raise DataError(f"no such file: {path}")
    except UnicodeDecodeError as exc:
        raise DataError(f"{path} is not valid UTF-8: {exc}")


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except FileNotFoundError:
        raise DataError(f"no such file: {path}")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load_treebank(path: str, encoding: str):
    text = _read_text(path)
    try:
        if encoding == "constlevels":
            return read_brackets(text)
        return read_conllu(text)
    except (ConlluParseError, BracketParseError) as exc:
        raise DataError(f"{path}: {exc}")


def cmd_encode(args: argparse.Namespace) -> int:
    trees = _load_treebank(args.treebank, args.encoding)
    if args.encoding == "constlevels":
        rows = [(t.forms, constcodec.encode_levels(t)) for t in trees]
        _emit(constcodec.write_const_labels(rows), args.out)
    else:
        rows = [(t.forms, depcodec.encode_dep_tree(t, args.encoding)) for t in trees]
        _emit(depcodec.write_dep_labels(rows), args.out)
    return EXIT_OK


def cmd_decode(args: argparse.Namespace) -> int:
    text = _read_text(args.labels)
    try:
        if args.encoding == "constlevels":
            sentences = constcodec.read_const_labels(text)
            trees = [
                constcodec.decode_levels(labels, [(f, "_") for f in forms])
                for forms, labels in sentences
            ]
            _emit(write_brackets(trees), args.out)
        else:
            sentences = depcodec.read_dep_labels(text)
            trees = [
                depcodec.decode_dep_labels(labels, args.encoding, forms=forms)
                for forms, labels in sentences
            ]
            _emit(write_conllu(trees), args.out)
    except (depcodec.LabelFormatError, ValueError) as exc:
        raise DataError(f"{args.labels}: {exc}")
    return EXIT_OK


def _load_embeddings(path: str):
    try:
        return probe.read_embeddings(_read_bytes(path))
    except probe.EmbeddingFormatError as exc:
        raise DataError(f"{path}: {exc}")


def _check_id_hashes(path: str, table, sentences) -> None:
    if len(table.sentences) != len(sentences):
        raise DataError(
            f"{path}: {len(table.sentences)} embedded sentences, treebank has {len(sentences)}"
        )
    for i, ((id_hash, vectors), sent) in enumerate(zip(table.sentences, sentences)):
        if id_hash != probe.sentence_id_hash(sent.id):
            raise DataError(f"{path}: sentence {i} id hash does not match treebank id {sent.id!r}")
        if vectors.shape[0] != len(sent.words):
            raise DataError(
                f"{path}: sentence {i} has {vectors.shape[0]} vectors for {len(sent.words)} words"
            )


def cmd_probe(args: argparse.Namespace) -> int:
    is_const = args.encoding == "constlevels"
    train_trees = _load_treebank(args.train, args.encoding)
    test_trees = _load_treebank(args.test, args.encoding)
    if args.dev is not None:
        _load_treebank(args.dev, args.encoding)

    setups = ("frz", "rnd") if args.setup == "both" else (args.setup,)
    paths = {"frz": args.frz_embeddings, "rnd": args.rnd_embeddings}
    for setup in setups:
        if paths[setup] is None:
            raise SystemExit_(f"--{setup}-embeddings is required for setup {args.setup!r}")

    wrap = const_sentences if is_const else dep_sentences
    embeddings: dict[str, dict[str, object]] = {}
    for setup in setups:
        train_path, test_path = paths[setup]
        train_table = _load_embeddings(train_path)
        test_table = _load_embeddings(test_path)
        _check_id_hashes(train_path, train_table, wrap(train_trees))
        _check_id_hashes(test_path, test_table, wrap(test_trees))
        embeddings[setup] = {"train": train_table, "test": test_table}

    config = probe.ProbeConfig(
        learning_rate=args.lr,
        epochs=args.epochs,
        batch_size=args.batch_size,
        seed=args.seed,
    )
    try:
        result = probe.evaluate_setup_pair(
            train_trees,
            test_trees,
            embeddings,  # type: ignore[arg-type]
            args.encoding,
            config,
            min_support=args.min_support,
            setups=setups,
        )
    except probe.AlignmentError as exc:
        raise DataError(str(exc))

    result["seed"] = args.seed
    result["inputs"] = {
        "train": args.train,
        "dev": args.dev,
        "test": args.test,
        "frz_embeddings": "+".join(args.frz_embeddings) if args.frz_embeddings else None,
        "rnd_embeddings": "+".join(args.rnd_embeddings) if args.rnd_embeddings else None,
    }
    if args.ftd_score is not None:
        result["ftd_score"] = args.ftd_score
        frz = result["setups"].get("frz")
        if frz is not None and frz["score"] < 100.0:
            result["error_reduction"]["frz_ftd"] = probe.error_reduction_safe(
                frz["score"], args.ftd_score
            )
    _emit(report.dumps_report(result), args.out)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    encoding = "constlevels" if args.formalism == "const" else "relhead"
    gold = _load_treebank(args.gold, encoding)
    pred = _load_treebank(args.pred, encoding)
    try:
        if args.formalism == "dep":
            score = metrics.las(gold, pred)
            table = metrics.f1_by_displacement(gold, pred, min_support=args.min_support)
            scores = {
                "las": score.las,
                "uas": score.uas,
                "correct_both": score.correct_both,
                "correct_head": score.correct_head,
                "total": score.total,
            }
        else:
            score = metrics.bracket_f1(gold, pred)
            table = metrics.f1_by_span_length(gold, pred, min_support=args.min_support)
            scores = {
                "precision": score.precision,
                "recall": score.recall,
                "f1": score.f1,
                "matched": score.matched,
                "predicted": score.predicted,
                "gold": score.gold,
            }
    except ValueError as exc:
        raise DataError(str(exc))
    result = {
        "formalism": "dependency" if args.formalism == "dep" else "constituency",
        "scores": scores,
        "breakdown": {
            "kind": table.kind,
            "min_support": table.min_support,
            "entries": [
                {"key": e.key, "f1": e.f1, "support": e.support} for e in table.entries
            ],
        },
        "inputs": {"gold": args.gold, "pred": args.pred},
    }
    _emit(report.dumps_report(result), args.out)
    return EXIT_OK


_COMMANDS = {
    "encode": cmd_encode,
    "decode": cmd_decode,
    "probe": cmd_probe,
    "eval": cmd_eval,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit_ as exc:
        print(f"synprobe: error: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except SystemExit_ as exc:
        print(f"synprobe: error: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"synprobe: error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
