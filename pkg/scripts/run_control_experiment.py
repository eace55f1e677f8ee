#!/usr/bin/env python3
"""Run the synthetic frozen-vs-control probe experiment through the CLI.

Generates a random dependency corpus, writes CoNLL-U splits plus EMB1
embedding files (frz = one-hot gold labels + noise, rnd = pure noise),
then invokes `synprobe probe` on the files and prints the report summary.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from synprobe import cli, control, probe
from synprobe.treebank import write_conllu


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="control_run", help="where files land")
    parser.add_argument("--encoding", default="relhead",
                        choices=("relhead", "2planar", "archybrid"))
    parser.add_argument("--train-sentences", type=int, default=2000)
    parser.add_argument("--test-sentences", type=int, default=400)
    parser.add_argument("--noise-sigma", type=float, default=0.1)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    train = control.make_control_corpus(args.train_sentences, seed=args.seed, id_prefix="t")
    test = control.make_control_corpus(args.test_sentences, seed=args.seed + 1, id_prefix="e")
    tables = control.make_control_embeddings(
        {"train": train, "test": test},
        args.encoding,
        seed=args.seed + 2,
        noise_sigma=args.noise_sigma,
    )

    (out / "train.conllu").write_text(write_conllu(train), encoding="utf-8")
    (out / "test.conllu").write_text(write_conllu(test), encoding="utf-8")
    for setup in ("frz", "rnd"):
        for split in ("train", "test"):
            path = out / f"{setup}_{split}.emb"
            path.write_bytes(probe.write_embeddings(tables[setup][split]))

    report_path = out / "report.json"
    code = cli.main(
        [
            "probe",
            "--encoding", args.encoding,
            "--train", str(out / "train.conllu"),
            "--test", str(out / "test.conllu"),
            "--frz-embeddings", str(out / "frz_train.emb"), str(out / "frz_test.emb"),
            "--rnd-embeddings", str(out / "rnd_train.emb"), str(out / "rnd_test.emb"),
            "--seed", str(args.seed),
            "--out", str(report_path),
        ]
    )
    if code != 0:
        return code

    report = json.loads(report_path.read_text(encoding="utf-8"))
    frz = report["setups"]["frz"]["score"]
    rnd = report["setups"]["rnd"]["score"]
    print(f"report: {report_path}")
    print(f"frz {report['metric']}: {frz:.2f}")
    print(f"rnd {report['metric']}: {rnd:.2f} (repair baseline {report['baseline_score']:.2f})")
    print(f"error reduction rnd->frz: {report['error_reduction']['rnd_frz']:.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
