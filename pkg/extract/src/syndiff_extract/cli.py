"""Command-line front of the extraction adapter.

`run` mirrors the fields of an extraction job; `validate` checks LDEB files
structurally. Prints a JSON summary to stdout; exit 0 on success, 1 on
domain errors, 2 on usage errors.
"""

import argparse
import json
import sys

from .ldeb import validate_ldeb
from .runner import POOLING_MODES, VARIANTS, ExtractionJob, extract


def _parse_layers(text):
    layers = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            layers.extend(range(int(lo), int(hi) + 1))
        elif part:
            layers.append(int(part))
    return tuple(layers)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="syndiff-extract",
        description="Extract word-aligned encoder hidden states into LDEB files.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("run", help="run an extraction job")
    p.add_argument("--treebank", required=True)
    p.add_argument("--language", required=True)
    p.add_argument("--model-path", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--variant", choices=VARIANTS, default="pretrained")
    p.add_argument("--checkpoint")
    p.add_argument("--layers", default="0-12", type=_parse_layers)
    p.add_argument("--pooling", choices=POOLING_MODES, default="mean")
    p.add_argument("--max-seq-len", type=int, default=128)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="structural check of LDEB files")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_validate)
    return parser


def cmd_run(args):
    job = ExtractionJob(
        treebank=args.treebank,
        language=args.language,
        model_path=args.model_path,
        output_dir=args.output_dir,
        variant=args.variant,
        checkpoint=args.checkpoint,
        layers=args.layers,
        pooling=args.pooling,
        max_seq_len=args.max_seq_len,
        batch_size=args.batch_size,
        seed=args.seed,
    )
    result = extract(job)
    summary = dict(result["report"])
    summary["files"] = {str(k): v for k, v in result["files"].items()}
    return 0, summary


def cmd_validate(args):
    problems = []
    reports = {}
    for path in args.files:
        try:
            ok, report = validate_ldeb(path)
        except OSError as exc:
            ok, report = False, {"problems": [str(exc)]}
        reports[path] = report
        if not ok:
            problems.extend(f"{path}: {p}" for p in report["problems"])
    return (1 if problems else 0), {"problems": problems, "files": reports}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        code, summary = args.func(args)
    except (ValueError, OSError) as exc:
        print(json.dumps({"status": "error", "message": str(exc)}), file=sys.stderr)
        return 1
    summary["status"] = "ok" if code == 0 else "problems"
    print(json.dumps(summary, sort_keys=True))
    return code


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
