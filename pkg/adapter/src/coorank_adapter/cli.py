"""Adapter command line: produce score files, build fine-tuned models.

Exit codes: 0 success, 1 usage error, 2 data or model error.
"""

from __future__ import annotations

import argparse
import sys

from coorank_adapter import __version__
from coorank_adapter.corpus import AdapterError
from coorank_adapter.finetune import TrainConfig, finetune
from coorank_adapter.scoring import DUMMY_MODEL, AdapterConfig, score_corpus


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _cmd_score_corpus(args) -> int:
    config = AdapterConfig(
        model=args.model,
        max_seq_len=args.max_seq_len,
        batch_size=args.batch_size,
        device=args.device,
    )
    count = score_corpus(args.corpus, args.out, config)
    print(f"# scored {count} (dialogue, candidate) pairs with "
          f"{args.model}", file=sys.stderr)
    return 0


def _cmd_finetune(args) -> int:
    train_config = TrainConfig(
        negative_ratio=args.negative_ratio,
        seed=args.seed,
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
    )
    adapter_config = AdapterConfig(
        model=args.base_model,
        max_seq_len=args.max_seq_len,
        batch_size=args.batch_size,
        device=args.device,
    )
    out = finetune(args.train, args.out, args.base_model,
                   adapter_config, train_config)
    print(f"# model saved to {out}", file=sys.stderr)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="coorank-adapter",
        description="Produce first-pass score files for coorank corpora.",
    )
    parser.add_argument("--version", action="version",
                        version=f"coorank-adapter {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("score-corpus",
                       help="score every (dialogue, candidate) pair")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", default=DUMMY_MODEL,
                   help="model id or path, or 'dummy' for the built-in "
                        "lexical baseline (default)")
    p.add_argument("--out", required=True)
    p.add_argument("--max-seq-len", dest="max_seq_len", type=int,
                   default=128)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=128)
    p.add_argument("--device", default="cpu")
    p.set_defaults(func=_cmd_score_corpus)

    p = sub.add_parser("finetune",
                       help="fine-tune a sentence-pair classifier")
    p.add_argument("--train", required=True,
                   help="training corpus (dialogues with answers)")
    p.add_argument("--out", required=True, help="output model directory")
    p.add_argument("--base-model", dest="base_model", required=True,
                   help="base model id or path to fine-tune from")
    p.add_argument("--negative-ratio", dest="negative_ratio", type=int,
                   default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=3)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=128)
    p.add_argument("--learning-rate", dest="learning_rate", type=float,
                   default=2e-5)
    p.add_argument("--max-seq-len", dest="max_seq_len", type=int,
                   default=128)
    p.add_argument("--device", default="cpu")
    p.set_defaults(func=_cmd_finetune)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "command", None) is None:
            parser.print_usage(sys.stderr)
            print("coorank-adapter: a subcommand is required",
                  file=sys.stderr)
            return 1
        return args.func(args)
    except UsageError as exc:
        print(f"coorank-adapter: {exc}", file=sys.stderr)
        return 1
    except (AdapterError, OSError, ValueError) as exc:
        print(f"coorank-adapter: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
