"""Command-line entry point: corpus prep, pretraining, fine-tuning,
evaluation, screening and serving, one subcommand each.

Exit codes: 0 success, 1 usage error, 2 runtime error. Every training
command echoes the seed it ran with so results can be reproduced."""

import argparse
import json
import os
import secrets
import sys

import numpy as np

from . import corpus, pipeline
from .errors import BiaslensError
from .metrics import full_report, render_report
from .gateway import GatewayConfig, GatewayServer
from .net import ModelConfig
from .screener import ScreenEngine


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _resolve_seed(args) -> int:
    seed = getattr(args, "seed", None)
    if seed is None:
        seed = secrets.randbelow(2**31)
    print(f"seed: {seed}")
    return seed


def _add_model_flags(sub):
    sub.add_argument("--embed-dim", type=int, default=64)
    sub.add_argument("--hidden-dim", type=int, default=128)
    sub.add_argument("--dropout-keep", type=float, default=0.5)
    sub.add_argument("--bptt-window", type=int, default=32)


def _model_config(args, vocab_size: int) -> ModelConfig:
    return ModelConfig(vocab_size=vocab_size, embed_dim=args.embed_dim,
                       hidden_dim=args.hidden_dim, dropout_keep=args.dropout_keep,
                       bptt_window=args.bptt_window)


def _load_split(args, seed: int):
    records = corpus.load_labeled(args.labeled)
    return corpus.make_splits(records, seed=pipeline.derive_seed(seed, "split"))


def _print_report(report, heading: str):
    print(render_report(report, title=heading))


def cmd_gen_data(args) -> int:
    seed = _resolve_seed(args)
    spec = corpus.SyntheticSpec(seed=seed, size=args.size,
                                general_size=args.general_size, domain_size=args.domain_size)
    synthetic = corpus.gen_synthetic(spec)
    os.makedirs(args.out_dir, exist_ok=True)
    corpus.save_labeled(synthetic.labeled, os.path.join(args.out_dir, "labeled.jsonl"))
    corpus.save_sentences(synthetic.general, os.path.join(args.out_dir, "general.txt"))
    corpus.save_sentences(synthetic.domain, os.path.join(args.out_dir, "domain.txt"))
    report = corpus.validate_labeled(synthetic.labeled)
    print(f"wrote {report['total']} labeled records, {len(synthetic.general)} general and "
          f"{len(synthetic.domain)} domain sentences to {args.out_dir}")
    print("per label:", json.dumps(report["per_label"]))
    return 0


def cmd_build_vocab(args) -> int:
    streams = []
    for path in args.corpus:
        streams.extend(corpus.tokenize(s) for s in corpus.load_sentences(path))
    for path in args.labeled or []:
        streams.extend(corpus.tokenize(rec.text) for rec in corpus.load_labeled(path))
    vocab = corpus.build_vocab(streams, min_freq=args.min_freq, max_size=args.max_size)
    vocab.save(args.out)
    print(f"vocabulary: {len(vocab)} tokens, digest {vocab.digest[:16]} -> {args.out}")
    return 0


def cmd_pretrain(args) -> int:
    seed = _resolve_seed(args)
    vocab = corpus.Vocabulary.load(args.vocab)
    settings = pipeline.StageSpec(corpus_path=args.corpus, epochs=args.epochs,
                                  learning_rate=args.lr, batch_size=args.batch_size,
                                  role=args.role)
    log = pipeline.TrainLog(echo=True)
    pipeline.run_pretrain_stage(args.from_checkpoint, args.corpus, vocab, settings,
                                args.out, seed=seed, stage_id=args.role,
                                model_config=_model_config(args, len(vocab)), log=log)
    print(f"checkpoint -> {args.out}")
    return 0


def cmd_run_pipeline(args) -> int:
    plan = pipeline.load_plan(args.plan)
    if args.seed is not None:
        plan.seed = args.seed
    print(f"seed: {plan.seed}")
    log = pipeline.TrainLog(echo=True)
    result = pipeline.run_progressive(plan, log=log)
    _print_report(result.report, "test partition")
    print(f"classifier checkpoint -> {result.classifier_checkpoint}")
    return 0


def cmd_finetune(args) -> int:
    seed = _resolve_seed(args)
    vocab = corpus.Vocabulary.load(args.vocab)
    split = _load_split(args, seed)
    settings = pipeline.FinetuneSettings(max_epochs=args.epochs, learning_rate=args.lr,
                                         batch_size=args.batch_size, patience=args.patience)
    log = pipeline.TrainLog(echo=True)
    _, report = pipeline.finetune_classifier(args.from_checkpoint, split, vocab, settings,
                                             args.out, seed=pipeline.derive_seed(seed, "finetune"),
                                             log=log)
    _print_report(report, "test partition")
    print(f"classifier checkpoint -> {args.out}")
    return 0


def cmd_ablate(args) -> int:
    seed = _resolve_seed(args)
    vocab = corpus.Vocabulary.load(args.vocab)
    split = _load_split(args, seed)
    settings = pipeline.FinetuneSettings(max_epochs=args.epochs, learning_rate=args.lr,
                                         batch_size=args.batch_size, patience=args.patience)
    log = pipeline.TrainLog(echo=True)
    _, report = pipeline.ablate_no_pretrain(split, vocab, settings, args.out,
                                            seed=pipeline.derive_seed(seed, "finetune"),
                                            model_config=_model_config(args, len(vocab)), log=log)
    _print_report(report, "test partition (no pretraining)")
    print(f"classifier checkpoint -> {args.out}")
    return 0


def _read_labels(path):
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def cmd_eval(args) -> int:
    golds = _read_labels(args.gold)
    preds = _read_labels(args.pred)
    scores = None
    if args.scores:
        scores = np.loadtxt(args.scores, delimiter=",", ndmin=2)
    if set(golds) | set(preds) <= set(corpus.LABELS):
        classes = [c for c in corpus.LABELS if c in set(golds) | set(preds)]
    else:
        classes = sorted(set(golds) | set(preds))
    report = full_report(golds, preds, scores=scores, classes=classes)
    _print_report(report, f"{args.gold} vs {args.pred}")
    return 0


def cmd_screen(args) -> int:
    engine = ScreenEngine.from_checkpoint(args.checkpoint, args.vocab, threshold=args.threshold)
    if args.text is not None:
        text = args.text
    elif args.input:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = sys.stdin.read()
    result = engine.screen_text(text)
    if args.format == "json":
        print(result.to_json())
    else:
        if not result.findings:
            print("no findings")
        for f in result.findings:
            print(f"{f.label:<10} {f.confidence:0.3f}  [{f.start}:{f.end}]  {f.sentence}")
    return 0


def cmd_serve(args) -> int:
    config = GatewayConfig(
        checkpoint_path=args.checkpoint, vocab_path=args.vocab, host=args.host,
        port=args.port, workers=args.workers, threshold=args.threshold,
        log_path=args.log_path, cors=not args.no_cors)
    server = GatewayServer(config)
    print(f"listening on http://{config.host}:{server.port} with {config.workers} workers",
          flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="biaslens", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate the synthetic labeled and unlabeled corpora")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--size", type=int, default=500)
    p.add_argument("--general-size", type=int, default=2000)
    p.add_argument("--domain-size", type=int, default=1200)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("build-vocab", help="build the shared vocabulary file")
    p.add_argument("--corpus", action="append", default=[], help="one-sentence-per-line file (repeatable)")
    p.add_argument("--labeled", action="append", default=[], help="labeled JSONL file (repeatable)")
    p.add_argument("--min-freq", type=int, default=1)
    p.add_argument("--max-size", type=int, default=50000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_vocab)

    p = sub.add_parser("pretrain", help="train the language model on one corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--from-checkpoint")
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--role", choices=pipeline.STAGE_ROLES, default="general")
    p.add_argument("--seed", type=int)
    _add_model_flags(p)
    p.set_defaults(func=cmd_pretrain)

    p = sub.add_parser("run-pipeline", help="run the full progressive pipeline from a plan file")
    p.add_argument("--plan", required=True)
    p.add_argument("--seed", type=int, help="overrides the plan's seed")
    p.set_defaults(func=cmd_run_pipeline)

    p = sub.add_parser("finetune", help="fine-tune a classifier from a pretrained checkpoint")
    p.add_argument("--from-checkpoint", required=True)
    p.add_argument("--labeled", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--patience", type=int, default=5)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_finetune)

    p = sub.add_parser("ablate", help="train the same classifier with no pretraining")
    p.add_argument("--labeled", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--patience", type=int, default=5)
    p.add_argument("--seed", type=int)
    _add_model_flags(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("eval", help="score prediction files (one label per line)")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--scores", help="optional CSV of per-class scores, columns in class order")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("screen", help="screen text from --text, --input or stdin")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--text")
    p.add_argument("--input")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_screen)

    p = sub.add_parser("serve", help="run the HTTP screening service")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--workers", type=int, default=8)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--log-path", default="screen-requests.jsonl")
    p.add_argument("--no-cors", action="store_true")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BiaslensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
