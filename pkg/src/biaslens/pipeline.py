"""Progressive transfer-learning orchestrator: sequential LM pretraining over
an ordered list of corpora (general before domain), classifier fine-tuning on
top of the frozen vocabulary head, and the no-pretraining ablation.

Each stage consumes the previous stage's checkpoint file, so a finished run
leaves an auditable chain: stage checkpoints, a JSONL train log, a manifest
with content hashes, and the evaluation report for the untouched test split.
"""

import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .corpus import (
    LABELS,
    DatasetSplit,
    Vocabulary,
    build_vocab,
    encode_dataset,
    load_labeled,
    load_sentences,
    make_cls_batches,
    make_lm_batches,
    make_splits,
    sentence_stream,
    tokenize,
)
from .errors import BiaslensError, ConfigError, InputError, OrderingError, StratificationError
from .metrics import EvalReport, confusion, full_report, prf, render_report
from .net import (
    LmNetwork,
    ModelConfig,
    attach_classifier_head,
    backward_bptt,
    file_sha256,
    forward_classifier_batch,
    forward_lm_batch,
    load_checkpoint,
    masked_mean_nll,
    save_checkpoint,
)
from .numkit import AdamConfig, adam_step

STAGE_ROLES = ("general", "domain")


def derive_seed(*parts) -> int:
    """Stable child seed from a tuple of ints/strings."""
    ints = []
    for part in parts:
        if isinstance(part, str):
            ints.extend(part.encode())
        else:
            ints.append(int(part))
    return int(np.random.SeedSequence(ints).generate_state(1)[0])


class StageFailure(BiaslensError):
    def __init__(self, message, last_good_checkpoint=None):
        super().__init__(message)
        self.last_good_checkpoint = last_good_checkpoint


@dataclass
class StageSpec:
    corpus_path: str
    epochs: int = 20
    learning_rate: float = 1e-3
    batch_size: int = 32
    role: str = "general"

    def __post_init__(self):
        if self.role not in STAGE_ROLES:
            raise ConfigError(f"stage role must be one of {STAGE_ROLES}, got {self.role!r}")
        if self.epochs < 0:
            raise ConfigError("stage epochs must be >= 0")


@dataclass
class FinetuneSettings:
    max_epochs: int = 30
    learning_rate: float = 1e-3
    batch_size: int = 32
    patience: int = 5


@dataclass
class StagePlan:
    stages: list
    labeled_path: str
    out_dir: str
    seed: int = 0
    model: dict = field(default_factory=dict)  # ModelConfig overrides (vocab_size is derived)
    vocab: dict = field(default_factory=lambda: {"min_freq": 1, "max_size": 50000})
    classifier: FinetuneSettings = field(default_factory=FinetuneSettings)

    def __post_init__(self):
        if not self.stages:
            raise ConfigError("a plan needs at least one pretraining stage")
        seen_domain = False
        for stage in self.stages:
            if stage.role == "domain":
                seen_domain = True
            elif seen_domain:
                raise OrderingError(
                    "stages must run general before domain; a general stage "
                    "cannot follow a domain stage"
                )


def load_plan(path) -> StagePlan:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    stages = [StageSpec(**s) for s in raw.get("stages", [])]
    classifier = FinetuneSettings(**raw.get("classifier", {}))
    return StagePlan(
        stages=stages,
        labeled_path=raw["labeled_path"],
        out_dir=raw["out_dir"],
        seed=int(raw.get("seed", 0)),
        model=raw.get("model", {}),
        vocab=raw.get("vocab", {"min_freq": 1, "max_size": 50000}),
        classifier=classifier,
    )


class TrainLog:
    """Append-only per-epoch records; one row per (stage, epoch)."""

    def __init__(self, echo=False):
        self.rows = []
        self.echo = echo

    def add(self, **row):
        key = (row.get("stage"), row.get("epoch"))
        if any((r.get("stage"), r.get("epoch")) == key for r in self.rows):
            raise InputError(f"duplicate train-log record for stage/epoch {key}")
        self.rows.append(row)
        if self.echo:
            print("  " + " ".join(f"{k}={v}" for k, v in row.items()), flush=True)

    def save_jsonl(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for row in self.rows:
                fh.write(json.dumps(row, sort_keys=True) + "\n")


def _snapshot(params):
    return [p.value.copy() for p in params]


def _restore(params, snap):
    for p, v in zip(params, snap):
        p.value[:] = v


def _lm_eval_loss(network, streams, batch_size):
    total, count = 0.0, 0
    state = None
    for batch in make_lm_batches(streams, batch_size, network.config.bptt_window):
        if not batch.carry:
            state = None
        probs, cache = forward_lm_batch(network, batch.inputs, "eval", init_state=state)
        state = cache.final_state
        n = int(batch.mask.sum())
        loss = masked_mean_nll(probs, batch.targets.T.reshape(-1), batch.mask.T.reshape(-1))
        total += float(loss) * n
        count += n
    if count == 0:
        raise InputError("validation corpus has no usable token streams")
    return total / count


def run_pretrain_stage(checkpoint_in, corpus_path, vocab: Vocabulary, settings: StageSpec,
                       out_path, seed: int, stage_id: str, model_config: ModelConfig = None,
                       log: TrainLog = None, valid_sentences=None):
    """Train the LM on one corpus, starting from a checkpoint or from scratch.

    Logs an epoch-0 validation record before any update, tracks the best
    validation perplexity, and writes the best-validation checkpoint.
    """
    log = log if log is not None else TrainLog()
    sentences = load_sentences(corpus_path)
    if not sentences:
        raise InputError(f"{corpus_path}: corpus is empty")

    if checkpoint_in is not None:
        network = load_checkpoint(checkpoint_in, expected_vocab=vocab)
    else:
        if model_config is None:
            raise ConfigError("a fresh stage needs a model_config")
        network = LmNetwork(model_config, seed=derive_seed(seed, "init"), vocab_hash=vocab.digest)

    if valid_sentences is None:
        rng = np.random.default_rng(derive_seed(seed, "lm-valid-split", stage_id))
        perm = rng.permutation(len(sentences))
        n_valid = max(1, int(0.1 * len(sentences)))
        valid_idx = set(perm[:n_valid].tolist())
        train_sents = [s for i, s in enumerate(sentences) if i not in valid_idx]
        valid_sents = [sentences[i] for i in sorted(valid_idx)]
    else:
        train_sents = sentences
        valid_sents = list(valid_sentences)

    train_streams = [sentence_stream(s, vocab) for s in train_sents]
    valid_streams = [sentence_stream(s, vocab) for s in valid_sents]

    adam = AdamConfig(learning_rate=settings.learning_rate)
    params = network.trainable_parameters()

    valid_loss = _lm_eval_loss(network, valid_streams, settings.batch_size)
    log.add(stage=stage_id, epoch=0, train_loss=None, valid_loss=round(valid_loss, 6),
            valid_ppl=round(float(np.exp(valid_loss)), 4), seconds=0.0)
    best_ppl = np.exp(valid_loss)
    best_values = _snapshot(params)

    for epoch in range(1, settings.epochs + 1):
        t0 = time.perf_counter()
        rng = np.random.default_rng(derive_seed(seed, "epoch", stage_id, epoch))
        order = rng.permutation(len(train_streams))
        batches = make_lm_batches([train_streams[i] for i in order],
                                  settings.batch_size, network.config.bptt_window)
        state = None
        loss_sum, loss_n = 0.0, 0
        for bi, batch in enumerate(batches):
            if not batch.carry:
                state = None
            probs, cache = forward_lm_batch(
                network, batch.inputs, "train",
                dropout_seed=derive_seed(seed, stage_id, epoch, bi), init_state=state)
            state = cache.final_state
            n = int(batch.mask.sum())
            loss_sum += float(masked_mean_nll(
                probs, batch.targets.T.reshape(-1), batch.mask.T.reshape(-1))) * n
            loss_n += n
            touched = backward_bptt(network, cache, batch.targets, mask=batch.mask)
            for p in touched:
                adam_step(p, adam)
                p.zero_grad()
        valid_loss = _lm_eval_loss(network, valid_streams, settings.batch_size)
        ppl = float(np.exp(valid_loss))
        log.add(stage=stage_id, epoch=epoch, train_loss=round(loss_sum / loss_n, 6),
                valid_loss=round(valid_loss, 6), valid_ppl=round(ppl, 4),
                seconds=round(time.perf_counter() - t0, 3))
        if ppl < best_ppl:
            best_ppl = ppl
            best_values = _snapshot(params)

    _restore(params, best_values)
    save_checkpoint(network, out_path)
    return out_path


def predict_classifier(clf, records, batch_size=64):
    """Eval-mode predictions: (gold labels, predicted labels, score matrix)."""
    golds, preds, scores = [], [], []
    for batch in make_cls_batches(records, batch_size):
        probs, _ = forward_classifier_batch(clf, batch.inputs, batch.lengths, "eval")
        for row, label_idx in zip(probs, batch.labels):
            preds.append(LABELS[int(row.argmax())])
            golds.append(LABELS[int(label_idx)])
            scores.append(row.astype(float))
    return golds, preds, np.asarray(scores)


def _valid_macro_f1(clf, records, batch_size):
    golds, preds, _ = predict_classifier(clf, records, batch_size)
    cm = confusion(golds, preds, classes=list(LABELS))
    return prf(cm, "macro")[2]


def finetune_classifier(lm_checkpoint, split: DatasetSplit, vocab: Vocabulary,
                        settings: FinetuneSettings, out_path, seed: int,
                        model_config: ModelConfig = None, log: TrainLog = None,
                        freeze_lm_head: bool = True, stage_id: str = "classifier"):
    """Fine-tune the classifier head (plus unfrozen backbone) on the train
    partition, early-stopping on validation macro-F1, reporting on test."""
    log = log if log is not None else TrainLog()
    present = {rec.label for rec in split.train}
    missing = [c for c in LABELS if c not in present]
    if missing:
        raise StratificationError(f"training partition is missing classes: {missing}")

    if lm_checkpoint is not None:
        backbone = load_checkpoint(lm_checkpoint, expected_vocab=vocab)
    else:
        if model_config is None:
            raise ConfigError("ablation without a checkpoint needs a model_config")
        backbone = LmNetwork(model_config, seed=derive_seed(seed, "init"), vocab_hash=vocab.digest)
    clf = attach_classifier_head(backbone, len(LABELS), class_names=LABELS,
                                 freeze_lm_head=freeze_lm_head)

    for part in (split.train, split.valid, split.test):
        encode_dataset(part, vocab)

    adam = AdamConfig(learning_rate=settings.learning_rate)
    params = clf.trainable_parameters()
    all_params = clf.parameters()

    best_f1 = -1.0
    best_values = _snapshot(all_params)
    stall = 0
    for epoch in range(1, settings.max_epochs + 1):
        t0 = time.perf_counter()
        rng = np.random.default_rng(derive_seed(seed, "cls-epoch", epoch))
        order = rng.permutation(len(split.train))
        batches = make_cls_batches([split.train[i] for i in order], settings.batch_size)
        loss_sum, loss_n = 0.0, 0
        for bi, batch in enumerate(batches):
            probs, cache = forward_classifier_batch(
                clf, batch.inputs, batch.lengths, "train",
                dropout_seed=derive_seed(seed, "cls", epoch, bi))
            loss_sum += float(masked_mean_nll(probs, batch.labels)) * len(batch.labels)
            loss_n += len(batch.labels)
            touched = backward_bptt(clf, cache, batch.labels)
            for p in touched:
                adam_step(p, adam)
                p.zero_grad()
        f1 = _valid_macro_f1(clf, split.valid, settings.batch_size)
        log.add(stage=stage_id, epoch=epoch, train_loss=round(loss_sum / loss_n, 6),
                valid_macro_f1=round(f1, 6), seconds=round(time.perf_counter() - t0, 3))
        if f1 > best_f1 + 1e-9:
            best_f1 = f1
            best_values = _snapshot(all_params)
            stall = 0
        else:
            if f1 >= best_f1 - 1e-9:
                # tie on the small validation set: keep the later, better-trained snapshot
                best_values = _snapshot(all_params)
            stall += 1
            if stall >= settings.patience:
                break

    _restore(all_params, best_values)
    save_checkpoint(clf, out_path)
    golds, preds, scores = predict_classifier(clf, split.test, settings.batch_size)
    report = full_report(golds, preds, scores=scores, classes=list(LABELS))
    return out_path, report


def ablate_no_pretrain(split: DatasetSplit, vocab: Vocabulary, settings: FinetuneSettings,
                       out_path, seed: int, model_config: ModelConfig,
                       log: TrainLog = None):
    """Identical training loop, but from random initial weights with nothing frozen."""
    return finetune_classifier(None, split, vocab, settings, out_path, seed,
                               model_config=model_config, log=log,
                               freeze_lm_head=False, stage_id="ablation")


@dataclass
class RunResult:
    classifier_checkpoint: str
    report: EvalReport
    manifest: dict
    log: TrainLog
    vocab_path: str


def run_progressive(plan: StagePlan, log: TrainLog = None) -> RunResult:
    """Execute the full chain: shared vocabulary, ordered LM stages, classifier."""
    log = log if log is not None else TrainLog()
    os.makedirs(plan.out_dir, exist_ok=True)

    records = load_labeled(plan.labeled_path)
    stage_sentences = [load_sentences(s.corpus_path) for s in plan.stages]
    token_streams = [tokenize(s) for sents in stage_sentences for s in sents]
    token_streams += [tokenize(rec.text) for rec in records]
    vocab = build_vocab(token_streams, **plan.vocab)
    vocab_path = os.path.join(plan.out_dir, "vocab.txt")
    vocab.save(vocab_path)

    model_config = ModelConfig(vocab_size=len(vocab), **plan.model)
    split = make_splits(records, seed=derive_seed(plan.seed, "split"))

    manifest = {
        "seed": plan.seed,
        "vocab": {"path": vocab_path, "digest": vocab.digest, "size": len(vocab)},
        "model": model_config.to_dict(),
        "stages": [],
    }
    previous = None
    for i, stage in enumerate(plan.stages, start=1):
        stage_id = f"stage{i}-{stage.role}"
        out_path = os.path.join(plan.out_dir, f"stage{i}.ckpt")
        try:
            run_pretrain_stage(previous, stage.corpus_path, vocab, stage, out_path,
                               seed=derive_seed(plan.seed, "stage", i), stage_id=stage_id,
                               model_config=model_config, log=log)
        except BiaslensError as exc:
            raise StageFailure(
                f"{stage_id} failed: {exc}; last good checkpoint: {previous}",
                last_good_checkpoint=previous,
            ) from exc
        manifest["stages"].append({
            "id": stage_id,
            "role": stage.role,
            "corpus": stage.corpus_path,
            "input_checkpoint": previous,
            "input_sha256": file_sha256(previous) if previous else None,
            "output_checkpoint": out_path,
            "output_sha256": file_sha256(out_path),
        })
        previous = out_path

    clf_path = os.path.join(plan.out_dir, "classifier.ckpt")
    try:
        clf_path, report = finetune_classifier(previous, split, vocab, plan.classifier,
                                               clf_path, seed=derive_seed(plan.seed, "finetune"),
                                               log=log)
    except BiaslensError as exc:
        raise StageFailure(
            f"classifier stage failed: {exc}; last good checkpoint: {previous}",
            last_good_checkpoint=previous,
        ) from exc
    manifest["stages"].append({
        "id": "classifier",
        "role": "classifier",
        "corpus": plan.labeled_path,
        "input_checkpoint": previous,
        "input_sha256": file_sha256(previous) if previous else None,
        "output_checkpoint": clf_path,
        "output_sha256": file_sha256(clf_path),
    })

    log.save_jsonl(os.path.join(plan.out_dir, "trainlog.jsonl"))
    with open(os.path.join(plan.out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    with open(os.path.join(plan.out_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
    with open(os.path.join(plan.out_dir, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(render_report(report, title="test partition") + "\n")
    return RunResult(classifier_checkpoint=clf_path, report=report, manifest=manifest,
                     log=log, vocab_path=vocab_path)
