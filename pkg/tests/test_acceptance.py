"""Acceptance suite: one test per acceptance criterion, each printing a
pass/fail line with the measured value and its bound.

These run on synthetic data at desk scale; tolerances and budgets are stated
inline next to each assertion."""

import json
import threading
import time
import urllib.request

import numpy as np
import pytest

from biaslens import corpus as C
from biaslens import metrics as M
from biaslens import net as N
from biaslens import pipeline as P
from biaslens.gateway import GatewayConfig, GatewayServer
from biaslens.screener import ScreenEngine
from helpers import classifier_grad_error, lm_grad_error

from test_metrics import oracle_auc, oracle_kappa, oracle_prf


def _line(name: str, ok: bool, detail: str):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}", flush=True)
    assert ok, f"{name}: {detail}"


# --- shared fixtures -------------------------------------------------------------

@pytest.fixture(scope="module")
def ordering_corpus(tmp_path_factory):
    """The 500-sentence labeled set (imbalanced default mix) plus its two
    unlabeled companions, used by the transfer-benefit criterion."""
    root = tmp_path_factory.mktemp("acceptance-data")
    spec = C.SyntheticSpec(seed=20, size=500, general_size=1200, domain_size=2000)
    synthetic = C.gen_synthetic(spec)
    C.save_labeled(synthetic.labeled, root / "labeled.jsonl")
    C.save_sentences(synthetic.general, root / "general.txt")
    C.save_sentences(synthetic.domain, root / "domain.txt")
    return root


def _ordering_plan(root, out_dir, seed):
    return P.StagePlan(
        stages=[P.StageSpec(str(root / "general.txt"), epochs=8, learning_rate=3e-3,
                            batch_size=32, role="general"),
                P.StageSpec(str(root / "domain.txt"), epochs=12, learning_rate=3e-3,
                            batch_size=32, role="domain")],
        labeled_path=str(root / "labeled.jsonl"),
        out_dir=str(out_dir),
        seed=seed,
        model={"embed_dim": 32, "hidden_dim": 64, "dropout_keep": 0.8, "bptt_window": 32},
        classifier=P.FinetuneSettings(max_epochs=60, learning_rate=1e-2,
                                      batch_size=16, patience=5),
    )


@pytest.fixture(scope="module")
def screening_model(tmp_path_factory):
    """A well-trained checkpoint for the screening and serving criteria
    (larger labeled set than the ordering experiment; quality matters here)."""
    root = tmp_path_factory.mktemp("screen-model")
    spec = C.SyntheticSpec(seed=21, size=1500, general_size=1500, domain_size=2500)
    synthetic = C.gen_synthetic(spec)
    C.save_labeled(synthetic.labeled, root / "labeled.jsonl")
    C.save_sentences(synthetic.general, root / "general.txt")
    C.save_sentences(synthetic.domain, root / "domain.txt")
    plan = P.StagePlan(
        stages=[P.StageSpec(str(root / "general.txt"), epochs=8, learning_rate=3e-3,
                            batch_size=32, role="general"),
                P.StageSpec(str(root / "domain.txt"), epochs=12, learning_rate=3e-3,
                            batch_size=32, role="domain")],
        labeled_path=str(root / "labeled.jsonl"),
        out_dir=str(root / "run"),
        seed=11,
        model={"embed_dim": 32, "hidden_dim": 64, "dropout_keep": 0.8, "bptt_window": 32},
        classifier=P.FinetuneSettings(max_epochs=80, learning_rate=1e-2,
                                      batch_size=16, patience=15),
    )
    return P.run_progressive(plan)


# --- criteria --------------------------------------------------------------------

def test_gradient_oracle():
    started = time.time()
    lm_standard = lm_grad_error("standard")
    lm_wide = lm_grad_error("wide")
    clf_standard = classifier_grad_error("standard")
    clf_wide = classifier_grad_error("wide")
    elapsed = time.time() - started
    ok = (lm_standard < 1e-3 and clf_standard < 1e-3
          and lm_wide < 1e-6 and clf_wide < 1e-6 and elapsed < 120)
    _line("gradient oracle", ok,
          f"standard lm={lm_standard:.2e} clf={clf_standard:.2e} (< 1e-3), "
          f"wide lm={lm_wide:.2e} clf={clf_wide:.2e} (< 1e-6), {elapsed:.0f}s (< 120s)")


def test_lm_learning(tmp_path):
    started = time.time()
    spec = C.SyntheticSpec(seed=30, size=10, general_size=4200, domain_size=10)
    synthetic = C.gen_synthetic(spec)
    tokens = sum(len(C.tokenize(s)) + 2 for s in synthetic.general)
    assert tokens >= 50_000, f"general corpus too small: {tokens} tokens"
    corpus_path = tmp_path / "general.txt"
    C.save_sentences(synthetic.general, corpus_path)
    vocab = C.build_vocab([C.tokenize(s) for s in synthetic.general])
    config = N.ModelConfig(vocab_size=len(vocab), embed_dim=32, hidden_dim=64,
                           dropout_keep=0.8, bptt_window=32)
    log = P.TrainLog()
    stage = P.StageSpec(str(corpus_path), epochs=20, learning_rate=3e-3,
                        batch_size=32, role="general")
    P.run_pretrain_stage(None, corpus_path, vocab, stage, tmp_path / "lm.ckpt",
                         seed=5, stage_id="general", model_config=config, log=log)
    elapsed = time.time() - started
    ppl = [row["valid_ppl"] for row in log.rows]
    ratio = min(ppl) / ppl[0]
    ok = ratio <= 0.70 and elapsed < 600
    _line("lm learning", ok,
          f"{tokens} tokens, ppl {ppl[0]:.1f} -> {min(ppl):.1f} "
          f"(ratio {ratio:.3f} <= 0.70), {elapsed:.0f}s (< 600s)")


def test_transfer_benefit_ordering(ordering_corpus, tmp_path):
    started = time.time()
    progressive, ablation = [], []
    for seed in range(5):
        result = P.run_progressive(_ordering_plan(ordering_corpus, tmp_path / f"run{seed}", seed))
        progressive.append(result.report.macro[2])

        vocab = C.Vocabulary.load(result.vocab_path)
        records = C.load_labeled(ordering_corpus / "labeled.jsonl")
        split = C.make_splits(records, seed=P.derive_seed(seed, "split"))
        config = N.ModelConfig(vocab_size=len(vocab), embed_dim=32, hidden_dim=64,
                               dropout_keep=0.8, bptt_window=32)
        _, report = P.ablate_no_pretrain(
            split, vocab, P.FinetuneSettings(max_epochs=60, learning_rate=1e-2,
                                             batch_size=16, patience=5),
            tmp_path / f"abl{seed}.ckpt", seed=P.derive_seed(seed, "finetune"),
            model_config=config)
        ablation.append(report.macro[2])
    elapsed = time.time() - started
    wins = sum(p >= a for p, a in zip(progressive, ablation))
    med_p, med_a = float(np.median(progressive)), float(np.median(ablation))
    ok = med_p >= med_a and wins >= 4 and elapsed < 1800
    _line("transfer-benefit ordering", ok,
          f"median macro-F1 progressive {med_p:.3f} >= ablation {med_a:.3f}, "
          f"paired wins {wins}/5 (>= 4), {elapsed:.0f}s (< 1800s); "
          f"progressive={[f'{x:.3f}' for x in progressive]} "
          f"ablation={[f'{x:.3f}' for x in ablation]}")


def test_metric_oracles():
    started = time.time()
    rng = np.random.default_rng(0)
    worst = 0.0
    checked = 0
    while checked < 1000:
        k = int(rng.integers(2, 6))
        n = int(rng.integers(2, 51))
        golds = rng.integers(0, k, n)
        if np.unique(golds).size < 2:
            continue
        preds = rng.integers(0, k, n)
        scores = rng.random((n, k))
        cm = M.confusion(golds.tolist(), preds.tolist(), classes=list(range(k)))
        for averaging in ("macro", "weighted"):
            got = M.prf(cm, averaging)
            want = oracle_prf(golds.tolist(), preds.tolist(), k, averaging)
            worst = max(worst, max(abs(g - w) for g, w in zip(got, want)))
        worst = max(worst, abs(M.cohen_kappa(cm) - oracle_kappa(golds.tolist(), preds.tolist(), k)))
        worst = max(worst, abs(M.auc_ovr(scores, golds) - oracle_auc(scores.tolist(), golds.tolist())))
        checked += 1

    cm = M.confusion([0, 0, 0, 1, 1, 1], [0, 0, 1, 0, 1, 1])
    accuracy_ok = abs(M.accuracy(cm) - 2 / 3) < 1e-9
    kappa_ok = abs(M.cohen_kappa(cm) - 1 / 3) < 1e-9
    auc_fixture = M.auc_ovr(np.array([[0.1, 0.9], [0.2, 0.8], [0.6, 0.4], [0.8, 0.2]]),
                            [1, 0, 1, 0])
    auc_ok = abs(auc_fixture - 0.75) < 1e-9
    elapsed = time.time() - started
    ok = worst < 1e-9 and accuracy_ok and kappa_ok and auc_ok and elapsed < 60
    _line("metric oracles", ok,
          f"1000 cases worst |diff| {worst:.2e} (< 1e-9), fixtures acc 0.6667 "
          f"kappa 0.3333 auc 0.75, {elapsed:.1f}s (< 60s)")


def test_split_fidelity():
    spec = C.SyntheticSpec(seed=33, size=57_424, general_size=0, domain_size=0)
    records = C.gen_synthetic(spec).labeled
    split = C.make_splits(records, seed=12)
    overall = {label: sum(1 for r in records if r.label == label) for label in C.LABELS}
    max_drift = 0.0
    for part in (split.train, split.valid, split.test):
        for label, count in overall.items():
            share = count / len(records)
            got = sum(1 for r in part if r.label == label) / len(part)
            max_drift = max(max_drift, abs(got - share))
    ok = len(split.test) == 5743 and max_drift <= 0.01
    _line("split fidelity", ok,
          f"N=57424 -> test support {len(split.test)} (== 5743), "
          f"max stratification drift {max_drift * 100:.2f}pt (<= 1pt)")


def test_freeze_and_chain_invariants(mini_model):
    stages = mini_model.manifest["stages"]
    chain_ok = all(
        stages[i]["input_sha256"] == stages[i - 1]["output_sha256"]
        for i in range(1, len(stages))
    )

    lm = N.load_checkpoint(stages[-2]["output_checkpoint"])
    clf = N.load_checkpoint(stages[-1]["output_checkpoint"])
    freeze_ok = (
        lm.lm_head_w.value.tobytes() == clf.backbone.lm_head_w.value.tobytes()
        and lm.lm_head_b.value.tobytes() == clf.backbone.lm_head_b.value.tobytes()
    )

    tokens = np.arange(4, 16, dtype=np.int32)
    before, _ = N.forward_classifier(clf, tokens)
    resaved = stages[-1]["output_checkpoint"] + ".resaved"
    N.save_checkpoint(clf, resaved)
    reloaded = N.load_checkpoint(resaved)
    after, _ = N.forward_classifier(reloaded, tokens)
    roundtrip_ok = np.array_equal(before, after)

    ok = chain_ok and freeze_ok and roundtrip_ok
    _line("freeze + chain invariants", ok,
          f"chain hashes linked={chain_ok}, lm_head bytes frozen={freeze_ok}, "
          f"save/load forward bit-identical={roundtrip_ok}")


def test_screening_examples(screening_model):
    engine = ScreenEngine.from_checkpoint(screening_model.classifier_checkpoint,
                                          screening_model.vocab_path)
    age_text = "We are a young organisation looking for young and talented marketers."
    age = engine.screen_text(age_text)
    age_ok = any(f.label == "AGE" and f.confidence >= 0.5 for f in age.findings)

    neutral_spec = C.SyntheticSpec(seed=77, size=40, class_mix={"UNBIASED": 1.0},
                                   general_size=0, domain_size=0)
    neutral_text = " ".join(r.text for r in C.gen_synthetic(neutral_spec).labeled[:20])
    neutral = engine.screen_text(neutral_text)
    neutral_ok = len(neutral.findings) == 0

    ok = age_ok and neutral_ok
    detail = (f"AGE example -> {[(f.label, round(f.confidence, 3)) for f in age.findings]}, "
              f"neutral-only text -> {len(neutral.findings)} findings (== 0)")
    _line("screening examples", ok, detail)


def test_serving(screening_model, tmp_path, ordering_corpus):
    started = time.time()
    config = GatewayConfig(
        checkpoint_path=screening_model.classifier_checkpoint,
        vocab_path=screening_model.vocab_path,
        port=0,
        workers=8,  # the serving contract's parallel-request figure
        log_path=str(tmp_path / "soak.jsonl"),
    )
    server = GatewayServer(config).start()
    assert server.wait_ready(180)
    base = f"http://127.0.0.1:{server.port}"

    records = C.load_labeled(ordering_corpus / "labeled.jsonl")
    texts = []
    for i in range(4):
        text = " ".join(r.text for r in records[i * 6 : i * 6 + 5])
        assert len(text.encode()) <= 1024
        texts.append(text)
    engine = ScreenEngine.from_checkpoint(screening_model.classifier_checkpoint,
                                          screening_model.vocab_path)
    expected = {t: engine.screen_text(t).to_json().encode() for t in texts}

    total_requests = 500
    clients = 64
    per_client = [total_requests // clients + (1 if i < total_requests % clients else 0)
                  for i in range(clients)]
    latencies = []
    failures = []
    mismatches = []
    lock = threading.Lock()
    barrier = threading.Barrier(clients)

    def client(idx, count):
        barrier.wait()
        for j in range(count):
            text = texts[(idx + j) % len(texts)]
            body = json.dumps({"text": text}).encode()
            request = urllib.request.Request(base + "/v1/screen", data=body,
                                             headers={"Content-Type": "application/json"})
            t0 = time.perf_counter()
            try:
                with urllib.request.urlopen(request, timeout=120) as response:
                    payload = response.read()
                    status = response.status
            except urllib.error.HTTPError as error:
                status, payload = error.code, b""
            except OSError as error:
                status, payload = 599, str(error).encode()
            dt = (time.perf_counter() - t0) * 1000.0
            with lock:
                latencies.append(dt)
                if status >= 500:
                    failures.append((status, payload[:120]))
                elif payload != expected[text]:
                    mismatches.append(text[:40])

    threads = [threading.Thread(target=client, args=(i, n))
               for i, n in enumerate(per_client)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    server.shutdown()

    elapsed = time.time() - started
    median = float(np.median(latencies))
    worst = float(np.max(latencies))
    fairness_ok = worst <= 2.0 * median
    ok = (len(latencies) == total_requests and not failures and not mismatches
          and fairness_ok and elapsed < 300)
    _line("serving", ok,
          f"{total_requests} requests via 64 clients on 8 workers: 5xx={len(failures)}, "
          f"byte mismatches={len(mismatches)}, latency median {median:.1f}ms "
          f"max {worst:.1f}ms (max <= 2x median: {fairness_ok}), {elapsed:.0f}s (< 300s)")
