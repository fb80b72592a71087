"""Inference engine: document in, confidence-sorted sentence findings out.

The engine holds a read-only classifier; ``screen_text`` is reentrant and safe
to call from many threads at once."""

import hashlib
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .corpus import Vocabulary, sentence_stream, split_sentences_with_spans, tokenize
from .errors import ConfigError, SizeLimitError
from .net import ClassifierNetwork, file_sha256, forward_classifier, load_checkpoint

DEFAULT_THRESHOLD = 0.5
DEFAULT_MAX_BYTES = 1 << 20  # 1 MiB
UNBIASED_LABEL = "UNBIASED"


@dataclass
class SentenceFinding:
    sentence: str
    start: int
    end: int
    label: str
    confidence: float  # max class probability
    distribution: dict  # label -> probability

    def to_dict(self) -> dict:
        return {
            "sentence": self.sentence,
            "span": [self.start, self.end],
            "label": self.label,
            "confidence": round(self.confidence, 6),
            "distribution": {k: round(v, 6) for k, v in self.distribution.items()},
        }


@dataclass
class ScreenResult:
    source_digest: str
    checkpoint_id: str
    threshold: float
    findings: list = field(default_factory=list)
    elapsed_ms: float = 0.0  # excluded from the canonical JSON (volatile)

    def to_dict(self) -> dict:
        return {
            "source_digest": self.source_digest,
            "checkpoint_id": self.checkpoint_id,
            "threshold": self.threshold,
            "findings": [f.to_dict() for f in self.findings],
        }

    def to_json(self) -> str:
        """Canonical serialization: deterministic for a fixed text/model/threshold."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _check_threshold(value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"threshold must be in [0, 1], got {value}")
    return value


class ScreenEngine:
    def __init__(self, network: ClassifierNetwork, vocab: Vocabulary,
                 threshold: float = DEFAULT_THRESHOLD, checkpoint_id: str = "",
                 max_bytes: int = DEFAULT_MAX_BYTES):
        self.network = network
        self.vocab = vocab
        self.threshold = _check_threshold(threshold)
        self.checkpoint_id = checkpoint_id
        self.max_bytes = max_bytes
        self.classes = network.class_names

    @classmethod
    def from_checkpoint(cls, checkpoint_path, vocab_path, threshold: float = DEFAULT_THRESHOLD,
                        max_bytes: int = DEFAULT_MAX_BYTES) -> "ScreenEngine":
        vocab = Vocabulary.load(vocab_path)
        network = load_checkpoint(checkpoint_path, expected_vocab=vocab)
        return cls(network, vocab, threshold=threshold,
                   checkpoint_id=file_sha256(checkpoint_path)[:16], max_bytes=max_bytes)

    def set_threshold(self, value: float) -> "ScreenEngine":
        self.threshold = _check_threshold(value)
        return self

    def classify_sentence(self, sentence: str):
        """(label, confidence, distribution) for one sentence; None if no tokens."""
        if not tokenize(sentence):
            return None
        tokens = sentence_stream(sentence, self.vocab)
        probs, _ = forward_classifier(self.network, tokens, mode="eval")
        best = int(np.argmax(probs))
        distribution = {name: float(p) for name, p in zip(self.classes, probs)}
        return self.classes[best], float(probs[best]), distribution

    def screen_text(self, text: str, threshold: float = None) -> ScreenResult:
        """Split, classify, filter (non-UNBIASED and confident), sort by
        confidence descending with source order breaking ties."""
        started = time.perf_counter()
        if len(text.encode("utf-8")) > self.max_bytes:
            raise SizeLimitError(
                f"text is {len(text.encode('utf-8'))} bytes; limit is {self.max_bytes}"
            )
        threshold = self.threshold if threshold is None else _check_threshold(threshold)
        findings = []
        for sentence, start, end in split_sentences_with_spans(text):
            scored = self.classify_sentence(sentence)
            if scored is None:
                continue
            label, confidence, distribution = scored
            if label == UNBIASED_LABEL or confidence < threshold:
                continue
            findings.append(SentenceFinding(sentence, start, end, label, confidence, distribution))
        findings.sort(key=lambda f: (-f.confidence, f.start))
        return ScreenResult(
            source_digest=hashlib.sha256(text.encode("utf-8")).hexdigest()[:16],
            checkpoint_id=self.checkpoint_id,
            threshold=threshold,
            findings=findings,
            elapsed_ms=(time.perf_counter() - started) * 1000.0,
        )
