"""Text pipeline: sentence splitting, tokenization, vocabulary construction,
labeled-dataset management with stratified splits, batch construction for the
LM and the classifier, and a deterministic synthetic bias-corpus generator
used for desk-scale runs.

Labels follow the five-class taxonomy UNBIASED / GENDER / RACE / AGE /
AMBIGUOUS over two sub-domains (JD = job description, NJD = everything else).
"""

import hashlib
import json
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import ConfigError, FormatError, InputError

LABELS = ("UNBIASED", "GENDER", "RACE", "AGE", "AMBIGUOUS")
LABEL_TO_INDEX = {name: i for i, name in enumerate(LABELS)}
LABEL_ALIASES = {"NOT_APPROPRIATE": "AMBIGUOUS", "NOT APPROPRIATE": "AMBIGUOUS"}
SUB_DOMAINS = ("JD", "NJD")

# default class mix is deliberately imbalanced so macro vs weighted averaging diverges
DEFAULT_CLASS_MIX = {
    "UNBIASED": 0.50,
    "GENDER": 0.25,
    "RACE": 0.12,
    "AGE": 0.08,
    "AMBIGUOUS": 0.05,
}


def canonical_label(raw: str) -> str:
    name = str(raw).strip().upper()
    name = LABEL_ALIASES.get(name, name)
    if name not in LABEL_TO_INDEX:
        raise InputError(f"unknown label {raw!r}; expected one of {LABELS}")
    return name


# --- sentence splitting -------------------------------------------------------

def _load_abbreviations() -> frozenset:
    text = resources.files("biaslens").joinpath("data/abbreviations.txt").read_text()
    entries = set()
    for line in text.splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            entries.add(line)
    return frozenset(entries)


ABBREVIATIONS = _load_abbreviations()

_BOUNDARY = re.compile(r"[.!?]+(?=\s+[A-Z0-9])")


def split_sentences_with_spans(text: str):
    """Split on terminal punctuation followed by whitespace and an uppercase
    letter or digit, honoring the abbreviation table. Returns
    (sentence, start, end) with text[start:end] == sentence."""
    pieces = []
    start = 0
    for match in _BOUNDARY.finditer(text):
        end = match.end()
        before = text[:end]
        last_word = before.rsplit(None, 1)[-1] if before.split() else ""
        if last_word.lower() in ABBREVIATIONS:
            continue
        pieces.append((start, end))
        start = end
    pieces.append((start, len(text)))

    out = []
    for lo, hi in pieces:
        segment = text[lo:hi]
        stripped = segment.strip()
        if not stripped:
            continue
        begin = lo + segment.index(stripped[0])
        out.append((stripped, begin, begin + len(stripped)))
    return out


def split_sentences(text: str):
    return [s for s, _, _ in split_sentences_with_spans(text)]


# --- tokenization and vocabulary ----------------------------------------------

_TOKEN = re.compile(r"[a-z]+|[0-9]+|[^a-z0-9\s]")
NUM_TOKEN = "NUM"


def tokenize(sentence: str):
    """Lowercase, split punctuation into standalone tokens, collapse digit runs."""
    out = []
    for tok in _TOKEN.findall(sentence.lower()):
        out.append(NUM_TOKEN if tok.isdigit() else tok)
    return out


class Vocabulary:
    PAD, UNK, BOS, EOS = 0, 1, 2, 3
    SPECIALS = ("<pad>", "<unk>", "<bos>", "<eos>")

    def __init__(self, content_tokens, min_freq: int, max_size: int):
        self.min_freq = min_freq
        self.max_size = max_size
        self.itos = list(self.SPECIALS) + list(content_tokens)
        if len(self.itos) != len(set(self.itos)):
            raise InputError("vocabulary tokens must be unique")
        self.stoi = {tok: i for i, tok in enumerate(self.itos)}
        payload = "\n".join(self.itos) + f"\nmin_freq={min_freq} max_size={max_size}"
        self.digest = hashlib.sha256(payload.encode()).hexdigest()

    def __len__(self):
        return len(self.itos)

    def encode(self, tokens):
        unk = self.UNK
        return [self.stoi.get(t, unk) for t in tokens]

    def decode(self, ids):
        return [self.itos[i] for i in ids]

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"biaslens-vocab v1 min_freq={self.min_freq} "
                     f"max_size={self.max_size} digest={self.digest}\n")
            for tok in self.itos[len(self.SPECIALS):]:
                fh.write(tok + "\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            match = re.fullmatch(
                r"biaslens-vocab v1 min_freq=(\d+) max_size=(\d+) digest=([0-9a-f]{64})", header
            )
            if not match:
                raise FormatError(f"{path}: bad vocabulary header")
            tokens = [line.rstrip("\n") for line in fh if line.rstrip("\n")]
        vocab = cls(tokens, int(match.group(1)), int(match.group(2)))
        if vocab.digest != match.group(3):
            raise FormatError(f"{path}: vocabulary digest mismatch (file edited or truncated?)")
        return vocab


def build_vocab(token_streams, min_freq: int = 1, max_size: int = 50000) -> Vocabulary:
    """Frequency-ranked vocabulary; ties broken lexicographically so identical
    corpora always produce identical vocabularies."""
    if min_freq < 1:
        raise ConfigError(f"min_freq must be >= 1, got {min_freq}")
    if max_size < 4:
        raise ConfigError(f"max_size must be >= 4 (room for specials), got {max_size}")
    counts = Counter()
    for stream in token_streams:
        counts.update(stream)
    kept = [(tok, freq) for tok, freq in counts.items() if freq >= min_freq]
    kept.sort(key=lambda item: (-item[1], item[0]))
    room = max_size - len(Vocabulary.SPECIALS)
    return Vocabulary([tok for tok, _ in kept[:room]], min_freq, max_size)


def sentence_stream(text: str, vocab: Vocabulary) -> np.ndarray:
    """Token ids for one sentence wrapped in BOS/EOS, as used by both the LM
    and the classifier."""
    ids = [vocab.BOS] + vocab.encode(tokenize(text)) + [vocab.EOS]
    return np.asarray(ids, dtype=np.int32)


# --- labeled data ---------------------------------------------------------------

@dataclass
class LabeledSentence:
    text: str
    label: str
    sub_domain: str = "NJD"
    source_id: str = ""
    tokens: np.ndarray | None = None  # filled by encode_dataset

    def __post_init__(self):
        self.label = canonical_label(self.label)
        if self.sub_domain not in SUB_DOMAINS:
            raise InputError(f"sub_domain must be one of {SUB_DOMAINS}, got {self.sub_domain!r}")


def save_labeled(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            row = {"text": rec.text, "label": rec.label, "sub_domain": rec.sub_domain}
            if rec.source_id:
                row["source_id"] = rec.source_id
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def load_labeled(path):
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: not valid JSON") from exc
            if "text" not in row or "label" not in row:
                raise FormatError(f"{path}:{lineno}: record needs text and label fields")
            records.append(LabeledSentence(
                text=row["text"],
                label=row["label"],
                sub_domain=row.get("sub_domain", "NJD"),
                source_id=row.get("source_id", ""),
            ))
    return records


def encode_dataset(records, vocab: Vocabulary):
    for rec in records:
        rec.tokens = sentence_stream(rec.text, vocab)
    return records


def validate_labeled(records) -> dict:
    """Annotation QA stand-in: label-set check plus duplicate detection."""
    per_label = Counter(rec.label for rec in records)
    seen = Counter(rec.text for rec in records)
    duplicates = sorted(text for text, n in seen.items() if n > 1)
    empty = [rec.source_id or rec.text for rec in records if not tokenize(rec.text)]
    return {
        "total": len(records),
        "per_label": {name: per_label.get(name, 0) for name in LABELS},
        "duplicate_texts": len(duplicates),
        "empty_after_tokenize": len(empty),
    }


# --- stratified splits ----------------------------------------------------------

@dataclass
class DatasetSplit:
    train: list
    valid: list
    test: list
    seed: int


def _apportion(target: int, ideals, capacities):
    """Integer allocation by largest remainder, respecting per-class capacity."""
    base = [min(int(x), cap) for x, cap in zip(ideals, capacities)]
    remainders = sorted(
        range(len(ideals)),
        key=lambda i: (-(ideals[i] - int(ideals[i])), i),
    )
    short = target - sum(base)
    for i in remainders * 2:  # second pass catches capacity-limited classes
        if short == 0:
            break
        if base[i] < capacities[i]:
            base[i] += 1
            short -= 1
    if short != 0:
        raise InputError("cannot satisfy split sizes with the given class counts")
    return base


def make_splits(records, ratios=(0.8, 0.1, 0.1), seed: int = 0) -> DatasetSplit:
    """Per-class shuffled stratified 80-10-10 assignment.

    Global sizes are train = floor(r_train*N), valid = floor(r_valid*N),
    test = remainder; both are apportioned over classes by largest remainder,
    which keeps per-class proportions within one percentage point.
    """
    records = list(records)
    if not records:
        raise InputError("cannot split an empty dataset")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError(f"split ratios must sum to 1, got {ratios}")
    n = len(records)
    train_n = int(ratios[0] * n)
    valid_n = int(ratios[1] * n)

    classes = sorted({rec.label for rec in records}, key=lambda c: LABEL_TO_INDEX.get(c, 99))
    by_class = {c: [rec for rec in records if rec.label == c] for c in classes}
    rng = np.random.default_rng(seed)
    for c in classes:
        perm = rng.permutation(len(by_class[c]))
        by_class[c] = [by_class[c][i] for i in perm]

    counts = [len(by_class[c]) for c in classes]
    train_c = _apportion(train_n, [ratios[0] * m for m in counts], counts)
    valid_cap = [m - t for m, t in zip(counts, train_c)]
    valid_c = _apportion(valid_n, [ratios[1] * m for m in counts], valid_cap)

    train, valid, test = [], [], []
    for i, c in enumerate(classes):
        items = by_class[c]
        train.extend(items[: train_c[i]])
        valid.extend(items[train_c[i] : train_c[i] + valid_c[i]])
        test.extend(items[train_c[i] + valid_c[i] :])
    return DatasetSplit(train=train, valid=valid, test=test, seed=seed)


# --- batch construction ---------------------------------------------------------

@dataclass
class LmBatch:
    inputs: np.ndarray  # (B, W) int32, PAD-filled
    targets: np.ndarray  # (B, W) int64
    mask: np.ndarray  # (B, W) bool, True at real target positions
    carry: bool  # hidden state carries over from the previous window


@dataclass
class LmBatchSet:
    batches: list
    skipped: int  # streams shorter than 2 tokens

    def __iter__(self):
        return iter(self.batches)

    def __len__(self):
        return len(self.batches)


def make_lm_batches(streams, batch_size: int, bptt_window: int) -> LmBatchSet:
    """Group streams into batches of lockstep, non-overlapping shift-by-one
    windows; ragged tails are kept and masked."""
    usable = []
    skipped = 0
    for s in streams:
        s = np.asarray(s, dtype=np.int32)
        if s.size < 2:
            skipped += 1
            continue
        usable.append(s)

    batches = []
    for lo in range(0, len(usable), batch_size):
        group = usable[lo : lo + batch_size]
        b = len(group)
        longest = max(s.size for s in group)
        for wi, wlo in enumerate(range(0, longest - 1, bptt_window)):
            whi = min(wlo + bptt_window, longest - 1)
            width = whi - wlo
            inputs = np.zeros((b, width), np.int32)
            targets = np.zeros((b, width), np.int64)
            mask = np.zeros((b, width), bool)
            for bi, s in enumerate(group):
                avail = min(whi, s.size - 1) - wlo
                if avail > 0:
                    inputs[bi, :avail] = s[wlo : wlo + avail]
                    targets[bi, :avail] = s[wlo + 1 : wlo + 1 + avail]
                    mask[bi, :avail] = True
            batches.append(LmBatch(inputs, targets, mask, carry=wi > 0))
    return LmBatchSet(batches, skipped)


@dataclass
class ClsBatch:
    inputs: np.ndarray  # (B, T) int32, PAD-padded
    lengths: np.ndarray  # (B,)
    labels: np.ndarray  # (B,) int64


def make_cls_batches(records, batch_size: int) -> list:
    """Pad each batch to its own max length; lengths let the classifier read
    the true final hidden state rather than a pad position."""
    if not records:
        raise InputError("cannot batch an empty partition")
    out = []
    for lo in range(0, len(records), batch_size):
        chunk = records[lo : lo + batch_size]
        lengths = np.asarray([rec.tokens.size for rec in chunk], np.int64)
        width = int(lengths.max())
        inputs = np.zeros((len(chunk), width), np.int32)
        for i, rec in enumerate(chunk):
            inputs[i, : rec.tokens.size] = rec.tokens
        labels = np.asarray([LABEL_TO_INDEX[rec.label] for rec in chunk], np.int64)
        out.append(ClsBatch(inputs, lengths, labels))
    return out


# --- synthetic corpus generator --------------------------------------------------

# trigger spans are 4-5 words, mirroring how bias shows up in review batches
TRIGGER_LEXICONS = {
    "GENDER": [
        "a strong man to lead",
        "he must manage the team",
        "salesman with a proven record",
        "guys who can hustle hard",
        "a motherly touch with clients",
        "chairman material for the board",
        "manpower for the night shift",
        "she will keep things tidy",
        "a real family man",
        "gentlemen with sharp suits",
        "an experienced waitress for evenings",
        "male candidates preferred for this",
        "the right man for sales",
        "strong men for warehouse duties",
        "a salesgirl for the counter",
        "he should close big deals",
        "female staff for reception duties",
        "a boys club sales culture",
        "fatherly advice for new reps",
        "ladies with a gentle manner",
        "bros who love the grind",
        "hostess needed for client dinners",
        "a macho attitude wins here",
        "wives of staff may assist",
    ],
    "RACE": [
        "native english speakers only please",
        "local candidates only need apply",
        "own development of brownbag sessions",
        "no foreign accents on calls",
        "candidates from our own community",
        "must sound local on calls",
        "prefer applicants of local origin",
        "a native speaker is required",
        "locals only for this branch",
        "no overseas degrees will count",
        "must blend with our heritage",
        "accent free english is mandatory",
        "citizens of this country only",
        "a western sounding phone name",
        "no thick accents in demos",
        "homegrown talent only for us",
        "english as first language required",
        "exotic names get screened out",
        "a domestic upbringing is essential",
        "raised in this city only",
        "our town our people first",
        "newcomers from abroad rarely fit",
    ],
    "AGE": [
        "young and talented marketers",
        "recent graduates only please",
        "digital natives under thirty",
        "a young and energetic team",
        "fresh blood for the team",
        "no one over forty",
        "energetic youngsters for field work",
        "young hustlers wanted right now",
        "under thirty five years old",
        "mature workers need not apply",
        "a youthful vibe is required",
        "young guns for the floor",
        "graduates from this year only",
        "must bring youthful energy daily",
        "twenty somethings with big dreams",
        "no grey hair on camera",
        "young blood for bold ideas",
        "students fresh out of college",
        "a dynamic young crowd here",
        "millennials preferred for this squad",
        "born after 2000 only please",
        "retirees will not fit in",
        "school leavers make ideal recruits",
        "a fresh faced sales crew",
    ],
    "AMBIGUOUS": [
        "smart candidate for this position",
        "the right kind of person",
        "a certain kind of person",
        "someone who just fits in",
        "a natural fit you see",
        "the right sort of fit",
        "a certain vibe about them",
        "the right vibe for us",
        "that certain something we want",
        "a face that fits here",
        "the kind we usually keep",
        "the right look for clients",
        "a certain energy about them",
    ],
}

# benign uses of trigger words are interleaved throughout so bias must be read
# from the whole phrase, not from a single word
NEUTRAL_PHRASES = [
    "a dedicated engineer with references",
    "the young orchard initiative",
    "an experienced accountant for payroll",
    "native plant landscaping services",
    "a reliable project manager",
    "local market analysis dashboards",
    "a skilled technician for repairs",
    "a smart whiteboard for meetings",
    "a collaborative designer with portfolio",
    "the right tools for audits",
    "a detail oriented analyst",
    "fresh produce logistics planning",
    "a certified electrician for sites",
    "strong coffee for the breakroom",
    "a motivated sales representative",
    "mature forest survey results",
    "an organised office coordinator",
    "energetic music for the lobby",
    "a licensed nurse for clinics",
    "fit testing for respirators",
    "a patient support specialist",
    "a careful warehouse operator",
    "a punctual delivery driver",
    "a curious research assistant",
]

SENTENCE_TEMPLATES = {
    "jd": [
        "we are looking for {phrase} to join the {team} team",
        "the {role} role needs {phrase} starting {timeframe}",
        "our client requires {phrase} for a {term} contract",
        "apply now because we want {phrase} in our {city} office",
        "this position calls for {phrase} with {skill} experience",
        "the hiring panel shortlisted {phrase} after the {timeframe} review",
        "the {city} branch is recruiting {phrase} for {skill} work",
        "our {team} unit expects {phrase} on the roster soon",
        "the opening in {city} suits {phrase} with {skill} chops",
        "we will prioritise {phrase} when filling the {role} seat",
        "ideal applicants are {phrase} ready to start {timeframe}",
        "for the {term} engagement we need {phrase} immediately",
        "the {team} lead asked us to source {phrase}",
        "hiring goal this {timeframe} is {phrase} for {city}",
        "recruiters should target {phrase} for the {role} pipeline",
        "shortlist only {phrase} when screening for {skill} duties",
    ],
    "njd": [
        "our latest report highlights {phrase} across the division",
        "the internal newsletter praised {phrase} during {timeframe}",
        "customers told us they want {phrase} handling their accounts",
        "the memo suggested {phrase} for the upcoming campaign",
        "a draft post described {phrase} as our brand voice",
        "the town hall slides mentioned {phrase} twice this {timeframe}",
        "survey feedback kept asking for {phrase} at the helpdesk",
        "the blog draft frames {phrase} as our quarterly theme",
        "marketing wants {phrase} front and centre in {city}",
        "the product notes recommend {phrase} for the launch page",
        "support tickets often mention {phrase} when praising the {team} desk",
        "the annual review credits {phrase} for the {timeframe} numbers",
    ],
    "AGE": [
        "we are a young organisation looking for {phrase}",
    ],
}

_SLOT_POOLS = {
    "team": ["platform", "finance", "support", "logistics", "growth", "design",
             "payments", "security", "research", "operations"],
    "role": ["analyst", "developer", "manager", "consultant", "coordinator", "specialist",
             "architect", "administrator", "planner", "auditor", "recruiter", "writer"],
    "timeframe": ["monday", "next quarter", "this spring", "6 weeks", "next month",
                  "late summer", "the new year", "2 sprints"],
    "term": ["9 month", "fixed term", "permanent", "seasonal", "12 week", "interim"],
    "city": ["brisbane", "london", "pune", "austin", "berlin", "toronto", "madrid", "osaka"],
    "skill": ["reporting", "logistics", "compliance", "analytics", "scheduling",
              "procurement", "forecasting", "onboarding", "localisation", "testing"],
    "place": ["the valley", "the old town", "the riverside", "the market square", "the campus"],
    "count": ["3", "5", "12", "40"],
    "thing": ["budget", "schedule", "survey", "menu", "exhibit", "garden", "bridge"],
}

_PREFIX_CLAUSES = [
    "as we scale", "after the merger", "per the town hall", "according to the plan",
    "with budget approved", "once the audit closes", "for the new roadmap",
]

_SUFFIX_CLAUSES = [
    "before the deadline", "across all sites", "with minimal supervision",
    "pending final signoff", "as discussed on friday",
]

GENERAL_SENTENCES = [
    "the quarterly forecast shows steady growth in {count} of our markets",
    "a light rain moved across {place} before the morning commute",
    "the recipe calls for {count} cups of flour and a pinch of salt",
    "the committee reviewed the {thing} and approved the travel plan",
    "our train left the station {count} minutes behind schedule",
    "the library extended its opening hours during the exam season",
    "a local team won the regional tournament after extra time",
    "the museum opened a new {thing} exhibit near {place}",
    "engineers repaired the {thing} over the long weekend",
    "the {thing} needs attention twice a week in summer",
    "analysts expect the {thing} results by {timeframe}",
    "the cafeteria introduced a seasonal menu with {count} new dishes",
    "volunteers planted {count} trees along the path near the office",
    "the annual report summarises spending across every department",
    "the keynote in {city} covered supply chains and regional logistics",
    "the orchestra rehearsed in {place} on {timeframe}",
    "students presented their projects during the open day",
    "the weather service issued a heat advisory for {place}",
    "a software update improved the battery life of the scanners",
    "the ferry schedule changes at the start of the wet season",
]


@dataclass
class SyntheticSpec:
    """Deterministic recipe for a labeled corpus plus its two unlabeled
    companions (a broad general corpus and a job-description domain corpus)."""

    seed: int = 0
    size: int = 500
    class_mix: dict = field(default_factory=lambda: dict(DEFAULT_CLASS_MIX))
    lexicons: dict = field(default_factory=lambda: {k: list(v) for k, v in TRIGGER_LEXICONS.items()})
    templates: dict = field(default_factory=lambda: {k: list(v) for k, v in SENTENCE_TEMPLATES.items()})
    general_size: int = 2000
    domain_size: int = 1200

    def __post_init__(self):
        total = sum(self.class_mix.values())
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"class_mix must sum to 1, got {total}")
        for name in self.class_mix:
            canonical_label(name)
        for name, phrases in self.lexicons.items():
            for phrase in phrases:
                words = len(phrase.split())
                if not 4 <= words <= 5:
                    raise ConfigError(
                        f"{name} trigger {phrase!r} has {words} words; spans must be 4-5 words"
                    )


@dataclass
class SyntheticCorpus:
    labeled: list  # LabeledSentence records
    general: list  # unlabeled sentences, broad topics (first pretraining stage)
    domain: list  # unlabeled job-description sentences (second pretraining stage)


def _fill(template: str, phrase: str, rng: random.Random, clauses: bool = False) -> str:
    text = template.replace("{phrase}", phrase)
    for slot, pool in _SLOT_POOLS.items():
        token = "{" + slot + "}"
        while token in text:
            text = text.replace(token, rng.choice(pool), 1)
    if clauses:
        if rng.random() < 0.2:
            text = rng.choice(_PREFIX_CLAUSES) + " " + text
        if rng.random() < 0.15:
            text = text + " " + rng.choice(_SUFFIX_CLAUSES)
    return text[0].upper() + text[1:] + "."


def _zipf_choice(rng: random.Random, phrases, exponent: float = 1.3):
    # labeled data is long-tailed: common phrasings dominate, rare ones are
    # barely annotated; pretraining corpora cover the tail uniformly
    weights = [1.0 / (i + 1) ** exponent for i in range(len(phrases))]
    return rng.choices(phrases, weights=weights, k=1)[0]


def gen_synthetic(spec: SyntheticSpec) -> SyntheticCorpus:
    """Generate the labeled set and both unlabeled companion corpora.

    Unlabeled corpora deliberately cover the full trigger lexicons so that
    progressive pretraining sees phrases the small labeled set may miss.
    """
    rng = random.Random(spec.seed)
    classes = [c for c in LABELS if spec.class_mix.get(c, 0) > 0]
    ideals = [spec.class_mix[c] * spec.size for c in classes]
    counts = _apportion(spec.size, ideals, [spec.size] * len(classes))

    labels = [c for c, n in zip(classes, counts) for _ in range(n)]
    rng.shuffle(labels)

    labeled = []
    for i, label in enumerate(labels):
        sub_domain = "JD" if rng.random() < 0.44 else "NJD"
        pool = list(spec.templates["jd" if sub_domain == "JD" else "njd"])
        if sub_domain == "JD":
            pool += spec.templates.get(label, [])
        template = rng.choice(pool)
        if label == "UNBIASED":
            phrase = _zipf_choice(rng, NEUTRAL_PHRASES)
        else:
            phrase = _zipf_choice(rng, spec.lexicons[label])
        labeled.append(LabeledSentence(
            text=_fill(template, phrase, rng, clauses=True),
            label=label,
            sub_domain=sub_domain,
            source_id=f"syn-{i:06d}",
        ))

    general = [_fill(rng.choice(GENERAL_SENTENCES), "", rng) for _ in range(spec.general_size)]

    domain = []
    bias_classes = [c for c in LABELS if c != "UNBIASED" and spec.lexicons.get(c)]
    for _ in range(spec.domain_size):
        template = rng.choice(spec.templates["jd"] + spec.templates["njd"])
        if not bias_classes or rng.random() < 0.5:
            phrase = rng.choice(NEUTRAL_PHRASES)
        else:
            cls = rng.choice(bias_classes)
            phrase = rng.choice(spec.lexicons[cls])
        domain.append(_fill(template, phrase, rng, clauses=True))
    return SyntheticCorpus(labeled=labeled, general=general, domain=domain)


def save_sentences(sentences, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in sentences:
            fh.write(s + "\n")


def load_sentences(path):
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]
