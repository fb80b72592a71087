"""Shared gradient-verification helpers.

The central-difference oracle always evaluates losses at the kernel's widest
precision (longdouble); "standard" checks compare float32 analytic gradients
against that oracle, "wide" checks compare longdouble analytic gradients."""

import numpy as np

from biaslens import net as N
from biaslens.numkit import finite_diff_check

TINY = dict(vocab_size=20, embed_dim=8, hidden_dim=12)

WIDE = np.longdouble
STANDARD = np.float32


def tiny_lm_config(dropout_keep=1.0, bptt_window=32, num_classes=0):
    return N.ModelConfig(dropout_keep=dropout_keep, bptt_window=bptt_window,
                         num_classes=num_classes, **TINY)


def tiny_tokens(length=6, seed=7):
    rng = np.random.default_rng(seed)
    return rng.integers(0, TINY["vocab_size"], size=length)


def _seed_class_head(clf, seed=101):
    rng = np.random.default_rng(seed)
    clf.class_w.value[:] = rng.uniform(-0.3, 0.3, clf.class_w.shape).astype(clf.dtype)
    clf.class_b.value[:] = rng.uniform(-0.1, 0.1, clf.class_b.shape).astype(clf.dtype)


def lm_grad_error(precision: str, seed=1, per_param=False):
    """Max relative error between analytic BPTT and the wide central difference."""
    tokens = tiny_tokens()
    inputs, targets = tokens[:-1], tokens[1:]
    dtype = STANDARD if precision == "standard" else WIDE
    network = N.LmNetwork(tiny_lm_config(), seed=seed, dtype=dtype)
    _, cache = N.forward_lm(network, inputs, mode="train")
    N.backward_bptt(network, cache, targets, clip_norm=None)
    wide = network if dtype == WIDE else network.astype(WIDE)

    def loss(params):
        return N.lm_loss(wide, inputs[None, :], targets[None, :])

    if per_param:
        return {p.name: finite_diff_check(loss, [p]) for p in wide.parameters()}
    return finite_diff_check(loss, wide.parameters())


def classifier_grad_error(precision: str, seed=1, label=3):
    tokens = tiny_tokens(length=7, seed=11)
    dtype = STANDARD if precision == "standard" else WIDE

    network = N.LmNetwork(tiny_lm_config(), seed=seed, dtype=dtype)
    clf = N.attach_classifier_head(network, 5)
    _seed_class_head(clf)  # zero head would zero the backbone gradients
    _, cache = N.forward_classifier(clf, tokens, mode="train")
    N.backward_bptt(clf, cache, [label], clip_norm=None)
    wide = clf if dtype == WIDE else clf.astype(WIDE)

    def loss(params):
        return N.classifier_loss(wide, tokens[None, :], [tokens.size], [label])

    return finite_diff_check(loss, wide.trainable_parameters())
