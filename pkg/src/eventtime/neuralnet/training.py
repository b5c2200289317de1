"""Mini-batch training with Adam, gradient clipping and early stopping."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ..corpus import LinkInstance
from ..sralgebra import SRVector
from .model import Model, ModelConfig, build_vocab, init_params

log = logging.getLogger(__name__)


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    seed: int
    lr: float = 1e-3
    batch_size: int = 16
    epochs: int = 50
    patience: int = 5
    clip_norm: float = 5.0
    valid_fraction: float = 0.2

    def __post_init__(self):
        if self.lr <= 0 or self.clip_norm < 0:
            raise TrainingError("lr must be positive and clip_norm non-negative")
        if self.batch_size < 1 or self.epochs < 1 or self.patience < 1:
            raise TrainingError("batch_size, epochs and patience must be >= 1")
        if not 0 <= self.valid_fraction < 1:
            raise TrainingError("valid_fraction must lie in [0, 1)")


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    valid_match: float


@dataclass
class TrainResult:
    model: Model
    best_epoch: int
    best_valid: float
    history: list[EpochRecord] = field(default_factory=list)


class Adam:
    def __init__(self, params: dict[str, np.ndarray], lr: float = 1e-3,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for k in sorted(params):
            g = grads[k]
            m, v = self.m[k], self.v[k]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            params[k] -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def clip_gradients(grads: dict[str, np.ndarray], max_norm: float) -> float:
    norm = math.sqrt(sum(float(np.sum(g * g)) for _, g in sorted(grads.items())))
    if max_norm > 0 and norm > max_norm:
        scale = max_norm / norm
        for g in grads.values():
            g *= scale
    return norm


def complete_match(model: Model, links: Sequence[LinkInstance]) -> float:
    if not links:
        return 0.0
    hits = sum(model.predict(link) == link.gold for link in links)
    return hits / len(links)


def split_validation(links: list[LinkInstance], fraction: float, rng: np.random.Generator):
    n_valid = max(1, int(round(fraction * len(links)))) if len(links) > 1 else 0
    order = rng.permutation(len(links))
    valid = [links[i] for i in sorted(order[:n_valid])]
    train = [links[i] for i in sorted(order[n_valid:])]
    return train, valid


def train(dataset: Sequence[LinkInstance], model_config: ModelConfig, config: TrainConfig,
          valid: Optional[Sequence[LinkInstance]] = None,
          pretrained: Optional[dict[str, np.ndarray]] = None,
          on_epoch: Optional[Callable[[EpochRecord], None]] = None,
          extra_vocab: tuple[str, ...] = ()) -> TrainResult:
    """Train a classifier for one link kind and return the best-on-validation model.

    Without an explicit ``valid`` set a fraction of ``dataset`` is held out.
    Training stops after ``patience`` epochs without improvement in
    validation complete-match. ``extra_vocab`` adds embedding rows beyond
    the training tokens, typically every token with a pretrained vector.
    """
    links = [link for link in dataset if link.gold is not None]
    if not links:
        raise TrainingError("no gold-labeled instances to train on")
    kinds = {link.kind for link in links}
    if kinds != {model_config.kind}:
        raise TrainingError(f"dataset kinds {sorted(kinds)} do not match model kind {model_config.kind}")

    init_seq, data_seq = np.random.SeedSequence(config.seed).spawn(2)
    rng = np.random.default_rng(data_seq)
    if valid is None:
        links, valid = split_validation(links, config.valid_fraction, rng)
    else:
        valid = [link for link in valid if link.gold is not None]
    if not links:
        raise TrainingError("training split is empty")

    vocab = build_vocab(links, model_config.lowercase, extra_vocab)
    model = Model(model_config, vocab, init_params(model_config, vocab, np.random.default_rng(init_seq), pretrained))
    opt = Adam(model.params, lr=config.lr)

    best = model.copy()
    best_score, best_epoch, stale = -1.0, 0, 0
    history = []
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(links))
        total = 0.0
        for lo in range(0, len(order), config.batch_size):
            batch = [links[i] for i in order[lo:lo + config.batch_size]]
            grads = {k: np.zeros_like(v) for k, v in model.params.items()}
            for link in batch:
                loss, _ = model.loss_and_gradients(link, grads=grads)
                if not math.isfinite(loss):
                    raise TrainingError(f"non-finite loss at epoch {epoch} on {link.doc}/{link.event}->{link.target}")
                total += loss
            for g in grads.values():
                g /= len(batch)
            clip_gradients(grads, config.clip_norm)
            opt.step(model.params, grads)
        score = complete_match(model, valid) if valid else complete_match(model, links)
        rec = EpochRecord(epoch, total / len(links), score)
        history.append(rec)
        log.info("epoch %d loss %.4f valid complete-match %.4f", epoch, rec.train_loss, score)
        if on_epoch:
            on_epoch(rec)
        if score > best_score:
            best, best_score, best_epoch, stale = model.copy(), score, epoch, 0
        else:
            stale += 1
            if stale >= config.patience:
                break
    return TrainResult(best, best_epoch, best_score, history)


def predict_all(model: Model, links: Sequence[LinkInstance]) -> list[SRVector]:
    return [model.predict(link) for link in links]
