"""Mention-wise attention BiLSTM classifier over E-D and E-T links.

Output layer: 16 logits read as 4 SRs x 4 labels, one softmax per SR.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..corpus import E_D, E_T, LINK_KINDS, LinkInstance
from ..sralgebra import LABELS, SRVector
from .layers import attend, attend_backward, bilstm_backward, bilstm_forward, matvec, softmax

N_SR = 4
N_LABELS = 4
N_OUT = N_SR * N_LABELS
UNK = "<unk>"
PROB_FLOOR = 1e-12


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    kind: str = E_D
    d_w: int = 200
    d_p: int = 16
    d_h: int = 64
    max_offset: int = 30
    attention: bool = True
    lowercase: bool = True

    def __post_init__(self):
        if self.kind not in LINK_KINDS:
            raise ConfigError(f"unknown link kind {self.kind!r}")
        for name in ("d_w", "d_p", "d_h", "max_offset"):
            if int(getattr(self, name)) <= 0:
                raise ConfigError(f"{name} must be positive")

    @property
    def n_mentions(self) -> int:
        return 2 if self.kind == E_T else 1

    @property
    def input_width(self) -> int:
        return self.d_w + self.n_mentions * self.d_p

    @property
    def feature_width(self) -> int:
        if not self.attention:
            return 2 * self.d_h
        return self.n_mentions * 4 * self.d_h

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class EmbeddingTable:
    vocab: list[str]
    matrix: np.ndarray
    position: np.ndarray
    max_offset: int
    lowercase: bool = True
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.index = {tok: i for i, tok in enumerate(self.vocab)}

    def token_id(self, token: str) -> int:
        return self.index.get(token.lower() if self.lowercase else token, 0)

    def position_id(self, offset: int) -> int:
        return int(np.clip(offset, -self.max_offset, self.max_offset)) + self.max_offset


@dataclass
class SRPrediction:
    probs: np.ndarray  # (4, 4): SR x label

    @property
    def vector(self) -> SRVector:
        # argmax keeps the first maximum, so ties go to the earlier label
        return SRVector(*(LABELS[j] for j in self.probs.argmax(axis=-1)))


@dataclass
class Encoded:
    ids: np.ndarray
    positions: list[np.ndarray]
    mentions: list[int]


def build_vocab(links, lowercase: bool = True, extra: tuple[str, ...] = ()) -> list[str]:
    toks = {t.lower() if lowercase else t for link in links for t in link.tokens}
    toks.update(t.lower() if lowercase else t for t in extra)
    toks.discard(UNK)
    return [UNK, *sorted(toks)]


def init_params(cfg: ModelConfig, vocab: list[str], rng: np.random.Generator,
                pretrained: Optional[dict[str, np.ndarray]] = None) -> dict[str, np.ndarray]:
    H, D = cfg.d_h, cfg.input_width
    word = rng.normal(0.0, 0.1, size=(len(vocab), cfg.d_w))
    if pretrained:
        for i, tok in enumerate(vocab):
            vec = pretrained.get(tok)
            if vec is not None:
                if vec.shape != (cfg.d_w,):
                    raise ConfigError(f"pretrained vector for {tok!r} has shape {vec.shape}, want ({cfg.d_w},)")
                word[i] = vec
    p = {
        "word": word,
        "pos": rng.normal(0.0, 0.1, size=(2 * cfg.max_offset + 1, cfg.d_p)),
    }
    bound = 1.0 / np.sqrt(H)
    for d in ("f", "b"):
        p[f"lstm_{d}_W"] = rng.uniform(-bound, bound, size=(4 * H, D))
        p[f"lstm_{d}_U"] = rng.uniform(-bound, bound, size=(4 * H, H))
        b = np.zeros(4 * H)
        b[H:2 * H] = 1.0
        p[f"lstm_{d}_b"] = b
    abound = 1.0 / np.sqrt(2 * H)
    p["attn_e"] = rng.uniform(-abound, abound, size=(2 * H, 2 * H))
    if cfg.kind == E_T:
        p["attn_t"] = rng.uniform(-abound, abound, size=(2 * H, 2 * H))
    F = cfg.feature_width
    p["out_W"] = rng.uniform(-1.0 / np.sqrt(F), 1.0 / np.sqrt(F), size=(N_OUT, F))
    p["out_b"] = np.zeros(N_OUT)
    return p


def expected_shapes(cfg: ModelConfig, vocab_size: int) -> dict[str, tuple[int, ...]]:
    H, D = cfg.d_h, cfg.input_width
    shapes = {"word": (vocab_size, cfg.d_w), "pos": (2 * cfg.max_offset + 1, cfg.d_p)}
    for d in ("f", "b"):
        shapes[f"lstm_{d}_W"] = (4 * H, D)
        shapes[f"lstm_{d}_U"] = (4 * H, H)
        shapes[f"lstm_{d}_b"] = (4 * H,)
    shapes["attn_e"] = (2 * H, 2 * H)
    if cfg.kind == E_T:
        shapes["attn_t"] = (2 * H, 2 * H)
    shapes["out_W"] = (N_OUT, cfg.feature_width)
    shapes["out_b"] = (N_OUT,)
    return shapes


class Model:
    """A configured classifier: config, embedding vocabulary and parameters."""

    def __init__(self, config: ModelConfig, vocab: list[str], params: dict[str, np.ndarray]):
        self.config = config
        self.vocab = list(vocab)
        want = expected_shapes(config, len(self.vocab))
        if set(params) != set(want):
            raise ConfigError(f"parameter names {sorted(params)} do not match {sorted(want)}")
        for name, shape in want.items():
            if params[name].shape != shape:
                raise ConfigError(f"{name} has shape {params[name].shape}, want {shape}")
        self.params = params
        self.table = EmbeddingTable(self.vocab, params["word"], params["pos"], config.max_offset, config.lowercase)

    @classmethod
    def initialize(cls, config: ModelConfig, vocab: list[str], seed: int,
                   pretrained: Optional[dict[str, np.ndarray]] = None) -> "Model":
        rng = np.random.default_rng(seed)
        return cls(config, vocab, init_params(config, vocab, rng, pretrained))

    def copy(self) -> "Model":
        return Model(self.config, self.vocab, {k: v.copy() for k, v in self.params.items()})

    # -- encoding ---------------------------------------------------------

    def encode(self, link: LinkInstance) -> Encoded:
        if link.kind != self.config.kind:
            raise ConfigError(f"model for {self.config.kind} links given a {link.kind} link")
        if not link.tokens:
            raise ConfigError(f"link {link.doc}/{link.event}->{link.target} has no tokens")
        mentions = [link.event_position]
        if self.config.kind == E_T:
            if link.timex_position is None:
                raise ConfigError("E-T link without timex position")
            mentions.append(link.timex_position)
        T = len(link.tokens)
        for k in mentions:
            if not 0 <= k < T:
                raise ConfigError(f"mention position {k} outside {T} tokens")
        ids = np.array([self.table.token_id(t) for t in link.tokens], dtype=np.intp)
        idx = np.arange(T)
        positions = [
            np.clip(idx - k, -self.config.max_offset, self.config.max_offset) + self.config.max_offset
            for k in mentions
        ]
        return Encoded(ids, positions, mentions)

    # -- forward / backward -------------------------------------------------

    def forward(self, link: LinkInstance) -> SRPrediction:
        probs, _ = forward_pass(self.params, self.encode(link), self.config)
        return SRPrediction(probs)

    def predict(self, link: LinkInstance) -> SRVector:
        return self.forward(link).vector

    def loss_and_gradients(self, link: LinkInstance, gold: Optional[SRVector] = None,
                           grads: Optional[dict[str, np.ndarray]] = None):
        """Loss for one link and its gradients, added into ``grads`` when given."""
        gold = gold or link.gold
        if gold is None:
            raise ValueError("link has no gold SR vector")
        enc = self.encode(link)
        probs, cache = forward_pass(self.params, enc, self.config, keep_cache=True)
        grads = backward_pass(self.params, enc, self.config, probs, gold, cache, grads)
        return float(sr_loss(probs, gold)), grads


def embed_inputs(p, enc: Encoded) -> np.ndarray:
    parts = [p["word"][..., enc.ids, :]]
    parts.extend(p["pos"][..., pos, :] for pos in enc.positions)
    shape = np.broadcast_shapes(*(x.shape[:-1] for x in parts))
    return np.concatenate([np.broadcast_to(x, shape + x.shape[-1:]) for x in parts], axis=-1)


def forward_pass(p, enc: Encoded, cfg: ModelConfig, keep_cache: bool = False):
    """Probabilities of shape (..., 4, 4) for one encoded link.

    ``p`` may hold stacked parameter sets with shared leading dimensions.
    """
    X = embed_inputs(p, enc)
    Hs, lstm_cache = bilstm_forward(X, p)
    H = cfg.d_h
    att = []
    if cfg.attention:
        reps = []
        for k, role in zip(enc.mentions, ("attn_e", "attn_t")):
            h_m = Hs[..., k, :]
            a, c = attend(h_m, Hs, p[role])
            reps += [h_m, c]
            att.append(a)
        feat = np.concatenate(reps, axis=-1)
    else:
        feat = np.concatenate([Hs[..., -1, :H], Hs[..., 0, H:]], axis=-1)
    logits = matvec(p["out_W"], feat) + p["out_b"]
    probs = softmax(logits.reshape(logits.shape[:-1] + (N_SR, N_LABELS)), axis=-1)
    cache = (X, Hs, lstm_cache, att, feat) if keep_cache else None
    return probs, cache


def sr_loss(probs: np.ndarray, gold: SRVector) -> float:
    """Summed negative log-likelihood of the gold label of each SR."""
    idx = gold.indices()
    picked = probs[..., np.arange(N_SR), idx]
    return -np.log(np.maximum(picked, PROB_FLOOR)).sum(axis=-1)


def backward_pass(p, enc: Encoded, cfg: ModelConfig, probs, gold: SRVector, cache,
                  grads: Optional[dict[str, np.ndarray]] = None) -> dict[str, np.ndarray]:
    X, Hs, lstm_cache, att, feat = cache
    if grads is None:
        grads = {k: np.zeros_like(v) for k, v in p.items()}
    H = cfg.d_h
    dlogits = probs.copy()
    dlogits[np.arange(N_SR), gold.indices()] -= 1.0
    dlogits = dlogits.reshape(N_OUT)
    grads["out_W"] += np.outer(dlogits, feat)
    grads["out_b"] += dlogits
    dfeat = p["out_W"].T @ dlogits
    dHs = np.zeros_like(Hs)
    if cfg.attention:
        for n, (k, role) in enumerate(zip(enc.mentions, ("attn_e", "attn_t"))):
            block = dfeat[n * 4 * H:(n + 1) * 4 * H]
            dh_direct, dc = block[:2 * H], block[2 * H:]
            dh, dHs_att, dWa = attend_backward(dc, Hs[k], Hs, p[role], att[n])
            dHs += dHs_att
            dHs[k] += dh + dh_direct
            grads[role] += dWa
    else:
        dHs[-1, :H] += dfeat[:H]
        dHs[0, H:] += dfeat[H:]
    dX = bilstm_backward(dHs, lstm_cache, grads)
    d_w = cfg.d_w
    np.add.at(grads["word"], enc.ids, dX[:, :d_w])
    for n, pos in enumerate(enc.positions):
        np.add.at(grads["pos"], pos, dX[:, d_w + n * cfg.d_p:d_w + (n + 1) * cfg.d_p])
    return grads
