"""Supervised link training: targets, masked loss, AdamW, batching, threshold sweep."""

from __future__ import annotations

import dataclasses
import logging
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import torch
import torch.nn.functional as F

from .clustering import flat_upgma
from .evaluation import score_labels
from .model import CognateModel, ModelConfig
from .phonology import PAD_ID, Vocabulary
from .pipeline import PreparedConcept, build_vocabulary

log = logging.getLogger(__name__)

IGNORE = -1
THRESHOLD_GRID = tuple(round(0.30 + 0.05 * k, 2) for k in range(11))
DEFAULT_THRESHOLD = 0.6


@dataclass
class TrainConfig:
    batch_size: int = 4
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.01
    epochs: int = 20
    validation_fraction: float = 0.05
    seed: int = 0
    deterministic: bool = False

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not 0 < self.validation_fraction < 1:
            raise ValueError("validation_fraction must lie in (0, 1)")


@dataclass
class ThresholdChoice:
    threshold: float
    validation_score: float
    sweep: dict[float, float] = field(default_factory=dict)


def link_targets(cluster_ids: Sequence, row_mask: Sequence[bool] | None = None) -> np.ndarray:
    """1 where two live words share a cluster id, 0 where they differ, IGNORE elsewhere."""
    ids = list(cluster_ids)
    n = len(ids)
    live = np.ones(n, dtype=bool) if row_mask is None else np.asarray(row_mask, dtype=bool)
    same = np.array([[a == b for b in ids] for a in ids], dtype=np.int64).reshape(n, n)
    valid = live[:, None] & live[None, :] & ~np.eye(n, dtype=bool)
    return np.where(valid, same, IGNORE)


def link_loss(logits: torch.Tensor, targets: torch.Tensor) -> torch.Tensor:
    """Mean cross-entropy over every non-ignored ordered pair in the batch."""
    flat_t = targets.reshape(-1)
    count = int((flat_t != IGNORE).sum())
    if count == 0:
        return logits.sum() * 0.0
    total = F.cross_entropy(logits.reshape(-1, 2), flat_t, ignore_index=IGNORE, reduction="sum")
    return total / count


@dataclass
class AdamWState:
    step: int = 0
    exp_avg: list[torch.Tensor] = field(default_factory=list)
    exp_avg_sq: list[torch.Tensor] = field(default_factory=list)


@torch.no_grad()
def adamw_step(params: Sequence[torch.Tensor], grads: Sequence[torch.Tensor | None], state: AdamWState,
               cfg: TrainConfig) -> AdamWState:
    """One in-place AdamW update with decoupled weight decay and bias correction."""
    if len(params) != len(grads):
        raise ValueError(f"{len(params)} params but {len(grads)} grads")
    if not state.exp_avg:
        state.exp_avg = [torch.zeros_like(p) for p in params]
        state.exp_avg_sq = [torch.zeros_like(p) for p in params]
    state.step += 1
    bc1 = 1 - cfg.beta1 ** state.step
    bc2 = 1 - cfg.beta2 ** state.step
    for p, g, m, v in zip(params, grads, state.exp_avg, state.exp_avg_sq):
        if g is None:
            continue
        if g.shape != p.shape:
            raise ValueError(f"gradient shape {tuple(g.shape)} does not match parameter {tuple(p.shape)}")
        p.mul_(1 - cfg.learning_rate * cfg.weight_decay)
        m.mul_(cfg.beta1).add_(g, alpha=1 - cfg.beta1)
        v.mul_(cfg.beta2).addcmul_(g, g, value=1 - cfg.beta2)
        denom = (v / bc2).sqrt_().add_(cfg.eps)
        p.addcdiv_(m, denom, value=-cfg.learning_rate / bc1)
    return state


@dataclass
class Batch:
    tokens: torch.Tensor  # (b, R, C)
    targets: torch.Tensor  # (b, R, R)
    index: list[int]


def clip_concept(tokens: np.ndarray, targets: np.ndarray, max_rows: int, max_cols: int, name: str = ""):
    r, c = tokens.shape
    if r > max_rows:
        log.warning("concept %s: dropping %d words beyond %d rows", name, r - max_rows, max_rows)
        tokens, targets = tokens[:max_rows], targets[:max_rows, :max_rows]
    if c > max_cols:
        log.warning("concept %s: truncating %d columns beyond %d", name, c - max_cols, max_cols)
        tokens = tokens[:, :max_cols]
    return tokens, targets


def collate(items: Sequence[tuple[np.ndarray, np.ndarray]], index: list[int]) -> Batch:
    R = max(t.shape[0] for t, _ in items)
    C = max(t.shape[1] for t, _ in items)
    tokens = np.full((len(items), R, C), PAD_ID, dtype=np.int64)
    targets = np.full((len(items), R, R), IGNORE, dtype=np.int64)
    for b, (t, y) in enumerate(items):
        tokens[b, : t.shape[0], : t.shape[1]] = t
        targets[b, : y.shape[0], : y.shape[1]] = y
    return Batch(torch.from_numpy(tokens), torch.from_numpy(targets), index)


def make_batches(
    concepts: Sequence[tuple[np.ndarray, np.ndarray]],
    batch_size: int,
    seed: int | None = 0,
    max_rows: int = 256,
    max_cols: int = 256,
) -> list[Batch]:
    """Shuffle (unless seed is None), pad to the per-batch maximum, emit every concept once."""
    order = list(range(len(concepts)))
    if seed is not None:
        random.Random(seed).shuffle(order)
    batches = []
    for start in range(0, len(order), batch_size):
        idx = order[start:start + batch_size]
        items = [clip_concept(*concepts[i], max_rows, max_cols, str(i)) for i in idx]
        batches.append(collate(items, idx))
    return batches


def validation_split(concepts: Sequence[PreparedConcept], fraction: float, seed: int):
    """Per family, hold out ceil(fraction * n) concepts, keeping at least one for training."""
    by_family: dict[str, list[int]] = defaultdict(list)
    for i, c in enumerate(concepts):
        by_family[c.family].append(i)
    rng = random.Random(seed)
    held = set()
    for family, idx in by_family.items():
        k = min(math.ceil(fraction * len(idx)), len(idx) - 1)
        held.update(rng.sample(idx, k))
    train = [c for i, c in enumerate(concepts) if i not in held]
    val = [c for i, c in enumerate(concepts) if i in held]
    return train, val


def predict_probabilities(model: CognateModel, concepts: Sequence[PreparedConcept], vocab: Vocabulary,
                          batch_size: int = 2) -> list[np.ndarray]:
    """Link-probability matrix per concept; words beyond max_rows get zero similarity."""
    cfg = model.config
    out: list[np.ndarray] = []
    for start in range(0, len(concepts), batch_size):
        chunk = concepts[start:start + batch_size]
        items = []
        for c in chunk:
            t = c.tokens(vocab)
            items.append(clip_concept(t, link_targets([0] * len(t)), cfg.max_rows, cfg.max_cols, c.concept))
        batch = collate(items, list(range(len(chunk))))
        p = model.predict(batch.tokens).to(torch.float64).numpy()
        for c, pb in zip(chunk, p):
            r = len(c.ids)
            full = np.eye(r)
            k = min(r, cfg.max_rows)
            full[:k, :k] = pb[:k, :k]
            out.append(full)
    return out


def cluster_concepts(probs: Sequence[np.ndarray], threshold: float) -> list[list[int]]:
    return [flat_upgma(p, threshold) for p in probs]


def sweep_threshold(probs: Sequence[np.ndarray], gold: Sequence[Sequence], grid=THRESHOLD_GRID) -> ThresholdChoice:
    """Best validation B-Cubed F over the grid; ties keep the lower threshold."""
    if not probs:
        return ThresholdChoice(DEFAULT_THRESHOLD, float("nan"))
    scores = {}
    for theta in grid:
        scores[theta] = score_labels(gold, cluster_concepts(probs, theta)).f1
    best = max(grid, key=lambda t: (scores[t], -t))
    return ThresholdChoice(best, scores[best], scores)


def set_determinism(seed: int, deterministic: bool) -> None:
    torch.manual_seed(seed)
    np.random.seed(seed % 2**32)
    random.seed(seed)
    if deterministic:
        torch.use_deterministic_algorithms(True)


def train(
    concepts: Sequence[PreparedConcept],
    cfg: TrainConfig = TrainConfig(),
    model_cfg: ModelConfig = ModelConfig(),
    languages: Sequence[str] = (),
    vocab: Vocabulary | None = None,
) -> tuple[CognateModel, ThresholdChoice, Vocabulary]:
    """Train on aligned concepts and pick the clustering threshold on held-out concepts."""
    if not concepts:
        raise ValueError("empty training set")
    set_determinism(cfg.seed, cfg.deterministic)
    vocab = vocab or build_vocabulary(concepts, languages)
    model_cfg = dataclasses.replace(model_cfg, vocab_size=len(vocab))
    train_set, val_set = validation_split(concepts, cfg.validation_fraction, cfg.seed)
    log.info("training on %d concepts, validating on %d", len(train_set), len(val_set))

    model = CognateModel(model_cfg)
    params = [p for p in model.parameters()]
    state = AdamWState()
    data = [(c.tokens(vocab), link_targets(c.cogids)) for c in train_set]
    for epoch in range(cfg.epochs):
        model.train()
        losses = []
        for batch in make_batches(data, cfg.batch_size, seed=cfg.seed * 100003 + epoch,
                                  max_rows=model_cfg.max_rows, max_cols=model_cfg.max_cols):
            model.zero_grad(set_to_none=True)
            loss = link_loss(model(batch.tokens), batch.targets)
            loss.backward()
            adamw_step(params, [p.grad for p in params], state, cfg)
            losses.append(loss.item())
        log.info("epoch %d: mean loss %.4f", epoch + 1, float(np.mean(losses)) if losses else float("nan"))

    model.eval()
    probs = predict_probabilities(model, val_set, vocab)
    choice = sweep_threshold(probs, [c.cogids for c in val_set])
    log.info("threshold %.2f (validation F %.4f)", choice.threshold, choice.validation_score)
    return model, choice, vocab
