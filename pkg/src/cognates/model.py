"""Axial MSA transformer with a triangular pair stack and a two-class link head.

Shapes: tokens (b, r, c) with PAD = 0, MSA activations (b, r, c, d), pair
representations (b, r, r, d). Column 0 of every row holds the language token.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import torch
import torch.nn.functional as F
from torch import nn

from .phonology import MAX_VOCAB, PAD_ID


@dataclass
class ModelConfig:
    hidden_size: int = 128
    intermediate_size: int = 128
    msa_layers: int = 2
    pair_layers: int = 2
    attention_heads: int = 2
    pair_projection_size: int = 32
    vocab_size: int = MAX_VOCAB
    max_rows: int = 256
    max_cols: int = 256
    dropout: float = 0.0

    def __post_init__(self):
        sizes = (self.hidden_size, self.intermediate_size, self.attention_heads,
                 self.pair_projection_size, self.vocab_size, self.max_rows, self.max_cols)
        if min(sizes) < 1 or self.msa_layers < 0 or self.pair_layers < 0:
            raise ValueError(f"invalid model sizes: {self}")
        if self.hidden_size % self.attention_heads:
            raise ValueError("hidden_size must be divisible by attention_heads")
        if self.vocab_size > MAX_VOCAB:
            raise ValueError(f"vocab_size exceeds {MAX_VOCAB}")

    def to_dict(self) -> dict:
        return asdict(self)


def masked_softmax(scores: torch.Tensor, mask: torch.Tensor, dim: int = -1) -> torch.Tensor:
    """Softmax over unmasked entries only; rows with no unmasked entry come out all zero."""
    scores = scores.masked_fill(~mask, float("-inf"))
    live = mask.any(dim=dim, keepdim=True)
    scores = torch.where(live, scores, torch.zeros_like(scores))
    return torch.softmax(scores, dim=dim) * mask


class Attention(nn.Module):
    """Multi-head attention over the second-to-last axis of (..., L, d)."""

    def __init__(self, d: int, heads: int, dropout: float = 0.0):
        super().__init__()
        self.heads = heads
        self.head_dim = d // heads
        self.q = nn.Linear(d, d)
        self.k = nn.Linear(d, d)
        self.v = nn.Linear(d, d)
        self.out = nn.Linear(d, d)
        self.dropout = nn.Dropout(dropout)

    def weights(self, x, key_mask, bias=None):
        *lead, L, _ = x.shape
        q = self.q(x).view(*lead, L, self.heads, self.head_dim).transpose(-2, -3)
        k = self.k(x).view(*lead, L, self.heads, self.head_dim).transpose(-2, -3)
        scores = q @ k.transpose(-1, -2) / math.sqrt(self.head_dim)  # (..., H, Lq, Lk)
        if bias is not None:
            scores = scores + bias
        return masked_softmax(scores, key_mask[..., None, None, :])

    def forward(self, x, key_mask, bias=None):
        *lead, L, d = x.shape
        w = self.dropout(self.weights(x, key_mask, bias))
        v = self.v(x).view(*lead, L, self.heads, self.head_dim).transpose(-2, -3)
        out = (w @ v).transpose(-2, -3).reshape(*lead, L, d)
        return self.out(out)


class Transition(nn.Module):
    def __init__(self, d: int, hidden: int, dropout: float = 0.0):
        super().__init__()
        self.norm = nn.LayerNorm(d)
        self.up = nn.Linear(d, hidden)
        self.down = nn.Linear(hidden, d)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x):
        return self.dropout(self.down(F.relu(self.up(self.norm(x)))))


class MsaLayer(nn.Module):
    """Row attention, column attention, feed-forward; each pre-normed and residual."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        d = cfg.hidden_size
        self.row_norm = nn.LayerNorm(d)
        self.row_attn = Attention(d, cfg.attention_heads, cfg.dropout)
        self.col_norm = nn.LayerNorm(d)
        self.col_attn = Attention(d, cfg.attention_heads, cfg.dropout)
        self.transition = Transition(d, cfg.intermediate_size, cfg.dropout)

    def forward(self, x, mask):
        m = mask[..., None].to(x.dtype)
        x = (x + self.row_attn(self.row_norm(x), mask)) * m
        xt = x.transpose(-2, -3)
        x = (xt + self.col_attn(self.col_norm(xt), mask.transpose(-1, -2))).transpose(-2, -3) * m
        return (x + self.transition(x)) * m


class OuterProductMean(nn.Module):
    def __init__(self, d: int, proj: int):
        super().__init__()
        self.norm = nn.LayerNorm(d)
        self.left = nn.Linear(d, proj)
        self.right = nn.Linear(d, proj)
        self.out = nn.Linear(proj * proj, d)

    def forward(self, x, mask):
        m = mask.to(x.dtype)
        h = self.norm(x)
        a = self.left(h) * m[..., None]
        b = self.right(h) * m[..., None]
        outer = torch.einsum("bikp,bjkq->bijpq", a, b)
        shared = torch.einsum("bik,bjk->bij", m, m)
        outer = outer / shared.clamp(min=1)[..., None, None]
        return self.out(outer.flatten(-2))


class TriangleMultiplication(nn.Module):
    def __init__(self, d: int, proj: int, outgoing: bool):
        super().__init__()
        self.outgoing = outgoing
        self.norm = nn.LayerNorm(d)
        self.left = nn.Linear(d, proj)
        self.left_gate = nn.Linear(d, proj)
        self.right = nn.Linear(d, proj)
        self.right_gate = nn.Linear(d, proj)
        self.out_norm = nn.LayerNorm(proj)
        self.out = nn.Linear(proj, d)
        self.gate = nn.Linear(d, d)

    def edges(self, z, pair_mask):
        h = self.norm(z)
        m = pair_mask[..., None].to(z.dtype)
        a = torch.sigmoid(self.left_gate(h)) * self.left(h) * m
        b = torch.sigmoid(self.right_gate(h)) * self.right(h) * m
        return h, a, b

    def forward(self, z, pair_mask):
        h, a, b = self.edges(z, pair_mask)
        if self.outgoing:
            u = torch.einsum("bikc,bjkc->bijc", a, b)
        else:
            u = torch.einsum("bkic,bkjc->bijc", a, b)
        return torch.sigmoid(self.gate(h)) * self.out(self.out_norm(u))


class TriangleAttention(nn.Module):
    """Starting-node attention; the ending-node variant runs it on the transposed pair tensor."""

    def __init__(self, d: int, heads: int, starting: bool, dropout: float = 0.0):
        super().__init__()
        self.starting = starting
        self.norm = nn.LayerNorm(d)
        self.attn = Attention(d, heads, dropout)
        self.bias = nn.Linear(d, heads, bias=False)

    def forward(self, z, pair_mask):
        if not self.starting:
            z, pair_mask = z.transpose(-2, -3), pair_mask.transpose(-1, -2)
        h = self.norm(z)
        # bias[b, h, j, k] from z_jk, shared by every fixed first index i
        bias = self.bias(h).permute(0, 3, 1, 2)[:, None]
        out = self.attn(h, pair_mask, bias)
        return out if self.starting else out.transpose(-2, -3)


class PairLayer(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        d, p = cfg.hidden_size, cfg.pair_projection_size
        self.tri_mul_out = TriangleMultiplication(d, p, outgoing=True)
        self.tri_mul_in = TriangleMultiplication(d, p, outgoing=False)
        self.tri_att_start = TriangleAttention(d, cfg.attention_heads, True, cfg.dropout)
        self.tri_att_end = TriangleAttention(d, cfg.attention_heads, False, cfg.dropout)
        self.transition = Transition(d, cfg.intermediate_size, cfg.dropout)

    def forward(self, z, pair_mask):
        m = pair_mask[..., None].to(z.dtype)
        for block in (self.tri_mul_out, self.tri_mul_in, self.tri_att_start, self.tri_att_end):
            z = (z + block(z, pair_mask)) * m
        return (z + self.transition(z)) * m


def link_probabilities(logits: torch.Tensor, row_mask: torch.Tensor) -> torch.Tensor:
    """Class-1 probability, symmetrized, diagonal 1, zero outside live row pairs."""
    p = torch.softmax(logits, dim=-1)[..., 1]
    p = (p + p.transpose(-1, -2)) / 2
    eye = torch.eye(p.shape[-1], dtype=torch.bool, device=p.device)
    p = torch.where(eye, torch.ones_like(p), p)
    pair_mask = row_mask[..., :, None] & row_mask[..., None, :]
    return p * pair_mask


class CognateModel(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.config = cfg
        d = cfg.hidden_size
        self.token_embedding = nn.Embedding(cfg.vocab_size, d)
        self.position_embedding = nn.Embedding(cfg.max_cols, d)
        self.msa_layers = nn.ModuleList(MsaLayer(cfg) for _ in range(cfg.msa_layers))
        self.outer_product_mean = OuterProductMean(d, cfg.pair_projection_size)
        self.pair_layers = nn.ModuleList(PairLayer(cfg) for _ in range(cfg.pair_layers))
        self.classifier = nn.Linear(d, 2)

    @staticmethod
    def masks(tokens: torch.Tensor):
        mask = tokens != PAD_ID
        return mask, mask.any(dim=-1)

    def embed(self, tokens: torch.Tensor) -> torch.Tensor:
        b, r, c = tokens.shape
        cfg = self.config
        if r > cfg.max_rows or c > cfg.max_cols:
            raise ValueError(f"input {r}x{c} exceeds {cfg.max_rows}x{cfg.max_cols}")
        if tokens.numel() and int(tokens.max()) >= cfg.vocab_size:
            raise ValueError("token id outside the vocabulary")
        pos = self.position_embedding(torch.arange(c, device=tokens.device))
        x = self.token_embedding(tokens) + pos
        return x * (tokens != PAD_ID)[..., None].to(x.dtype)

    def pair_representation(self, tokens: torch.Tensor) -> torch.Tensor:
        mask, row_mask = self.masks(tokens)
        x = self.embed(tokens)
        for layer in self.msa_layers:
            x = layer(x, mask)
        pair_mask = row_mask[..., :, None] & row_mask[..., None, :]
        # the language column is left out of the pair statistics; identity reaches them via row attention
        opm_mask = mask.clone()
        opm_mask[..., 0] = False
        z = self.outer_product_mean(x, opm_mask) * pair_mask[..., None].to(x.dtype)
        for layer in self.pair_layers:
            z = layer(z, pair_mask)
        return z

    def forward(self, tokens: torch.Tensor) -> torch.Tensor:
        """Raw (unsymmetrized) link logits of shape (b, r, r, 2)."""
        return self.classifier(self.pair_representation(tokens))

    @torch.no_grad()
    def predict(self, tokens: torch.Tensor) -> torch.Tensor:
        was_training = self.training
        self.eval()
        try:
            logits = self(tokens)
        finally:
            self.train(was_training)
        return link_probabilities(logits, self.masks(tokens)[1])


def count_parameters(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())
