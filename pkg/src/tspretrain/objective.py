"""Contrastive objective: InfoNCE over batch score matrices, the two
critic pairings (latent-to-future-spatial and spatial-to-spatial), their
summed loss, and contrastive accuracy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from .errors import DataShapeError
from .networks import CriticHeads, WindowEncoder


def _as_score_tensor(scores) -> torch.Tensor:
    t = torch.as_tensor(scores)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise DataShapeError(f"score matrix must be square, got shape {tuple(t.shape)}")
    if t.shape[0] < 2:
        raise DataShapeError("score matrix needs at least 2 candidates")
    if not torch.isfinite(t).all():
        raise DataShapeError("score matrix contains non-finite entries")
    return t


def infonce_loss(scores) -> torch.Tensor:
    """Mean over anchors of -log softmax probability of the positive.

    Row i scores anchor i against every candidate j; the positive sits on
    the diagonal and stays in the denominator, so each row's term is
    nonnegative. logsumexp keeps the computation stable for large scores.
    """
    t = _as_score_tensor(scores)
    per_row = torch.diagonal(t) - torch.logsumexp(t, dim=1)
    return -per_row.mean()


@dataclass
class PairingScores:
    """Score matrices of the two critic pairings; entry (i, j) scores
    anchor i against candidate (positive) j."""

    latent_spatial: torch.Tensor
    spatial_spatial: torch.Tensor


@dataclass
class ContrastiveLossValue:
    total: torch.Tensor
    latent_spatial: torch.Tensor
    spatial_spatial: torch.Tensor


def pairing_scores(
    encoder: WindowEncoder,
    heads: CriticHeads,
    anchors: torch.Tensor,
    positives: torch.Tensor,
) -> PairingScores:
    """Score every anchor against every positive under both pairings.

    latent_spatial(i, j) = <latent-embed(z_i), spatial-embed(c_j)> with z
    from anchors and c from positives; spatial_spatial(i, j) uses the
    spatial embedding on both sides (shared parameters).
    """
    if anchors.shape != positives.shape:
        raise DataShapeError(
            f"anchors {tuple(anchors.shape)} and positives {tuple(positives.shape)} differ"
        )
    z_anchor, c_anchor = encoder(anchors)
    _, c_positive = encoder(positives)
    future_spatial = heads.embed_spatial(c_positive)
    ls = heads.embed_latent(z_anchor) @ future_spatial.T
    ss = heads.embed_spatial(c_anchor) @ future_spatial.T
    return PairingScores(latent_spatial=ls, spatial_spatial=ss)


def contrastive_loss(
    encoder: WindowEncoder,
    heads: CriticHeads,
    anchors: torch.Tensor,
    positives: torch.Tensor,
) -> ContrastiveLossValue:
    """Sum of the InfoNCE losses of the two pairings."""
    scores = pairing_scores(encoder, heads, anchors, positives)
    ls_term = infonce_loss(scores.latent_spatial)
    ss_term = infonce_loss(scores.spatial_spatial)
    return ContrastiveLossValue(
        total=ls_term + ss_term, latent_spatial=ls_term, spatial_spatial=ss_term
    )


def contrastive_accuracy(scores) -> float:
    """Fraction of rows whose strict argmax is the diagonal; ties fail."""
    t = _as_score_tensor(scores).detach().cpu().numpy().astype(np.float64)
    diag = np.diagonal(t).copy()
    off = t.copy()
    np.fill_diagonal(off, -np.inf)
    return float(np.mean(diag > off.max(axis=1)))
