"""Torch modules: windowed 1-D convolutional encoder, critic embedding
heads, and the bidirectional recurrent sequence classifier."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F
from torch.nn.utils.rnn import pack_sequence

from .errors import DataShapeError, InvalidConfigError


@dataclass(frozen=True)
class EncoderConfig:
    """Architecture of the window encoder.

    conv_specs is an ordered tuple of (out_channels, kernel, stride);
    convolutions are unpadded ("valid"), each followed by ReLU, and the
    flattened last feature map feeds an affine layer of `latent_dim`
    units with no activation.
    """

    in_channels: int
    conv_specs: tuple[tuple[int, int, int], ...]
    input_width: int = 20
    latent_dim: int = 256
    spatial_tap_layer: int = 3
    variant: str = "custom"

    def __post_init__(self):
        object.__setattr__(
            self, "conv_specs", tuple(tuple(int(v) for v in spec) for spec in self.conv_specs)
        )
        if self.in_channels < 1:
            raise InvalidConfigError("in_channels must be >= 1")
        if not self.conv_specs:
            raise InvalidConfigError("conv_specs must list at least one layer")
        if not 1 <= self.spatial_tap_layer <= len(self.conv_specs):
            raise InvalidConfigError(
                f"spatial_tap_layer must be in [1, {len(self.conv_specs)}], "
                f"got {self.spatial_tap_layer}"
            )
        if self.latent_dim < 1:
            raise InvalidConfigError("latent_dim must be >= 1")
        lengths = self.layer_lengths()
        if any(length < 1 for length in lengths):
            raise InvalidConfigError(
                f"kernels exceed the running length: layer lengths {lengths} "
                f"for input width {self.input_width}"
            )

    @classmethod
    def sim(cls, in_channels: int = 10, input_width: int = 20) -> "EncoderConfig":
        """Four conv layers (32, 64, 128, 64), kernels (4, 4, 3, 2), stride 1."""
        return cls(
            in_channels=in_channels,
            conv_specs=((32, 4, 1), (64, 4, 1), (128, 3, 1), (64, 2, 1)),
            input_width=input_width,
            variant="sim",
        )

    @classmethod
    def real(cls, in_channels: int = 53, input_width: int = 20) -> "EncoderConfig":
        """Three conv layers (64, 128, 200), kernels (4, 4, 3), stride 1."""
        return cls(
            in_channels=in_channels,
            conv_specs=((64, 4, 1), (128, 4, 1), (200, 3, 1)),
            input_width=input_width,
            spatial_tap_layer=3,
            variant="real",
        )

    def layer_lengths(self) -> list[int]:
        """Temporal lengths after each conv: L_i = (L_{i-1} - k) // stride + 1."""
        lengths = [self.input_width]
        for _, kernel, stride in self.conv_specs:
            lengths.append((lengths[-1] - kernel) // stride + 1)
        return lengths[1:]

    @property
    def spatial_dim(self) -> int:
        """Flattened size of the tapped conv layer's output."""
        out_channels = self.conv_specs[self.spatial_tap_layer - 1][0]
        return out_channels * self.layer_lengths()[self.spatial_tap_layer - 1]

    @property
    def flat_dim(self) -> int:
        return self.conv_specs[-1][0] * self.layer_lengths()[-1]

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["conv_specs"] = [list(spec) for spec in self.conv_specs]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "EncoderConfig":
        return cls(**data)


class WindowEncoder(nn.Module):
    """Maps a channels x width window to a latent vector and the flattened
    feature map of the tapped conv layer."""

    def __init__(self, config: EncoderConfig):
        super().__init__()
        self.config = config
        convs = []
        in_ch = config.in_channels
        for out_ch, kernel, stride in config.conv_specs:
            convs.append(nn.Conv1d(in_ch, out_ch, kernel_size=kernel, stride=stride))
            in_ch = out_ch
        self.convs = nn.ModuleList(convs)
        self.head = nn.Linear(config.flat_dim, config.latent_dim)

    def forward(self, x: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """x: (batch, channels, width) -> (latent (batch, latent_dim),
        spatial (batch, spatial_dim))."""
        if x.ndim != 3:
            raise DataShapeError(f"expected 3-D window batch, got ndim={x.ndim}")
        cfg = self.config
        if x.shape[1] != cfg.in_channels or x.shape[2] != cfg.input_width:
            raise DataShapeError(
                f"window batch shape {tuple(x.shape[1:])} does not match "
                f"encoder config ({cfg.in_channels}, {cfg.input_width})"
            )
        spatial = None
        h = x
        for i, conv in enumerate(self.convs, start=1):
            h = F.relu(conv(h))
            if i == cfg.spatial_tap_layer:
                spatial = h.flatten(start_dim=1)
        latent = self.head(h.flatten(start_dim=1))
        return latent, spatial


class CriticHeads(nn.Module):
    """Affine embeddings into a shared score space: `latent` maps latent
    states, `spatial` maps flattened conv features. Pair scores are plain
    dot products of these embeddings (separable critic)."""

    def __init__(self, latent_dim: int, spatial_dim: int, embed_dim: int = 128):
        super().__init__()
        if embed_dim < 1:
            raise InvalidConfigError("embed_dim must be >= 1")
        self.embed_dim = embed_dim
        self.latent = nn.Linear(latent_dim, embed_dim)
        self.spatial = nn.Linear(spatial_dim, embed_dim)

    def embed_latent(self, z: torch.Tensor) -> torch.Tensor:
        if z.shape[-1] != self.latent.in_features:
            raise DataShapeError(
                f"latent input dim {z.shape[-1]} != head dim {self.latent.in_features}"
            )
        return self.latent(z)

    def embed_spatial(self, c: torch.Tensor) -> torch.Tensor:
        if c.shape[-1] != self.spatial.in_features:
            raise DataShapeError(
                f"spatial input dim {c.shape[-1]} != head dim {self.spatial.in_features}"
            )
        return self.spatial(c)


@dataclass(frozen=True)
class ClassifierConfig:
    """Bidirectional recurrent classifier over latent-state sequences."""

    input_dim: int = 256
    recurrent_hidden: int = 200
    head_hidden: int = 200
    n_classes: int = 2

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ClassifierConfig":
        return cls(**data)


class RecurrentClassifier(nn.Module):
    """biLSTM over a latent sequence; the concatenated final hidden states
    of both directions feed a two-layer affine head."""

    def __init__(self, config: ClassifierConfig = ClassifierConfig()):
        super().__init__()
        self.config = config
        self.lstm = nn.LSTM(
            config.input_dim,
            config.recurrent_hidden,
            batch_first=True,
            bidirectional=True,
        )
        self.hidden = nn.Linear(2 * config.recurrent_hidden, config.head_hidden)
        self.output = nn.Linear(config.head_hidden, config.n_classes)

    def forward(self, sequences) -> torch.Tensor:
        """sequences: (batch, steps, input_dim) tensor, or a list of
        (steps_i, input_dim) tensors with per-item lengths."""
        if isinstance(sequences, torch.Tensor):
            if sequences.ndim == 2:  # single sequence
                sequences = sequences.unsqueeze(0)
            if sequences.ndim != 3:
                raise DataShapeError(f"expected 3-D sequence batch, got ndim={sequences.ndim}")
            if sequences.shape[1] < 1:
                raise DataShapeError("sequence length must be >= 1")
            _, (h_n, _) = self.lstm(sequences)
        else:
            if len(sequences) == 0 or any(s.shape[0] < 1 for s in sequences):
                raise DataShapeError("sequence length must be >= 1")
            packed = pack_sequence(list(sequences), enforce_sorted=False)
            _, (h_n, _) = self.lstm(packed)
        final = torch.cat([h_n[0], h_n[1]], dim=1)
        return self.output(F.relu(self.hidden(final)))


def xavier_init(shape, generator: torch.Generator, dtype=torch.float32) -> torch.Tensor:
    """Zero-mean normal draws with variance 2 / (fan_in + fan_out)."""
    shape = tuple(int(s) for s in shape)
    if len(shape) < 2:
        raise InvalidConfigError(
            f"shape {shape} has no well-defined fan-in/fan-out; "
            "1-D parameters are initialized to zero instead"
        )
    receptive = 1
    for s in shape[2:]:
        receptive *= s
    fan_in = shape[1] * receptive
    fan_out = shape[0] * receptive
    std = (2.0 / (fan_in + fan_out)) ** 0.5
    out = torch.empty(shape, dtype=dtype)
    out.normal_(0.0, std, generator=generator)
    return out


def init_parameters(module: nn.Module, generator: torch.Generator) -> None:
    """Xavier-initialize every weight tensor in place, zero every bias.

    Parameters are visited in registration order, so a fixed generator
    seed reproduces parameters bit-identically.
    """
    with torch.no_grad():
        for _, param in module.named_parameters():
            if param.ndim >= 2:
                param.copy_(xavier_init(param.shape, generator, dtype=param.dtype))
            else:
                param.zero_()
