"""Architecture configuration."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from ..errors import ConfigError

HEAD_MPP = "mpp"
HEAD_NMSP = "nmsp"


@dataclass
class ModelConfig:
    n_layers: int
    dim: int
    vocab_size: int  # player rows including MASK and PAD
    n_positions: int  # position rows including the PAD row
    n_teams: int  # team rows including the PAD row
    stat_input_width: int = 39
    n_heads: int = 0  # 0 -> dim // 16, floored at 1
    ff_width: int = 0  # 0 -> 4 * dim
    use_team_embeddings: bool = True
    head: str = HEAD_MPP
    n_stats: int = 18
    seq_len: int = 80
    mlp_hidden: bool = True  # hidden layer of width dim in input/head MLPs
    dtype: str = "float32"

    def __post_init__(self):
        if self.n_layers < 1:
            raise ConfigError(f"need at least one layer, got {self.n_layers}")
        if self.n_heads == 0:
            self.n_heads = max(1, self.dim // 16)
        if self.ff_width == 0:
            self.ff_width = 4 * self.dim
        if self.dim % self.n_heads != 0:
            raise ConfigError(
                f"dim {self.dim} not divisible by n_heads {self.n_heads}"
            )
        if self.head not in (HEAD_MPP, HEAD_NMSP):
            raise ConfigError(f"unknown head {self.head!r}")
        if self.dtype not in ("float32", "float64"):
            raise ConfigError(f"unsupported dtype {self.dtype!r}")

    @property
    def head_dim(self) -> int:
        return self.dim // self.n_heads

    @property
    def head_output_width(self) -> int:
        if self.head == HEAD_MPP:
            return self.vocab_size
        return 2 * self.n_stats

    @property
    def arch_name(self) -> str:
        return f"{self.n_layers}l{self.dim}d"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        return cls(**data)


def config_from_vocab(vocab, **kwargs) -> ModelConfig:
    """Fill the table sizes of a config from a vocabulary."""
    kwargs.setdefault("vocab_size", vocab.total_size)
    kwargs.setdefault("n_positions", vocab.n_position_rows)
    kwargs.setdefault("n_teams", vocab.n_team_rows)
    return ModelConfig(**kwargs)
