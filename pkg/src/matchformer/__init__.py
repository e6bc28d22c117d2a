"""matchformer: football player representations from match event data.

The pipeline: ingest raw event files into per-player match statistics,
build token corpora (masked-player pre-training, next-match team-statistics
prediction), train a small transformer over matches-as-player-sequences,
and analyze the learned player/position embeddings.
"""

__version__ = "0.1.0"
