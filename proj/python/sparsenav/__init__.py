"""Sparse-hash visual route following workbench."""

from ._core import (
    ConfigError,
    Encoder,
    EncoderConfig,
    Model,
    OpCounts,
    StateError,
    __version__,
    bernoulli_entropy,
    compression_lower_bound,
    compute_turn,
    csr_bits,
    dissimilarity,
    memory_capacity,
    novelty,
    op_counts,
    parse_model,
    render_reference,
    run_trial,
    storage_size,
)

__all__ = [
    "ConfigError",
    "Encoder",
    "EncoderConfig",
    "Model",
    "OpCounts",
    "StateError",
    "__version__",
    "bernoulli_entropy",
    "compression_lower_bound",
    "compute_turn",
    "csr_bits",
    "dissimilarity",
    "memory_capacity",
    "novelty",
    "op_counts",
    "parse_model",
    "render_reference",
    "run_trial",
    "storage_size",
]
