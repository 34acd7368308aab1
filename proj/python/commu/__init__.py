"""Metadata-conditioned note-sequence toolkit.

Samples cross the boundary as canonical sample-JSON strings, token
sequences as lists of ints in [0, 728].
"""

from ._core import (
    VOCAB_SIZE,
    CountModel,
    __version__,
    augment,
    chroma_similarity,
    combine,
    controllability_harmony,
    controllability_pitch,
    controllability_velocity,
    decode,
    distance,
    diversity,
    encode,
    generate,
    grammar_errors,
    groove_similarity,
    ingest_midi,
    note_density,
    note_length,
    sample_to_midi,
    validate,
)

__all__ = [
    "VOCAB_SIZE",
    "CountModel",
    "__version__",
    "augment",
    "chroma_similarity",
    "combine",
    "controllability_harmony",
    "controllability_pitch",
    "controllability_velocity",
    "decode",
    "distance",
    "diversity",
    "encode",
    "generate",
    "grammar_errors",
    "groove_similarity",
    "ingest_midi",
    "note_density",
    "note_length",
    "sample_to_midi",
    "validate",
]
