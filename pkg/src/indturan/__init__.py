"""Induced Turan problems in sparse host graphs.

Sparseness certification, random-quotient lower-bound constructions,
dependent-random-choice and rejection-sampling embedders for induced copies,
and brute-force oracles that check all of them at small scale.
"""

from .errors import InputError, InternalError, PreconditionError, ResourceError
from .graph import Embedding, Graph, is_copy_induced_in, read_edge_list, write_edge_list
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Embedding",
    "Graph",
    "InputError",
    "InternalError",
    "PreconditionError",
    "ResourceError",
    "is_copy_induced_in",
    "read_edge_list",
    "write_edge_list",
]
