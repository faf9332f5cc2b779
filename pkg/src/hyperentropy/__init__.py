"""Exchangeable random structures from step hypergraphons and their entropy functions."""

__version__ = "0.1.0"

from .core import (
    FiniteStructure,
    QfType,
    RedundantStructure,
    Signature,
    enumerate_qf_types,
    logic_act,
    qf_type_of,
    shortlex,
    sym_act_type,
    tau,
)
from .entropy import (
    FiniteMeasure,
    entropy_curve,
    exact_entropy,
    exact_mu_n,
    h,
    max_entropy_check,
    mc_entropy,
    uniform_nr_entropy,
)
from .errors import (
    HyperentropyError,
    IncoherentHypergraphon,
    IncompleteTable,
    InsufficientGamma,
    InvalidArgument,
    InvalidMeasure,
    InvalidStructure,
    PreconditionViolation,
    ResourceLimit,
    UnsupportedSignature,
)
from .hypergraphon import Grid, StepHypergraphon, TypeDistribution, make_constant, make_er, make_triangle
from .sampler import sample, sample_restriction_consistency

__all__ = [
    "FiniteMeasure",
    "FiniteStructure",
    "Grid",
    "HyperentropyError",
    "IncoherentHypergraphon",
    "IncompleteTable",
    "InsufficientGamma",
    "InvalidArgument",
    "InvalidMeasure",
    "InvalidStructure",
    "PreconditionViolation",
    "QfType",
    "RedundantStructure",
    "ResourceLimit",
    "Signature",
    "StepHypergraphon",
    "TypeDistribution",
    "UnsupportedSignature",
    "entropy_curve",
    "enumerate_qf_types",
    "exact_entropy",
    "exact_mu_n",
    "h",
    "logic_act",
    "make_constant",
    "make_er",
    "make_triangle",
    "max_entropy_check",
    "mc_entropy",
    "qf_type_of",
    "sample",
    "sample_restriction_consistency",
    "shortlex",
    "sym_act_type",
    "tau",
    "uniform_nr_entropy",
]
