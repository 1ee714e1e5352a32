"""Finite-model toolkit for embeddings of reproducing kernel Hilbert spaces into L²."""
from .diagnostics import (
    CompactnessEvidence,
    DecayTable,
    Evidence,
    RefinementLadder,
    compactness_evidence,
    spectral_equivalence_check,
    weak_null_decay_check,
)
from .errors import (
    AnnotationConflict,
    InvalidArgument,
    KernelEmbedError,
    NotEnumerable,
    NumericFailure,
    Refused,
    ResourceLimit,
)
from .ivar import (
    CriterionStatus,
    ExplicitWeights,
    IvarModel,
    ProductWeights,
    enumerate_by_criterion,
    kgamma_eval,
    product_rule,
    tensor_spectrum_topn,
    thm2_verdict,
    x_membership,
)
from .kernel import Kernel, gram, is_psd, make_kernel
from .measure import DiscreteMeasure, atomic_measure, tensor_power, uniform_grid_measure
from .operator import EmbeddingModel, SpectralReport, hs_trace, kernel_l2_norm_sq, spectrum, t3_functional
from .seqspace import Annotations, SequencePair, Verdict, paper_example, verdicts

__version__ = "0.1.0"
