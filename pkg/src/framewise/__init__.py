"""Local classes of finite relational structures: exact frame-wise measures,
seed-deterministic samplers, extension-axiom logic, group actions on the
generic limit, and piecewise-linear realisation."""

from .core import (
    LocalClassSpec,
    LocalSentence,
    RelationSymbol,
    Signature,
    Structure,
    Violation,
    adopt,
    complex_on,
    custom_class,
    empty_structure,
    family_on,
    full_simplex,
    hypergraph_class,
    induced_substructure,
    is_subobject,
    k_frame,
    simplicial_class,
    spec_by_kind,
    sperner_class,
    structure_from_json,
    structure_to_json,
    validate,
)
from .errors import (
    ConfigError,
    DegenerateCell,
    FrameMismatch,
    FramewiseError,
    InvalidAction,
    NotASubset,
    NotFree,
    NotInClass,
    PreconditionFailed,
    SizeLimit,
    UnknownRelation,
    VertexClash,
    WitnessNotFound,
)
from .measure import (
    BaseSet,
    FrameExtensionFamily,
    count_frame_extensions,
    enumerate_frame_extensions,
    exact_distribution,
    face_probability,
    members_on,
    mu_base,
    singleton_measure,
)
from .sampler import LazyLimit, SampleConfig, Seed, find_witness, oracle_is_face, sample_finite
from .logic import (
    ExperimentResult,
    ExperimentRow,
    ExtensionAxiom,
    collapse_probe,
    extension_axiom,
    extension_axioms_up_to,
    greedy_collapse,
    holds_extension,
    holds_extension_oracle,
    wilson_interval,
    zero_one_experiment,
)
from .symmetry import (
    ActionAudit,
    FiniteGroup,
    GroupEmbedding,
    PartialAction,
    audit_action,
    automorphism_group,
    cyclic_embedding,
    cyclic_group,
    direct_limit_action,
    empty_action,
    extend_action,
    induce_action,
    is_rigid,
    isomorphic,
    rigidity_experiment,
    swap_pair_action,
    symmetric_embedding,
    symmetric_group,
    trivial_embedding,
    trivial_group,
)
from .geometry import (
    PLChart,
    VerificationReport,
    cone_extend,
    fill_to_simplex,
    realize_chain,
    verify_chart,
)

__version__ = "0.1.0"
