"""XTR-based verifiable (k, l, m) multi-secret sharing."""

from .errors import (
    CheaterError,
    ConstraintError,
    InsufficientSharesError,
    MalformedBulletinError,
    ParameterError,
    ShadowCollisionError,
    VmssError,
)
from .gf import Gfp2, Gfp6, Gfp6Field
from .nlr import NlrSpec, Variant
from .vmss import (
    Bulletin,
    RecoveryShare,
    Registry,
    Scheme,
    SchemeConfig,
    Way,
    deal,
    recover,
    verify_consistency,
    verify_own,
)
from .xtr import XtrParams, generate_params, keygen, params_from_primes, trace_ladder

__all__ = [
    "Bulletin", "CheaterError", "ConstraintError", "Gfp2", "Gfp6", "Gfp6Field",
    "InsufficientSharesError", "MalformedBulletinError", "NlrSpec", "ParameterError",
    "RecoveryShare", "Registry", "Scheme", "SchemeConfig", "ShadowCollisionError", "Variant",
    "VmssError", "Way", "XtrParams", "deal", "generate_params", "keygen", "params_from_primes",
    "recover", "trace_ladder", "verify_consistency", "verify_own",
]
