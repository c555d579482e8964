"""Polarization of multiple access channels over finite Abelian groups.

Channels are transition tables with group-valued inputs. A single-letter
Fourier condition decides whether polarization preserves the symmetric capacity
region; brute-force synthesis of the polarized channels serves as ground truth.
"""

from .abelian import DimensionError, Element, GroupSpec, product
from .channel import (
    InvalidChannelError,
    Mac,
    RegionReport,
    TwoUserView,
    cond_mutual_info_xy_given_z,
    from_function,
    mutual_info,
    region,
    support_sets,
    two_user_reduction,
    validate,
)
from .channelfile import ChannelFileError, load, save
from .compat import (
    CompatReport,
    ExtensionConflict,
    Fingerprint,
    IllDefinedFingerprint,
    PseudoQuadFunction,
    check_compatibility,
    check_region,
    check_subset,
    coprime_shortcut,
    extend_to_pseudo_quadratic,
    fingerprint,
    is_pseudo_quadratic,
    prime_field_shortcut,
)
from .oracle import OracleVerdict, PreservationProbe, average_probe, depth1_check, depth1_fourier_check, oracle_verdict
from .polarize import SynthesisOptions, merge_equivalent_outputs, minus, plus, synthesize, synthesize_level
from .spectral import GroupFunction, convolve, dft, idft, reverse, shift
from .tolerances import Tolerances

__all__ = [
    "ChannelFileError", "CompatReport", "DimensionError", "Element", "ExtensionConflict", "Fingerprint",
    "GroupFunction", "GroupSpec", "IllDefinedFingerprint", "InvalidChannelError", "Mac", "OracleVerdict",
    "PreservationProbe", "PseudoQuadFunction", "RegionReport", "SynthesisOptions", "Tolerances", "TwoUserView",
    "average_probe", "check_compatibility", "check_region", "check_subset", "cond_mutual_info_xy_given_z",
    "convolve", "coprime_shortcut", "depth1_check", "depth1_fourier_check", "dft", "extend_to_pseudo_quadratic",
    "fingerprint", "from_function", "idft", "is_pseudo_quadratic", "load", "merge_equivalent_outputs", "minus",
    "mutual_info", "oracle_verdict", "plus", "prime_field_shortcut", "product", "region", "reverse", "save",
    "shift", "support_sets", "synthesize", "synthesize_level", "two_user_reduction", "validate",
]
