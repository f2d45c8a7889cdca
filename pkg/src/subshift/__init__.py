"""Entropy, Hausdorff dimension and complexity rates of subshifts of finite type."""

from .core import BoxDomain, GroupSpec, Pattern
from .errors import SubshiftError
from .sft import (
    SftSpec,
    count_patterns,
    entropy_exact_1d,
    entropy_series,
    strip_entropy_bracket_2d,
    transfer_matrix_1d,
)
from .dimension import dim_estimate, encode_pattern, decode_pattern, hausdorff_sum, uniform_cover, vitali_pack
from .complexity import check_limsup_bound, complexity_rate_series, proxy_complexity
from .measure import measure_entropy, parry_measure, sample_point, smb_check
from .specfile import bundled_spec, parse_spec

__version__ = "0.1.0"
