"""spndiff: differential cryptanalysis workbench for 16-bit SPN ciphers.

Computes S-box difference distribution tables, exact block-level differential
distributions over the full 2^16 domain, best differential trails and minimum
active-S-box counts by branch-and-bound, and verifies claimed characteristics
by direct encryption.
"""

__version__ = "0.1.0"

from .cipher import (  # noqa: F401
    CipherDescription,
    DescriptionError,
    KeyXor,
    Perm,
    RotL,
    SBox4,
    Sub,
    XorConst,
    evaluate,
    evaluate_all,
    evaluate_inverse,
    format_description,
    invert_codebook,
    parse_description,
    propagate_linear,
    zero_key,
)
from .sbox import DDT, compute_ddt, diff_uniformity_report, max_diff_prob  # noqa: F401
from .scan import (  # noqa: F401
    Characteristic,
    DiffDistribution,
    diff_count,
    scan_max,
    top_characteristics,
)
from .trails import (  # noqa: F401
    BoundReport,
    Trail,
    best_trail,
    bound_report,
    cipher_bound,
    min_active_sboxes,
    optimal_trails,
    theorem_lower_bound,
)
from .verify import (  # noqa: F401
    VerificationResult,
    format_difference_nibbles,
    parse_difference,
    splitmix64,
    verify_exhaustive,
    verify_keyed,
)
from .bundled import bundled_names, load_bundled, resolve_description  # noqa: F401
