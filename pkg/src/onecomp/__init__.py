"""Inner functions on the unit disk and the connectivity of their sublevel sets."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DerivativeVanishes,
    DomainError,
    EtaOutOfRange,
    NotRadial,
    OneCompError,
    SpecError,
    SpectrumHit,
    TruncationBudgetExceeded,
    Unsupported,
)
from .geometry import (  # noqa: E402
    BoundaryPoint,
    DiskPoint,
    EuclideanDisk,
    horodisk,
    mobius,
    pseudo_disk_to_euclidean,
    pseudo_dist,
)
from .inner import (  # noqa: E402
    Compose,
    FiniteBlaschke,
    FrostmanShift,
    InfiniteBlaschke,
    InnerSpec,
    Product,
    SingularAtomic,
    atomic,
    blaschke,
    boundary_derivatives,
    compose,
    eval_log_modulus,
    evaluate,
    frostman_shift,
    multiply,
)
from .sequences import ZeroSequence, hoffman_constants  # noqa: E402
from .sublevel import (  # noqa: E402
    RefinementPolicy,
    is_connected,
    label_components,
    sample,
    threshold_search,
)
from .criterion import aleksandrov_ratio, criterion_scan, spectrum  # noqa: E402
from .render import rasterize, render  # noqa: E402
from .report import analyze, run_suite  # noqa: E402
