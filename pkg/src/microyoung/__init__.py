"""Regularity exponents, microlocal product admissibility, extensions and germs."""
from .errors import (AliasingWarning, BandTooNarrow, BoundaryWarning, DomainMismatch,
                     InsufficientDerivatives, InsufficientResolution, MicroYoungError,
                     MultiplePoints, NoExtension, NonIntegrableSingularity, NotAdmissible,
                     RolesUndetermined, UnknownKernel)
from .kernels import (DiracDelta, DistributionExpr, GridField, LogDerivative, PowerLaw,
                      Region, SmoothFunction, SmoothProduct, Sum, constant, cusp,
                      function_from_sympy, multiply_by_smooth, pair, pair_scaled,
                      polynomial, smooth_bump_function, white_noise)
from .testfn import (ScaledTestFunction, TestFunction, cr_norm, dictionary, make_bump,
                     make_moment_free, scale_translate)
from .catalog import parse_kernel
from .config import RunConfig
from .dyadic import (besov_norm, block_series, build_partition, dyadic_critical_exponent,
                     local_besov_norm, lp_block, testfn_critical_exponent)
from .regularity import (RegularityReport, estimate_beta_star, estimate_holder_exponent,
                         estimate_local_sobolev, holder_norm)
from .wavefront import (Cone, cone_energy, critical_sobolev_direction,
                        pairwise_product_criterion, wavefront_set)
from .product import (ProductAdmissibility, check_young_classical, check_young_microlocal,
                      verify_continuity_bound, young_product)
from .extension import ExtensionFamily, extend, multiply_and_extend, scaling_degree
from .germs import (Germ, check_coherence, product_germ, reconstruct_product_germ,
                    verify_reconstruction_bound)
from .estimators import (BetaStarEstimator, HolderExponentEstimator, LocalSobolevEstimator,
                         ScalingDegreeEstimator)

__version__ = "0.1.0"
