"""Numerics for the two-loop Loewner potential of pairs of Jordan curves."""

from .cft import (CriterionResult, Trivialization, classify_minimizer, criterion,
                  make_character_trivialization, make_zeta_trivialization)
from .errors import BranchError, ConvergenceError, DomainError, NonFiniteError, ValidationError
from .loops import (Loop, MoebiusMap, TwoLoopConfig, apply_moebius, make_circle_pair,
                    random_moebius, validate)
from .mapseries import ConformalMapSeries, Uniformization
from .potentials import (GrunskyData, PotentialBreakdown, blm_interaction_circles, grunsky,
                         lpot_circles, lpot_two, lpot_two_via_lk, preschwarzian_energy,
                         winding_energy)
from .specfun import euler_phi, log_euler_phi, log_virasoro_character, virasoro_character
from .uniformize import (UniformizeOptions, annulus_uniformize, disk_map, log_deriv_ratio,
                         two_circle_modulus)
from .variation import BeltramiBump, first_order_deformation, variation_check
from .zetadet import FlatAnnulus, FlatDisk, det_annulus, det_disk, polyakov_alvarez

__version__ = "0.1.0"
