"""Vafa-Witten partition functions of K3 surfaces at prime rank, in exact arithmetic."""

from .chern import CohClass, SurfaceInvariants, integrality_check, reparametrize, twist, vd
from .cycnum import CycNum, root_of_unity
from .k3lattice import (
    EnumerationBudgetExceeded,
    JointDistribution,
    flux_sum_closed_form,
    gauss_sum,
    joint_distribution,
    k3_lattice,
    parse_vector,
)
from .partition import PartitionRequest, z_su, z_su_modr, z_w, z_w_from_euler
from .qseries import PuiseuxSeries, delta, hilb_series, sector_extract
from .sduality import (
    ConvergenceError,
    DeltaAtom,
    ModularExpr,
    eval_numeric,
    s_transform,
    verify_numeric,
    verify_symbolic,
)

__version__ = "0.1.0"
