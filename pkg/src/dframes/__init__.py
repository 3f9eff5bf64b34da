"""Finite d-frames: presentations, closures, (con-tot) conditions and coproducts."""

from .errors import CapacityError, DFrameError, ParseError, PreconditionError, StructureError
from .lattice import (
    CHAIN_3, DIAMOND, FRAME_2, N5, TRIVIAL_FRAME, FinFrame, FinPoset, FrameHom, chain,
    downset, enumerate_homs, validate_frame,
)
from .presentation import (
    Cover, FramePresentation, MeetSemilattice, c_ideal_generate, enumerate_c_ideals,
    extend_universal, free_meet_semilattice, sem_map, stability_close,
)
from .dframe import (
    SIER, TRIVIAL_D, TWO_D, DFrame, DFrameHom, FinBispace, PairRelation, PairSpace,
    check_axioms, is_dframe_hom, omega_d,
)
from .closure import (
    GeneratorSet, PreDFramePresentation, con_min, generate_pre_dframe, tot_min,
    verify_dfrm_universal,
)
from .conditions import LadderData, evaluate_all, stage_implication_suite, theorem_contot_gate

__version__ = "0.1.0"
