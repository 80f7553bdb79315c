"""Certified tangent-envelope constructions over exact rational arithmetic."""

from .covering import CoverInstance, CoverReport, check_cover, sample_cover
from .construct import (DEFAULT_DEPTH, PickFailureError, StageCertificate,
                        StageState, descent_premises, first_stage,
                        inductive_step, run_stages, verify_stage)
from .intervals import IntervalUnion, NestReport, nest_check, new_right_endpoints
from .lspec import LSpec, scan_l_neighborhood
from .piecewise import (C1Fn, MonotoneError, PiecewiseLinearFn, SupportWindows,
                        add_integral, build_base_derivative, build_perturbation,
                        eval_pair, nonmonotone_witness)
from .projections import (GapCertificate, central_projection_gaps,
                          gap_certificate, linear_projection_gaps,
                          lipschitz_extend)
from .refute import (DescentTrace, GraphSet, PreconditionError,
                     central_decompose, descend, graph_sample_lspec,
                     linear_decompose)
from .tangent import (AffineMap, EnvelopeBracket, TangencyDefect, affine_at,
                      ball_in_envelope, envelope_member, limit_consistency,
                      sample_ball_coverage, tangency_solve)

__version__ = "0.1.0"
