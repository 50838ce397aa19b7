"""Inscribed rhombs in strictly convex bodies.

Bodies are gauge sublevel sets (balls, ellipsoids, superellipsoids and
their intersections under affine poses).  For a body and an orthonormal
direction frame the package evaluates median surfaces (chord midpoints over
shadow coordinates), locates a common point of all medians with a fixed
point / generalized-bisection hybrid, extracts the inscribed rhomb, and
numerically probes the hypotheses (regularity with respect to the basis,
special corners, pole structure) under which the construction is guaranteed
to succeed.
"""

from .kernels import BACKEND as kernel_backend
from .errors import (ContractError, ConvergenceFailureError,
                     DegenerateFrameError, DegenerateIntersectionError,
                     FiberDegenerateError, HypothesisViolationError,
                     InrhombError, InscriptionError, MirandaPreconditionError,
                     NumericError, OutsideShadowError, SearchExhaustedError)
from .bodies import (DEFAULT_GEOMETRY, Ball, Box, ChordResult,
                     ConvexBodySpec, Ellipsoid, FiberChord, Frame,
                     GeometryConfig, Intersection, ShadowClass,
                     Superellipsoid, body_from_json, body_to_json,
                     boundary_scale, chord_solve, cube_to_crosspolytope,
                     frame_orthonormalize, gauge_eval, gauge_eval_many,
                     load_body, project_coords, radial_clamp_shadow,
                     shadow_classify, support_point)
from .median import (MedianEvaluator, MedianSample, MedianSampleSet,
                     boundary_sphere_sample, envelope_points, median_height,
                     median_height_extended, median_mesh, median_offset)
from .solver import (Rhomb, SignField, SolverConfig, SolverReport,
                     VerificationReport, fixed_point_solve, inscribe_rhomb,
                     median_sign_fields, miranda_root, verify_rhomb)
from .diagnostics import (DiagnosticsReport, PoleCheckResult,
                          RegularityViolation, SpecialCornerHit,
                          SubsetCertificate, crosspolytope_condition_report,
                          pole_check, regularity_probe, special_corner_scan)
from .sweep import (EqualizeResult, SweepRecord, SweepSummary,
                    direction_sweep, equalize_diagonals, givens_frame,
                    random_frame, sweep_summary)

__version__ = "0.1.0"
