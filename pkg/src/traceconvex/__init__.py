"""Trace-convexity of univariate polynomials, with checkable certificates.

A real polynomial ``p`` is trace-convex on a domain when ``X -> Tr p(X)`` is
convex over symmetric matrices with spectrum in that domain.  This holds
exactly when ``p`` is convex there, and then the noncommutative Hessian is a
sum of (weighted) hermitian squares up to commutators.  The package builds
those sums of squares and checks them independently.
"""

from .calculus import directional_derivative, hessian, hessian_from_second_derivative, sym_affine, sym_bruteforce
from .certificate import (Certificate, CertTerm, block_expand, certify, certify_global, certify_local,
                          expand_certificate, gram_identity, hankel_H, w_vector)
from .codec import codec_read, codec_write
from .errors import (InputError, InternalError, NotConvex, NotConvexOnInterval, NotNonnegative,
                     NotNonnegativeOnInterval, NotPSD, NumericalError, ParseError, ResourceError,
                     TraceConvexError)
from .ncpoly import H, H2, X, MatrixAssignment, NcPoly, cyc_equal, cyclic_canonical, evaluate, trace_evaluate
from .positivity import global_psd_decompose, interval_decompose, is_convex_on
from .unipoly import IntervalSpec, UniPoly, parse_unipoly, second_derivative
from .verify import (VerificationReport, matrix_nonconvexity_witness, midpoint_convexity_fuzz,
                     trace_positivity_fuzz, verify_certificate)

__version__ = "0.1.0"
