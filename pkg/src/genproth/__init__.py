"""Primality testing and certification for integers N = K*p^n + 1."""

from .arith import OpCounter, PowerSchedule, build_schedule, mod_pow, phi_p_eval, pow_p_scheduled
from .errors import FormError, IncompleteFactorization, NotInvertible, ResourceError
from .forms import ProthForm, compute_J, make_form, parse_form, threshold_ok
from .primality import (
    Certificate,
    Outcome,
    Verdict,
    Witness,
    certify,
    certify_alg1,
    certify_alg2,
    complete_strong,
    generalized_proth,
    inconclusive_probability,
    jacobi,
    p_miller_rabin,
    pepin,
    pocklington,
    proth_classic,
    verify_certificate,
    verify_witness,
)

__version__ = "0.1.0"
