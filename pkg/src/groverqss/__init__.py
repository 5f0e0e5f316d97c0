"""Grover-search based quantum secret sharing: simulator, protocol and cheat analysis."""
from .exceptions import ConfigurationError, ProtocolOrderError
from .grover import (
    IterationTrace,
    SearchSpec,
    brute_force_check,
    closed_form_trace,
    failure_one_iteration,
    grover_iterate,
    iteration_table,
    one_shot_amplitudes,
    success_curve,
    success_one_iteration,
)
from .protocol import (
    MarkedTagging,
    OutcomeLabel,
    Scenario,
    Scheme,
    Session,
    Transcript,
    classify_outcome,
    collective_decode,
    dealer_prepare,
    distribute,
    encode_message,
    run_session,
    session_schedule,
)
from .statevec import (
    Letter,
    MarkedSet,
    ProductState,
    StateVector,
    apply_diffusion,
    apply_oracle,
    expand_product,
    inner_product,
    make_rng,
    measure_distribution,
    sample_measurement,
)
from .strategies import CaptureAll, GuessDiffusion, Honest, InterceptResend

__version__ = "0.1.0"

__all__ = [
    "CaptureAll",
    "ConfigurationError",
    "GuessDiffusion",
    "Honest",
    "InterceptResend",
    "IterationTrace",
    "Letter",
    "MarkedSet",
    "MarkedTagging",
    "OutcomeLabel",
    "ProductState",
    "ProtocolOrderError",
    "Scenario",
    "Scheme",
    "SearchSpec",
    "Session",
    "StateVector",
    "Transcript",
    "apply_diffusion",
    "apply_oracle",
    "brute_force_check",
    "classify_outcome",
    "closed_form_trace",
    "collective_decode",
    "dealer_prepare",
    "distribute",
    "encode_message",
    "expand_product",
    "failure_one_iteration",
    "grover_iterate",
    "inner_product",
    "iteration_table",
    "make_rng",
    "measure_distribution",
    "one_shot_amplitudes",
    "run_session",
    "sample_measurement",
    "session_schedule",
    "success_curve",
    "success_one_iteration",
]
