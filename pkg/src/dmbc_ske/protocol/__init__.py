"""Two-round key agreement over a pair of broadcast channels."""

from .codebooks import CodebookError, CodebookSet, build_codebooks, draw_typical_pool
from .eve import eve_attack, eve_candidates, eve_reconstruct
from .params import CodingParameters, ParameterError, derive_parameters, exponents
from .run import NULL, ProtocolJoints, Transcript, protocol_joints, run_protocol
from .security import SecurityEstimate, estimate_security, summarize, trial_seed

__all__ = [
    "CodebookError", "CodebookSet", "build_codebooks", "draw_typical_pool",
    "eve_attack", "eve_candidates", "eve_reconstruct",
    "CodingParameters", "ParameterError", "derive_parameters", "exponents",
    "NULL", "ProtocolJoints", "Transcript", "protocol_joints", "run_protocol",
    "SecurityEstimate", "estimate_security", "summarize", "trial_seed",
]
