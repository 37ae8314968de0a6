from src.transport.decompose import (
    MonotoneDecomposition,
    MonotonePiece,
    Signature,
    SignatureCheck,
    check_signature_condition,
    monotone_decompose,
)
from src.transport.dip import DipMap, build_dip_map, rearrangement

__all__ = [
    "DipMap",
    "MonotoneDecomposition",
    "MonotonePiece",
    "Signature",
    "SignatureCheck",
    "build_dip_map",
    "check_signature_condition",
    "monotone_decompose",
    "rearrangement",
]
