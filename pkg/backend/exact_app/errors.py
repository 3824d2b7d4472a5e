"""
Error hierarchy shared by every kmforge app.

Each error carries a machine-readable ``code`` (surfaced by the CLI), a
``details`` mapping naming the offending indices/degrees, and optional
guidance text.
"""
from typing import Any, Dict, Optional


class KMForgeError(Exception):
    """Base error with context and guidance."""

    code = "kmforge_error"
    default_guidance: Optional[str] = None

    def __init__(self, message: str, *, details: Optional[Dict[str, Any]] = None,
                 guidance: Optional[str] = None):
        self.message = message
        self.details = dict(details or {})
        self.guidance = guidance or self.default_guidance

        # Build detailed message
        lines = [message, f"Code: {self.code}"]
        if self.details:
            rendered = ", ".join(f"{k}={v}" for k, v in self.details.items())
            lines.append(f"Details: {rendered}")
        if self.guidance:
            lines.append(f"Guidance:\n{self.guidance}")

        super().__init__("\n".join(lines))

    def as_dict(self) -> Dict[str, Any]:
        return {"code": self.code, "message": self.message, "details": self.details}


# ---------- gcm ----------

class InvalidGCM(KMForgeError):
    code = "invalid_gcm"


class DiagonalNotTwo(InvalidGCM):
    code = "diagonal_not_two"
    default_guidance = "Axiom C1: every diagonal entry of a generalised Cartan matrix is 2."


class PositiveOffDiagonal(InvalidGCM):
    code = "positive_off_diagonal"
    default_guidance = "Axiom C2: off-diagonal entries must be nonpositive integers."


class AsymmetricZero(InvalidGCM):
    code = "asymmetric_zero"
    default_guidance = "Axiom C3: a_ij = 0 exactly when a_ji = 0."


class DecomposableMatrix(KMForgeError):
    code = "decomposable_matrix"
    default_guidance = "Type classification needs a connected Dynkin diagram; pass one component at a time."


class NotSymmetrizable(KMForgeError):
    code = "not_symmetrizable"


class NotGCM(KMForgeError):
    code = "not_gcm"
    default_guidance = (
        "The pairing matrix of the chosen real roots violates a GCM axiom. "
        "This usually means the difference check ran against a height bound that was too small."
    )


class NotComparable(KMForgeError):
    code = "not_comparable"
    default_guidance = "A surjection pi_AB needs B <= A entrywise under the index embedding."


# ---------- roots ----------

class NotRealRoot(KMForgeError):
    code = "not_real_root"


class UnknownRoot(KMForgeError):
    code = "unknown_root"
    default_guidance = "The vector is not listed in the root table; enumerate to a larger height."


class NotImaginary(KMForgeError):
    code = "not_imaginary"


class NotClosed(KMForgeError):
    code = "not_closed"


class NotPrenilpotent(KMForgeError):
    code = "not_prenilpotent"


class DifferenceIsRoot(KMForgeError):
    code = "difference_is_root"


# ---------- algebra engines ----------

class BandOverflow(KMForgeError):
    code = "band_overflow"
    default_guidance = "Raise the truncation height of the context or keep degrees inside the band."


class NonIntegralDividedPower(KMForgeError):
    code = "non_integral_divided_power"
    default_guidance = (
        "The exact division by s! left the working lattice at this characteristic. "
        "The result is reported, never rounded; use characteristic 0 or a larger prime."
    )


class CharacteristicConstraint(KMForgeError):
    code = "characteristic_constraint"


class UnsupportedDegree(KMForgeError):
    code = "unsupported_degree"


class NotGroupLike(KMForgeError):
    code = "not_group_like"


class HypothesisViolated(KMForgeError):
    code = "hypothesis_violated"


# ---------- enumeration limits ----------

class OrderCapExceeded(KMForgeError):
    code = "order_cap_exceeded"
    default_guidance = "Raise the cap with --order-cap or KMFORGE_ORDER_CAP, or lower the truncation height."


class CapExceeded(KMForgeError):
    code = "cap_exceeded"


# ---------- input ----------

class InvalidInput(KMForgeError):
    code = "invalid_input"
