"""Exception hierarchy shared by every layer of the package."""


class VmssError(Exception):
    """Base class for all errors raised by xtrvmss."""


class ParameterError(VmssError, ValueError):
    """Bad argument: mismatched fields, out-of-range index, duplicate point."""


class DomainError(ParameterError):
    """A value lies outside the required domain (e.g. zero secret)."""


class ConstraintError(VmssError):
    """The modulus q is too small for the requested threshold."""


class GenerationError(VmssError):
    """Parameter search gave up after its attempt bound."""


class BlindingDegenerateError(VmssError):
    """The blinding factor reduced to zero mod q; re-draw the exponent."""


class CorruptCiphertextError(VmssError):
    """A ciphertext could not be opened (zero blinding factor)."""


class ShadowCollisionError(VmssError):
    """Two participants published the same public shadow."""


class IdentityError(VmssError):
    """Unknown or duplicate participant identifier."""


class MalformedBulletinError(VmssError):
    """A bulletin failed structural validation."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InsufficientSharesError(VmssError):
    """Too few (or wrongly placed) shares to reconstruct."""


class CheaterError(VmssError):
    """One or more recovery shares failed cross-verification."""

    def __init__(self, ids, reasons=None):
        self.ids = tuple(ids)
        self.reasons = dict(reasons or {})
        detail = ", ".join(f"{i} ({self.reasons.get(i, 'rejected')})" for i in self.ids)
        super().__init__(f"cheating detected: {detail}")
