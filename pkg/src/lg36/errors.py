"""Error hierarchy.

Every failure mode that callers are expected to branch on carries a stable
``code`` string.  Errors with retry semantics (irrational roots, degenerate
random configurations) derive from ResampleError so that driver loops can
catch them uniformly and try a fresh seed.
"""

from __future__ import annotations


class LG36Error(Exception):
    """Base class for all library errors."""

    code = "ERROR"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


class FieldMismatchError(LG36Error):
    """Operands or serialized data belong to different base fields."""

    code = "FIELD_MISMATCH"


class SchemaMismatchError(LG36Error):
    """Serialized document has an unsupported schema version or shape."""

    code = "SCHEMA_MISMATCH"


class RankDeficientError(LG36Error):
    """A matrix expected to have full rank does not."""

    code = "RANK_DEFICIENT"


class ResampleError(LG36Error):
    """Recoverable failure: the configuration should be resampled."""

    code = "RESAMPLE"


class NotSplitError(ResampleError):
    """A required root or square root does not exist over the base field."""

    code = "NOT_SPLIT"


class RootsNotSplitError(NotSplitError):
    """A full root set was requested but some roots are irrational."""

    code = "ROOTS_NOT_SPLIT"


class NotTransverseError(ResampleError):
    """Subspaces meet nontrivially where transversality is required."""

    code = "NOT_TRANSVERSE"


class NotSymmetricError(LG36Error):
    """A chart matrix expected to be symmetric is not."""

    code = "NOT_SYMMETRIC"


class ChartFailureError(ResampleError):
    """No usable affine chart was found for a point."""

    code = "CHART_FAILURE"


class InOmegaError(LG36Error):
    """Point lies in the deep stratum where the bisecant is not unique."""

    code = "IN_OMEGA"


class NotInOmegaError(LG36Error):
    """Point does not lie in the middle stratum."""

    code = "NOT_IN_OMEGA"


class RankUnstableError(LG36Error):
    """A kernel did not stabilize when more samples were added."""

    code = "RANK_UNSTABLE"


class NetDimError(LG36Error):
    """The space of quadrics through the curve has unexpected dimension."""

    code = "NET_DIM"


class SyzygyError(LG36Error):
    """The linear syzygy module of the net has unexpected dimension."""

    code = "SYZYGY_FAIL"


class DegeneratePlaneError(LG36Error):
    """The two secant-line forms are dependent: the point lies in a plane
    meeting the determinantal locus in a degree-2 curve."""

    code = "DEGENERATE_PLANE"


class NotThreePointsError(ResampleError):
    """A plane fails to meet the ruled threefold in three distinct points."""

    code = "NOT_THREE_POINTS"


class InOmegaConfigError(ResampleError):
    """Self-incident plane/threefold configuration (non-generic)."""

    code = "IN_OMEGA_CONFIG"


class SameSpanError(LG36Error):
    """Two curves span the same 3-space, so their intersection is not finite."""

    code = "SAME_SPAN"


class NotOnSectionError(LG36Error):
    """A point that must lie on the linear section does not."""

    code = "NOT_ON_SECTION"


class TooManyPointsError(LG36Error):
    """More prescribed points than the target subspace can hold."""

    code = "TOO_MANY_POINTS"


class CubicInSectionError(LG36Error):
    """The whole curve lies inside the linear section."""

    code = "CUBIC_IN_SECTION"


class NonReducedError(ResampleError):
    """An intersection scheme has a multiple point where distinct points
    are required."""

    code = "NON_REDUCED"


class WrongLengthError(ResampleError):
    """An intersection scheme has unexpected length."""

    code = "WRONG_LENGTH"


class NoHyperplaneError(ResampleError):
    """The constrained tangent-hyperplane system has no nonzero solution."""

    code = "NO_HYPERPLANE"


class KernelDimError(LG36Error):
    """Interpolation kernel dimension differs from one."""

    code = "KERNEL_DIM"


class ZeroRestrictionError(LG36Error):
    """A form restricts to zero on the given subspace."""

    code = "ZERO_RESTRICTION"


class ResidualDegenerateError(ResampleError):
    """Too few residual-curve points were found to reconstruct it."""

    code = "RESIDUAL_DEGENERATE"


class ConjugacyError(ResampleError):
    """Three lines fail the conjugacy conditions."""

    code = "CONJUGACY_FAIL"


class EigenDegenerateError(ResampleError):
    """Eigenvalue multiplicities of the two-form pencil are not (2,2,2)."""

    code = "EIGEN_DEGENERATE"


class LineCountError(ResampleError):
    """The number of common horizontal lines differs from three."""

    code = "LINE_COUNT"


class NotHyperplaneError(ResampleError):
    """A join expected to be a hyperplane has wrong dimension."""

    code = "NOT_HYPERPLANE"


class NotOnFXError(LG36Error):
    """A recovered plane-quartic point fails to lie on the restricted quartic."""

    code = "NOT_ON_FX"
