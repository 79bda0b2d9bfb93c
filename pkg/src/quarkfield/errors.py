"""Exception types shared across the toolkit."""


class QuarkfieldError(Exception):
    """Base class for all toolkit errors."""


class GridMismatch(QuarkfieldError):
    """Two fields live on different grids."""


class GridTooCoarse(QuarkfieldError):
    """The grid cannot resolve the requested construction."""


class SupportOverflow(QuarkfieldError):
    """A translated/dilated support leaves the periodic box."""


class TailOverflow(QuarkfieldError):
    """Non-compact tails exceed the admissible truncation level."""


class LevelOutOfRange(QuarkfieldError):
    """Dyadic level outside the admissible range of the grid."""


class IndexOutOfRange(QuarkfieldError):
    """Multi-index or lattice index outside the built tables."""


class SpecInvalid(QuarkfieldError):
    """Inconsistent space parameters."""


class FlavorMismatch(QuarkfieldError):
    """Sequence spec flavor does not match the tensor indexing."""


class ComplexInput(QuarkfieldError):
    """Real-only operation received genuinely complex data."""


class RegimeMismatch(QuarkfieldError):
    """Operation invoked with the wrong analysis/synthesis regime."""


class HypothesisViolated(QuarkfieldError):
    """Smoothness/integrability hypotheses of the target assertion fail."""


class ScaleTooFine(QuarkfieldError):
    """Continuous scale below the grid spacing."""


class SupportViolation(QuarkfieldError):
    """A support condition required by the probe is not satisfied."""


class TruncationInsufficient(QuarkfieldError):
    """Lattice-sum truncation leaves a relative tail above tolerance."""


class NoConvergence(QuarkfieldError):
    """Iterative refinement failed to converge."""


class ResolutionExceeded(QuarkfieldError):
    """Whitney cover cannot resolve the domain at the requested depth."""


class CoverageGap(QuarkfieldError):
    """Partition-of-unity denominator vanishes on the covered region."""


class IndexNotInDomain(QuarkfieldError):
    """Coefficient index outside the domain index set."""


class ConfigError(QuarkfieldError):
    """Malformed or inconsistent run configuration."""
