"""Exception types shared across the package."""


class DyadlabError(Exception):
    """Base class for all package-specific errors."""


class LatticeBudgetError(DyadlabError):
    """Enumerating a truncated lattice would exceed the interval budget."""


class ScaleMismatchError(DyadlabError):
    """A function is finer than the lattice (analysis would drop detail)."""


class DepthError(DyadlabError):
    """A shift term needs cells below the lattice's finest scale."""


class RefinementBudgetError(DyadlabError):
    """Translation amount could not be snapped within the refinement budget."""


class NoQualifyingIntervalError(DyadlabError):
    """A noncompactness probe found no interval meeting its threshold."""


class ConfigError(DyadlabError):
    """An experiment configuration failed schema validation."""
