"""Exception family for the lab.

Everything raised on purpose derives from ChoqlabError so the CLI can
separate anticipated failures (bad configs, violated side conditions,
non-converged solves) from genuine bugs.
"""


class ChoqlabError(Exception):
    """Base class for anticipated failures."""


class InvalidAlpha(ChoqlabError):
    """Riesz order outside (0, N)."""


class GridMismatch(ChoqlabError):
    """Operands discretized on different grids."""


class ZeroField(ChoqlabError):
    """A field with vanishing mass cannot be renormalized."""


class RootNotBracketed(ChoqlabError):
    """A landscape equation has no sign change on its predicted interval."""


class SideConditionViolated(ChoqlabError):
    """A regime's standing assumption fails with the supplied constants."""


class NonPositive(ChoqlabError):
    """A quantity required to be positive came out <= 0."""


class WrongRegime(ChoqlabError):
    """Operation invoked for a regime it does not apply to."""


class Diverged(ChoqlabError):
    """Gradient flow left the energy well without decreasing the energy."""


class MaxIters(ChoqlabError):
    """Iteration budget exhausted before the termination test held."""


class FiberDegenerate(ChoqlabError):
    """Fiber profile lost the single-maximum geometry during a solve."""
