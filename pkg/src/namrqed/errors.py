"""Exception hierarchy shared by all modules."""


class NamrError(Exception):
    """Base class for every error raised by :mod:`namrqed`."""


class SingularMatrix(NamrError):
    pass


class DefectiveMatrix(NamrError):
    pass


class AmbiguousKernel(NamrError):
    """The null space does not have dimension one."""


class BasisMismatch(NamrError):
    pass


class InvalidDevice(NamrError):
    pass


class InvalidState(NamrError):
    """A density matrix violates Hermiticity, normalization or positivity."""


class ExceptionalPoint(NamrError):
    """The two first-order rates coincide and the closed forms break down."""


class TailTooFat(NamrError):
    """A correlation trace has not decayed by the end of its delay grid."""


class SingularResolvent(NamrError):
    pass


class NoPeaks(NamrError):
    pass


class ConfigError(NamrError):
    pass
