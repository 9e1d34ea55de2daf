"""
Error taxonomy for the moduli app.

Every numerical failure raised by the services is a ``ModuliError`` with a
stable ``code``; management commands turn them into ``CommandError``.
"""


class ModuliError(ValueError):
    """Base class for all moduli computation errors"""
    code = 'moduli_error'

    def __init__(self, message='', **context):
        super().__init__(message or self.__class__.__doc__)
        self.context = context

    def __str__(self):
        return f'[{self.code}] {super().__str__()}'


class InvalidMatrix(ModuliError):
    """Matrix is non-finite, mis-shaped or violates a structural requirement"""
    code = 'invalid_matrix'


class BranchAmbiguous(ModuliError):
    """Unitary has an eigenvalue at -1; the principal logarithm is undefined"""
    code = 'branch_ambiguous'


class SingularMatrix(ModuliError):
    """Matrix is singular within the rank tolerance"""
    code = 'singular_matrix'


class InvalidFrame(ModuliError):
    """Rows or columns are not orthonormal within the residual tolerance"""
    code = 'invalid_frame'


class TooLarge(ModuliError):
    """Requested enumeration exceeds the desk-scale cap"""
    code = 'too_large'


class RankAmbiguous(ModuliError):
    """A singular value lies within a factor 10 of the rank cutoff"""
    code = 'rank_ambiguous'


class ParameterSingular(ModuliError):
    """Stability parameter is undefined for these discrete invariants"""
    code = 'parameter_singular'


class UnsupportedModel(ModuliError):
    """Operation needs data the model does not carry"""
    code = 'unsupported_model'


class MomentMismatch(ModuliError):
    """Moment value of the plane does not match the prescribed level"""
    code = 'moment_mismatch'


class NothingToShift(ModuliError):
    """No weight 1/2 block to remove at the chosen point"""
    code = 'nothing_to_shift'


class BoundaryDegenerate(ModuliError):
    """Moment eigenvalue reached the boundary of the chart"""
    code = 'boundary_degenerate'


class ResidualExceeded(ModuliError):
    """A computed identity holds only above the residual tolerance"""
    code = 'residual_exceeded'


class InfeasibleDegree(ModuliError):
    """Degree cannot be realised by moment values in [-1/2, 1/2]"""
    code = 'infeasible_degree'


class SpanDeficient(ModuliError):
    """Projections of the two planes do not span the framing space"""
    code = 'span_deficient'


class DiagonalKernel(ModuliError):
    """The two planes share a nonzero vector of the framing space"""
    code = 'diagonal_kernel'


class InvalidWeights(ModuliError):
    """Parabolic weights are not weakly decreasing in [-1/2, 1/2]"""
    code = 'invalid_weights'


class InvalidParabolicFlag(ModuliError):
    """Flag subspaces are not nested or have the wrong endpoints"""
    code = 'invalid_parabolic_flag'
