from .angles import (
    AngleSequence,
    check_angle,
    coupling_from_theta,
    theta_from_coupling,
    theta_from_x,
    x_from_theta,
)
from .eigen import tridiagonal_eigh, tridiagonal_eigvalsh
from .jacobi import (
    BidiagonalOperator,
    JacobiOperator,
    MomentTable,
    build_d_even,
    build_jacobi,
    moments,
)
from .logdet import LogDet, hankel_logdet, hankel_matrix, logdet
from .spectral import (
    SpectralQuadrature,
    polar_minor_logdet,
    spectral_quadrature,
    sqrt_minor_logdet,
    sqrt_spectrum,
)
