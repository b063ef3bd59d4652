"""Shared construction helpers for the test suite."""

import numpy as np

from checkerboard_rmt.algebra import DivisionAlgebra, HermitianMatrix, conjugate_transpose


def random_hermitian(rng: np.random.Generator, dim: int, algebra: DivisionAlgebra) -> HermitianMatrix:
    """Random dense self-adjoint matrix: A + conj(A)^T of an i.i.d. normal grid."""
    algebra = DivisionAlgebra.parse(algebra)
    if algebra is DivisionAlgebra.REAL:
        raw = rng.standard_normal((dim, dim))
    elif algebra is DivisionAlgebra.COMPLEX:
        raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    else:
        raw = rng.standard_normal((dim, dim, 4))
    return HermitianMatrix(raw + conjugate_transpose(raw, algebra), algebra)
