"""The Bruck loop on positive-definite hermitian isometries.

Multiplication is A o B = sqrt(A B^2 A); the square root is the unique
positive-definite one, so the carrier is closed.  Divisions have closed
forms: a*(a\\b)=b gives x = sqrt(A^{-1} C^2 A^{-1}), and the right-division
equation x A^2 x = B^2 is a Riccati equation whose unique positive-definite
solution is x = A^{-1} sqrt(A B^2 A) A^{-1}.

Products of three or more matrices are evaluated strictly left to right
and every hermitian intermediate is re-symmetrized, so residuals are
reproducible across platforms.  Elements are validated on construction by
the callers that mint them; operations trust their inputs and the test
suite validates outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .groups import SampleStream, SigmaElement, SignatureForm, sample_sigma
from .kernel import Loop
from .linalg import DEFAULT_TOL, Tolerance, fro, spectral_map, symmetrize


def frobenius_distance(a: SigmaElement, b: SigmaElement) -> float:
    """Relative Frobenius distance, symmetric in its arguments."""
    return fro(a.matrix - b.matrix) / (1.0 + max(fro(a.matrix), fro(b.matrix)))


@dataclass(frozen=True)
class MatrixLoop:
    form: SignatureForm
    tol: Tolerance = field(default=DEFAULT_TOL)
    sample_radius: float = 0.75

    def identity(self) -> SigmaElement:
        return SigmaElement(np.eye(self.form.n, dtype=self.form.dtype), self.form)

    def _check(self, *elems: SigmaElement) -> None:
        for e in elems:
            if e.form != self.form:
                raise DimensionMismatch("element form does not match the loop form")

    def mul(self, a: SigmaElement, b: SigmaElement) -> SigmaElement:
        self._check(a, b)
        prod = ((a.matrix @ b.matrix) @ b.matrix) @ a.matrix
        return SigmaElement(spectral_map(symmetrize(prod), "sqrt", self.tol), self.form)

    def inverse(self, a: SigmaElement) -> SigmaElement:
        self._check(a)
        return SigmaElement(spectral_map(a.matrix, "inverse", self.tol), self.form)

    def left_divide(self, a: SigmaElement, c: SigmaElement) -> SigmaElement:
        self._check(a, c)
        ainv = spectral_map(a.matrix, "inverse", self.tol)
        prod = ((ainv @ c.matrix) @ c.matrix) @ ainv
        return SigmaElement(spectral_map(symmetrize(prod), "sqrt", self.tol), self.form)

    def right_divide(self, b: SigmaElement, a: SigmaElement) -> SigmaElement:
        self._check(a, b)
        prod = ((a.matrix @ b.matrix) @ b.matrix) @ a.matrix
        root = spectral_map(symmetrize(prod), "sqrt", self.tol)
        ainv = spectral_map(a.matrix, "inverse", self.tol)
        return SigmaElement(symmetrize((ainv @ root) @ ainv), self.form)

    def sample(self, stream: SampleStream):
        return sample_sigma(self.form, stream, self.sample_radius, self.tol)

    def loop_interface(self) -> Loop:
        return Loop(
            mul=self.mul,
            left_divide=self.left_divide,
            right_divide=self.right_divide,
            identity=self.identity(),
            distance=frobenius_distance,
            sample=self.sample,
        )
