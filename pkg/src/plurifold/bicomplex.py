"""Values ``a + eps*b`` of a complexified real space.

``eps`` is the complexification unit (``eps**2 = -1``).  It is kept apart
from the imaginary unit of matrix entries: ``a`` and ``b`` may themselves be
complex matrices, and ``1j * a`` is a different vector from ``eps * a``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Bicomplex:
    re: np.ndarray
    im: np.ndarray

    @classmethod
    def real(cls, a) -> "Bicomplex":
        a = np.asarray(a)
        return cls(a, np.zeros_like(a))

    @classmethod
    def zeros_like(cls, a) -> "Bicomplex":
        a = np.asarray(a)
        return cls(np.zeros_like(a), np.zeros_like(a))

    def __add__(self, other: "Bicomplex") -> "Bicomplex":
        return Bicomplex(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "Bicomplex") -> "Bicomplex":
        return Bicomplex(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "Bicomplex":
        return Bicomplex(-self.re, -self.im)

    def scale(self, s: float) -> "Bicomplex":
        return Bicomplex(s * self.re, s * self.im)

    def times_eps(self) -> "Bicomplex":
        return Bicomplex(-self.im, self.re)

    def conj(self) -> "Bicomplex":
        """Conjugation with respect to ``eps`` only."""
        return Bicomplex(self.re, -self.im)

    def map(self, f) -> "Bicomplex":
        """Apply a real-linear map to both parts (its eps-linear extension)."""
        return Bicomplex(f(self.re), f(self.im))

    def norm(self) -> float:
        return float(np.sqrt(np.linalg.norm(self.re) ** 2 + np.linalg.norm(self.im) ** 2))

    def __matmul__(self, other: "Bicomplex") -> "Bicomplex":
        return Bicomplex(self.re @ other.re - self.im @ other.im,
                         self.re @ other.im + self.im @ other.re)


def extend_bilinear(f, x: Bicomplex, y: Bicomplex) -> Bicomplex:
    """eps-bilinear extension of a real-bilinear ``f``."""
    return Bicomplex(f(x.re, y.re) - f(x.im, y.im), f(x.re, y.im) + f(x.im, y.re))


def bracket(x: Bicomplex, y: Bicomplex) -> Bicomplex:
    return extend_bilinear(lambda a, b: a @ b - b @ a, x, y)
