"""Points of the Siegel upper half-space H_g."""

from __future__ import annotations

import numpy as np


class SiegelPoint:
    """Z = X + iY with X, Y real symmetric and Y positive definite.

    The eigenvalues and Cholesky factor of Y are computed once here; theta
    evaluation reads them for its truncation ellipsoid and tail bound.
    """

    __slots__ = ("Z", "X", "Y", "lam_min", "chol", "Yinv_diag", "cache")

    def __init__(self, Z, atol=1e-12):
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        if Z.ndim != 2 or Z.shape[0] != Z.shape[1]:
            raise ValueError("Z must be a square matrix, got shape %s" % (Z.shape,))
        X, Y = Z.real.copy(), Z.imag.copy()
        scale = max(1.0, float(np.abs(Z).max()))
        if not (np.allclose(X, X.T, atol=atol * scale) and np.allclose(Y, Y.T, atol=atol * scale)):
            raise ValueError("Z is not symmetric")
        # symmetrize away round-off from group actions
        X = (X + X.T) / 2
        Y = (Y + Y.T) / 2
        lam = np.linalg.eigvalsh(Y)
        if lam[0] <= 0:
            raise ValueError("Im Z is not positive definite (min eigenvalue %g)" % lam[0])
        self.X = X
        self.Y = Y
        self.Z = X + 1j * Y
        self.lam_min = float(lam[0])
        self.chol = np.linalg.cholesky(Y)
        self.Yinv_diag = np.diag(np.linalg.inv(Y)).copy()
        # per-point memo for values shared across indices (the S_+ denominator)
        self.cache = {}

    @property
    def genus(self) -> int:
        return self.Z.shape[0]

    @classmethod
    def diag(cls, taus) -> "SiegelPoint":
        taus = [complex(t) for t in taus]
        if any(t.imag <= 0 for t in taus):
            raise ValueError("every tau_k needs Im > 0")
        return cls(np.diag(taus))

    @classmethod
    def random(cls, g: int, rng: np.random.Generator) -> "SiegelPoint":
        """X + i(Q^T Q + I), entries of X (symmetrized) and Q uniform in [-1/2, 1/2].

        lambda_min(Y) >= 1 by construction.
        """
        A = rng.uniform(-0.5, 0.5, size=(g, g))
        X = np.triu(A) + np.triu(A, 1).T
        Q = rng.uniform(-0.5, 0.5, size=(g, g))
        Y = Q.T @ Q + np.eye(g)
        return cls(X + 1j * Y)

    def scaled(self, c: float) -> "SiegelPoint":
        return SiegelPoint(c * self.Z)

    def __repr__(self):
        return "SiegelPoint(%s)" % np.array2string(self.Z, precision=6)


def random_tau(rng: np.random.Generator) -> complex:
    """A point of H_1 with real part in [-1/2, 1/2] and imaginary part in [1, 2]."""
    return complex(rng.uniform(-0.5, 0.5), rng.uniform(1.0, 2.0))
