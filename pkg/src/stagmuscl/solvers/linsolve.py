"""Linear solves for symmetric positive (semi)definite systems."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

METHODS = ("cg", "direct")


class LinearSolverError(RuntimeError):
    def __init__(self, message, residual=np.nan, iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass
class SolveInfo:
    residual: float
    iterations: int


def pcg(a, b, x0=None, tol=1e-10, maxiter=None, precond=None):
    """Conjugate gradients with Jacobi preconditioning.

    Stops when ``||b - A x|| <= tol ||b||``.  Raises LinearSolverError on
    non-convergence.
    """
    a = sp.csr_matrix(a)
    b = np.asarray(b, dtype=float)
    n = b.size
    maxiter = 10 * n if maxiter is None else maxiter
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(n), SolveInfo(0.0, 0)
    if precond is None:
        diag = a.diagonal()
        if np.any(diag <= 0):
            raise LinearSolverError("Jacobi preconditioner needs a positive diagonal")
        precond = 1.0 / diag
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    r = b - a @ x
    z = precond * r
    p = z.copy()
    rz = r @ z
    for it in range(1, maxiter + 1):
        if np.linalg.norm(r) <= tol * bnorm:
            return x, SolveInfo(float(np.linalg.norm(r) / bnorm), it - 1)
        ap = a @ p
        pap = p @ ap
        if pap <= 0:
            raise LinearSolverError("operator is not positive definite", np.linalg.norm(r) / bnorm, it)
        alpha = rz / pap
        x += alpha * p
        r -= alpha * ap
        z = precond * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    res = float(np.linalg.norm(b - a @ x) / bnorm)
    if res <= tol:
        return x, SolveInfo(res, maxiter)
    raise LinearSolverError(f"cg did not converge: residual {res:.3e} after {maxiter} iterations", res, maxiter)


class LinearSolveContract:
    """A fixed SPD operator solved repeatedly for new right-hand sides.

    ``method="direct"`` factorises once with a sparse LU; ``"cg"`` runs the
    preconditioned conjugate gradient above.  Either way the returned
    solution is checked against the relative-residual tolerance.
    """

    def __init__(self, matrix, tol: float = 1e-10, maxiter: int | None = None, method: str = "cg"):
        if method not in METHODS:
            raise ValueError(f"unknown linear solver {method!r}")
        self.matrix = sp.csr_matrix(matrix)
        self.tol = tol
        self.maxiter = maxiter
        self.method = method
        self._lu = None
        self._diag_inv = None
        self.last = SolveInfo(0.0, 0)

    def solve(self, rhs, x0=None) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        if self.method == "direct":
            if self._lu is None:
                self._lu = spla.splu(self.matrix.tocsc(), permc_spec="MMD_AT_PLUS_A")
            x = self._lu.solve(rhs)
            bnorm = np.linalg.norm(rhs)
            res = 0.0 if bnorm == 0 else float(np.linalg.norm(rhs - self.matrix @ x) / bnorm)
            if res > self.tol:
                raise LinearSolverError(f"direct solve residual {res:.3e} exceeds {self.tol:.1e}", res, 1)
            self.last = SolveInfo(res, 1)
            return x
        if self._diag_inv is None:
            self._diag_inv = 1.0 / self.matrix.diagonal()
        x, info = pcg(self.matrix, rhs, x0, self.tol, self.maxiter, self._diag_inv)
        self.last = info
        return x
