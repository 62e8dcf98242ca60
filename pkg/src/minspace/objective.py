"""Strictly convex objectives that can be minimised exactly on an affine space."""

from __future__ import annotations

import abc
import json

import numpy as np
import scipy.linalg

from .geometry import AffineSpace, as_vector, project_affine


class StrictlyConvexObjective(abc.ABC):
    """A strictly convex ``f: R^n -> R`` with an exact affine minimiser.

    ``argmin_affine`` must return the unique minimiser on the space or
    ``None`` when ``f`` attains no minimum there; it must never iterate to an
    approximation.
    """

    dimension: int

    @abc.abstractmethod
    def evaluate(self, x) -> float:
        ...

    @abc.abstractmethod
    def argmin_affine(self, space: AffineSpace) -> np.ndarray | None:
        ...

    def argmin_global(self) -> np.ndarray | None:
        return self.argmin_affine(AffineSpace.whole(self.dimension))

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        return np.array([self.evaluate(p) for p in np.atleast_2d(points)])

    def __call__(self, x) -> float:
        return self.evaluate(x)

    @abc.abstractmethod
    def to_dict(self) -> dict:
        ...


class ProjectionObjective(StrictlyConvexObjective):
    """Euclidean distance to ``target``; minimising it projects the target."""

    def __init__(self, target):
        self.target = as_vector(target)
        self.target.setflags(write=False)
        self.dimension = self.target.size

    def evaluate(self, x) -> float:
        return float(np.linalg.norm(as_vector(x, self.dimension) - self.target))

    def evaluate_many(self, points):
        return np.linalg.norm(np.atleast_2d(points) - self.target, axis=1)

    def argmin_affine(self, space: AffineSpace) -> np.ndarray:
        return project_affine(space, self.target)

    def to_dict(self) -> dict:
        return {"type": "projection", "target": self.target.tolist()}

    def __repr__(self):
        return f"ProjectionObjective(target={self.target.tolist()})"


class QuadraticObjective(StrictlyConvexObjective):
    """``(x - center)^T Q (x - center)`` with symmetric positive definite ``Q``."""

    def __init__(self, Q, center):
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        center = as_vector(center)
        if Q.shape != (center.size, center.size):
            raise ValueError(f"Q must be {center.size}x{center.size}, got {Q.shape}")
        if not np.allclose(Q, Q.T, rtol=1e-12, atol=1e-12 * np.abs(Q).max()):
            raise ValueError("Q is not symmetric")
        Q = 0.5 * (Q + Q.T)
        try:
            np.linalg.cholesky(Q)
        except np.linalg.LinAlgError:
            raise ValueError("Q is not positive definite") from None
        self.Q = Q
        self.center = center
        self.dimension = center.size

    def evaluate(self, x) -> float:
        d = as_vector(x, self.dimension) - self.center
        return float(d @ self.Q @ d)

    def evaluate_many(self, points):
        d = np.atleast_2d(points) - self.center
        return np.einsum("ij,jk,ik->i", d, self.Q, d)

    def gradient(self, x) -> np.ndarray:
        return 2.0 * self.Q @ (as_vector(x, self.dimension) - self.center)

    def argmin_affine(self, space: AffineSpace) -> np.ndarray:
        D = space.directions
        if D.shape[0] == 0:
            return space.anchor.copy()
        # reduced problem in the direction basis: (D Q D^T) u = -D Q (anchor - center)
        H = D @ self.Q @ D.T
        g = D @ self.Q @ (space.anchor - self.center)
        u = scipy.linalg.solve(H, -g, assume_a="pos")
        return space.anchor + D.T @ u

    def to_dict(self) -> dict:
        return {"type": "quadratic", "Q": self.Q.tolist(), "center": self.center.tolist()}


def objective_from_dict(data: dict) -> StrictlyConvexObjective:
    kind = data.get("type")
    if kind == "projection":
        return ProjectionObjective(data["target"])
    if kind == "quadratic":
        return QuadraticObjective(data["Q"], data["center"])
    raise ValueError(f"unknown objective type {kind!r}")


def objective_from_json(text: str) -> StrictlyConvexObjective:
    return objective_from_dict(json.loads(text))
