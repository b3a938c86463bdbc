"""Configurations of n unit vectors in R^d, vectorization conventions,
tangent-space bases, projections, and rank/consensus classification.

The vectorized view x of a configuration X stacks the rows agent-major,
x = [x_1; x_2; ...; x_n] = vec(X^T), so Kronecker products of the form
(A ot I_d) act blockwise on agents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

RANK_TOL = 1e-8
CONSENSUS_TOL = 1e-9


@dataclass(frozen=True)
class Configuration:
    """n unit rows in R^d."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[1] < 2:
            raise ValueError("rows must be an n x d array with d >= 2")
        norms = np.linalg.norm(rows, axis=1)
        if np.any(norms <= 1e-14):
            bad = int(np.argmin(norms)) + 1
            raise ValueError(f"row {bad} has near-zero norm")
        rows /= norms[:, None]
        rows.flags.writeable = False
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]

    @property
    def vector(self) -> np.ndarray:
        """Agent-major vectorization vec(X^T)."""
        return self.rows.reshape(-1)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "d": self.d, "rows": self.rows.tolist()})

    @staticmethod
    def from_json(text: str) -> "Configuration":
        obj = json.loads(text)
        return Configuration(np.asarray(obj["rows"], dtype=float))


def unvec(x: np.ndarray, n: int, d: int) -> np.ndarray:
    """Inverse of Configuration.vector: agent-major vector back to n x d rows."""
    return np.asarray(x, dtype=float).reshape(n, d)


@dataclass(frozen=True)
class TangentBasis:
    """Per-agent orthonormal bases of the sphere tangent spaces.

    blocks[i] is d x (d-1) with orthonormal columns orthogonal to row i.
    """

    blocks: tuple = field(default_factory=tuple)

    @property
    def n(self) -> int:
        return len(self.blocks)

    @property
    def d(self) -> int:
        return self.blocks[0].shape[0]

    def block_diagonal(self) -> np.ndarray:
        """The nd x n(d-1) block-diagonal aggregate."""
        n, d = self.n, self.d
        r = np.zeros((n * d, n * (d - 1)))
        for i, b in enumerate(self.blocks):
            r[i * d:(i + 1) * d, i * (d - 1):(i + 1) * (d - 1)] = b
        return r


def normalize_rows(raw: np.ndarray) -> Configuration:
    """Divide each row by its norm; rejects near-zero rows."""
    return Configuration(np.asarray(raw, dtype=float))


def random_configuration(n: int, d: int, seed) -> Configuration:
    """Rows i.i.d. uniform on the unit sphere (normalized Gaussians)."""
    if n < 1 or d < 2:
        raise ValueError("need n >= 1 and d >= 2")
    rng = np.random.default_rng(seed)
    return Configuration(rng.standard_normal((n, d)))


def consensus_configuration(n: int, xbar: np.ndarray) -> Configuration:
    """All n rows equal to the unit vector xbar."""
    xbar = np.asarray(xbar, dtype=float)
    nrm = np.linalg.norm(xbar)
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"xbar must be a unit vector, got norm {nrm}")
    return Configuration(np.tile(xbar / nrm, (n, 1)))


def numerical_rank(c: Configuration, tol: float = RANK_TOL) -> int:
    """Number of singular values of X above tol times the largest."""
    s = np.linalg.svd(c.rows, compute_uv=False)
    return int(np.sum(s > tol * s[0]))


@dataclass(frozen=True)
class ConfigurationClass:
    """Classification of a configuration: consensus, antipodal rank-one, or
    higher rank (with the numerical rank)."""

    kind: str  # "consensus" | "antipodal" | "higher-rank"
    rank: int

    @property
    def is_consensus(self) -> bool:
        return self.kind == "consensus"


def classify_configuration(c: Configuration, tol: float = CONSENSUS_TOL,
                           rank_tol: float = RANK_TOL) -> ConfigurationClass:
    """Consensus iff all pairwise row dot products are >= 1 - tol; otherwise
    antipodal if X has numerical rank one; otherwise higher-rank."""
    gram = c.rows @ c.rows.T
    if gram.min() >= 1.0 - tol:
        return ConfigurationClass("consensus", 1)
    m = numerical_rank(c, rank_tol)
    if m == 1:
        return ConfigurationClass("antipodal", 1)
    return ConfigurationClass("higher-rank", m)


def _tangent_block(xi: np.ndarray) -> np.ndarray:
    """Deterministic d x (d-1) orthonormal basis of the tangent space at xi.

    d = 2 uses the quarter-turn [x2, -x1]. For d >= 3, reflect xi onto a
    signed first coordinate axis with a Householder matrix and keep its last
    d-1 columns, which are orthonormal and orthogonal to xi.
    """
    d = xi.shape[0]
    if d == 2:
        return np.array([[xi[1]], [-xi[0]]])
    e1 = np.zeros(d)
    e1[0] = 1.0 if xi[0] < 0 else -1.0  # reflect away from xi for stability
    v = xi - e1
    h = np.eye(d) - 2.0 * np.outer(v, v) / (v @ v)
    return h[:, 1:]


def tangent_basis(c: Configuration) -> TangentBasis:
    """Per-agent orthonormal tangent bases, deterministic in the rows."""
    return TangentBasis(tuple(_tangent_block(c.rows[i]) for i in range(c.n)))


def projection_matrix(c: Configuration) -> np.ndarray:
    """Block-diagonal tangent projector with blocks I - x_i x_i^T."""
    n, d = c.n, c.d
    p = np.zeros((n * d, n * d))
    for i in range(n):
        xi = c.rows[i]
        p[i * d:(i + 1) * d, i * d:(i + 1) * d] = np.eye(d) - np.outer(xi, xi)
    return p
