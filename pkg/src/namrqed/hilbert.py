"""Truncated qubit x phonon state spaces and their canonical operators.

Basis states are labelled ``(j, k)`` with qubit index ``j`` (1 = excited)
and phonon number ``k``. Two truncations are supported:

``Truncation.TOTAL``
    states with ``j + k <= N``, ordered by total excitation and then by
    ``j`` inside each level: ``(0,0), (0,1), (1,0), (0,2), (1,1), ...``
``Truncation.FOCK``
    the product space ``k <= N`` with a full qubit, ordered by ``k`` and
    then ``j``: ``(0,0), (1,0), (0,1), (1,1), ...``

Operators are truncated by projection: matrix elements that would leave the
space are dropped. Products such as ``a sigma_+`` are formed on an enlarged
product space first and projected afterwards (:func:`product_op`), which is
what keeps the ``<10|a sigma_+|01>`` coupling on the ``N = 1`` space.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import BasisMismatch

__all__ = [
    "BasisSpec",
    "LabeledOperator",
    "LadderOps",
    "Truncation",
    "check_same_basis",
    "enumerate_basis",
    "ladder_ops",
    "product_op",
]


class Truncation(str, enum.Enum):
    TOTAL = "total"
    FOCK = "fock"


@dataclass(frozen=True)
class BasisSpec:
    scheme: Truncation
    cutoff: int

    def __post_init__(self):
        object.__setattr__(self, "scheme", Truncation(self.scheme))
        if int(self.cutoff) != self.cutoff or self.cutoff < 0:
            raise ValueError(f"cutoff must be a non-negative integer, got {self.cutoff!r}")
        object.__setattr__(self, "cutoff", int(self.cutoff))

    @classmethod
    def total(cls, n: int) -> "BasisSpec":
        return cls(Truncation.TOTAL, n)

    @classmethod
    def fock(cls, n: int) -> "BasisSpec":
        return cls(Truncation.FOCK, n)

    @cached_property
    def labels(self) -> tuple[tuple[int, int], ...]:
        return tuple(enumerate_basis(self))

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def max_phonons(self) -> int:
        return self.cutoff

    def index(self, label: tuple[int, int]) -> int:
        return self._index[tuple(label)]

    @cached_property
    def _index(self) -> dict[tuple[int, int], int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def __contains__(self, label) -> bool:
        return tuple(label) in self._index

    def __str__(self) -> str:
        return f"{self.scheme.value}(N={self.cutoff})"


def enumerate_basis(spec: BasisSpec) -> list[tuple[int, int]]:
    n = spec.cutoff
    if spec.scheme is Truncation.TOTAL:
        labels = [(0, 0)]
        for level in range(1, n + 1):
            labels += [(0, level), (1, level - 1)]
        return labels
    return [(j, k) for k in range(n + 1) for j in (0, 1)]


@dataclass(frozen=True, eq=False)
class LabeledOperator:
    """A square matrix tied to a basis; element ``(r, c)`` is ``<r|O|c>``."""

    basis: BasisSpec
    matrix: np.ndarray = field(repr=False)
    name: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(
                f"matrix shape {m.shape} does not match basis dimension {self.basis.dim}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def element(self, row: tuple[int, int], col: tuple[int, int]) -> complex:
        return complex(self.matrix[self.basis.index(row), self.basis.index(col)])

    @property
    def dag(self) -> "LabeledOperator":
        return LabeledOperator(self.basis, self.matrix.conj().T, f"{self.name}^dag")

    def __matmul__(self, other: "LabeledOperator") -> "LabeledOperator":
        check_same_basis(self, other)
        return LabeledOperator(self.basis, self.matrix @ other.matrix, f"{self.name}*{other.name}")

    def scaled(self, factor: complex, name: str | None = None) -> "LabeledOperator":
        return LabeledOperator(self.basis, factor * self.matrix, name or self.name)


def check_same_basis(*objects) -> BasisSpec:
    """Return the common basis of ``objects`` or raise :class:`BasisMismatch`."""
    bases = {obj.basis for obj in objects}
    if len(bases) != 1:
        raise BasisMismatch("operands live on different bases: " + ", ".join(map(str, bases)))
    return bases.pop()


class LadderOps(NamedTuple):
    a: LabeledOperator
    a_dag: LabeledOperator
    sigma_minus: LabeledOperator
    sigma_plus: LabeledOperator
    sigma_z: LabeledOperator
    identity: LabeledOperator


def _product_space_ops(max_k: int) -> tuple[list[tuple[int, int]], dict[str, np.ndarray]]:
    labels = enumerate_basis(BasisSpec.fock(max_k))
    index = {lab: i for i, lab in enumerate(labels)}
    dim = len(labels)
    a = np.zeros((dim, dim))
    sp = np.zeros((dim, dim))
    for (j, k), col in index.items():
        if k > 0:
            a[index[(j, k - 1)], col] = np.sqrt(k)
        if j == 0:
            sp[index[(1, k)], col] = 1.0
    ops = {
        "a": a,
        "a_dag": a.T.copy(),
        "sigma_plus": sp,
        "sigma_minus": sp.T.copy(),
        "sigma_z": np.diag([2.0 * j - 1.0 for j, _ in labels]),
        "identity": np.eye(dim),
    }
    return labels, ops


def product_op(spec: BasisSpec, *factors: str, name: str | None = None) -> LabeledOperator:
    """Project the product of canonical operators onto ``spec``.

    ``factors`` are names among ``a, a_dag, sigma_minus, sigma_plus,
    sigma_z, identity`` and multiply left to right. The product is evaluated
    on a product space large enough that no intermediate amplitude is lost,
    then restricted to the states of ``spec``.
    """
    if not factors:
        raise ValueError("need at least one factor")
    labels, ops = _product_space_ops(spec.max_phonons + len(factors))
    unknown = set(factors) - ops.keys()
    if unknown:
        raise ValueError(f"unknown operator names: {sorted(unknown)}")
    full = ops[factors[0]]
    for f in factors[1:]:
        full = full @ ops[f]
    index = {lab: i for i, lab in enumerate(labels)}
    keep = [index[lab] for lab in spec.labels]
    return LabeledOperator(spec, full[np.ix_(keep, keep)], name or "*".join(factors))


def ladder_ops(spec: BasisSpec) -> LadderOps:
    return LadderOps(*(product_op(spec, n) for n in LadderOps._fields))
