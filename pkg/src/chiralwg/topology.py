"""Layouts of atoms coupled to a chiral waveguide at ordered connection points.

Phases are the primary inputs. Ranks only fix the left-to-right order of the
connection points; equal ranks mark coincident points.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

from .hilbert import MAX_ATOMS

TWO_PI = 2.0 * math.pi


class LayoutError(ValueError):
    pass


class UnknownAtomError(LayoutError):
    pass


class NegativeRateError(LayoutError):
    pass


class PhaseCountMismatchError(LayoutError):
    pass


class EmptyAtomError(LayoutError):
    pass


class DuplicateAtomError(LayoutError):
    pass


class NonFinitePhaseError(LayoutError):
    pass


class SplitError(LayoutError):
    pass


@dataclass(frozen=True)
class Atom:
    name: str
    frequency: float = 0.0
    detuning: float = 0.0


@dataclass(frozen=True)
class ConnectionPoint:
    owner: str
    position_rank: int
    gamma_right: float
    gamma_left: float

    @property
    def gamma(self):
        return self.gamma_right + self.gamma_left


@dataclass(frozen=True)
class Layout:
    atoms: tuple[Atom, ...]
    points: tuple[ConnectionPoint, ...]
    phases: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))


@dataclass(frozen=True)
class ValidatedLayout(Layout):
    """A layout that passed :func:`validate`; points are sorted by rank.

    `checks` holds named boolean diagnostics recorded by layout surgery
    (see :func:`split_point`).
    """

    checks: Mapping[str, bool] = field(default_factory=dict)

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "checks", MappingProxyType(dict(self.checks)))

    @property
    def n_atoms(self):
        return len(self.atoms)

    @property
    def atom_names(self):
        return [a.name for a in self.atoms]

    def atom_index(self, name):
        for i, atom in enumerate(self.atoms):
            if atom.name == name:
                return i
        raise UnknownAtomError(f"no atom named {name!r}")

    def points_of(self, name):
        """Indices (into the sorted point list) of the points owned by `name`."""
        self.atom_index(name)
        return [i for i, p in enumerate(self.points) if p.owner == name]

    @property
    def total_phase(self):
        return math.fsum(self.phases)


class TopologyClass(enum.Enum):
    SMALL_PAIR = "small"
    SEPARATE = "separate"
    NESTED = "nested"
    BRAIDED = "braided"


def validate(layout: Layout) -> ValidatedLayout:
    names = [a.name for a in layout.atoms]
    if len(set(names)) != len(names):
        raise DuplicateAtomError("atom names must be unique")
    if not names:
        raise EmptyAtomError("layout has no atoms")
    if len(names) > MAX_ATOMS:
        raise LayoutError(f"at most {MAX_ATOMS} atoms are supported")
    for p in layout.points:
        if p.owner not in names:
            raise UnknownAtomError(f"point owned by undeclared atom {p.owner!r}")
        if not (p.gamma_right >= 0 and p.gamma_left >= 0):
            raise NegativeRateError(
                f"rates must be nonnegative, got ({p.gamma_right}, {p.gamma_left}) "
                f"on a point of {p.owner!r}"
            )
        if not (math.isfinite(p.gamma_right) and math.isfinite(p.gamma_left)):
            raise NegativeRateError("rates must be finite")
    owners = {p.owner for p in layout.points}
    for name in names:
        if name not in owners:
            raise EmptyAtomError(f"atom {name!r} has no connection point")
    if len(layout.phases) != max(len(layout.points) - 1, 0):
        raise PhaseCountMismatchError(
            f"{len(layout.points)} points need {len(layout.points) - 1} phases, "
            f"got {len(layout.phases)}"
        )
    if not all(math.isfinite(phi) for phi in layout.phases):
        raise NonFinitePhaseError("phases must be finite")
    points = sorted(layout.points, key=lambda p: p.position_rank)
    return ValidatedLayout(
        atoms=layout.atoms,
        points=points,
        phases=layout.phases,
        checks=getattr(layout, "checks", {}),
    )


def classify_pair(layout: ValidatedLayout, atom_j: str, atom_k: str) -> TopologyClass:
    if atom_j == atom_k:
        raise ValueError("classify_pair needs two distinct atoms")
    pj = layout.points_of(atom_j)
    pk = layout.points_of(atom_k)
    if len(pj) == 1 and len(pk) == 1:
        return TopologyClass.SMALL_PAIR
    if max(pj) < min(pk) or max(pk) < min(pj):
        return TopologyClass.SEPARATE
    if _nested_in(pk, pj) or _nested_in(pj, pk):
        return TopologyClass.NESTED
    return TopologyClass.BRAIDED


def _nested_in(inner, outer):
    # all inner points lie strictly between two consecutive outer points
    lo, hi = min(inner), max(inner)
    for a, b in zip(outer, outer[1:]):
        if a < lo and hi < b:
            return True
    return False


def cumulative_phase(layout: ValidatedLayout, point_m: int, point_n: int) -> float:
    """Sum of the phases picked up travelling from point m to point n."""
    n_points = len(layout.points)
    if not (0 <= point_m < n_points and 0 <= point_n < n_points):
        raise IndexError("point index out of range")
    if point_m > point_n:
        raise ValueError("cumulative_phase needs point_m <= point_n")
    return math.fsum(layout.phases[point_m:point_n])


def is_multiple_of_two_pi(phi, tol=1e-9):
    return abs(math.remainder(phi, TWO_PI)) <= tol


def split_sum_rule(original_rate, sub_rates, tol=1e-9):
    """True when ``(sum_j sqrt(gamma_j))**2`` reproduces `original_rate`."""
    total = math.fsum(math.sqrt(r) for r in sub_rates) ** 2
    return abs(total - original_rate) <= tol * max(1.0, original_rate)


def split_point(
    layout: ValidatedLayout,
    point: int,
    sub_rates: Sequence[tuple[float, float]],
    sub_phases: Sequence[float] | None = None,
) -> ValidatedLayout:
    """Replace one connection point by ``len(sub_rates)`` consecutive points.

    The sum rule ``(sum sqrt(gamma_j))^2 == gamma`` is recorded per direction in
    ``checks`` under ``split_sum_rule_right``, ``split_sum_rule_left`` and
    ``split_sum_rule`` but is not enforced.
    """
    if not sub_rates:
        raise SplitError("sub_rates must not be empty")
    if sub_phases is None:
        sub_phases = [0.0] * (len(sub_rates) - 1)
    if len(sub_phases) != len(sub_rates) - 1:
        raise SplitError("need exactly len(sub_rates) - 1 sub_phases")
    if not all(is_multiple_of_two_pi(phi) for phi in sub_phases):
        raise SplitError("split phases must be multiples of 2*pi")
    if not 0 <= point < len(layout.points):
        raise IndexError("point index out of range")

    old = layout.points[point]
    new_points = []
    rank = 0
    for i, p in enumerate(layout.points):
        # dense re-ranking keeps coincident points coincident
        if i > 0 and p.position_rank != layout.points[i - 1].position_rank:
            rank += 1
        if i == point:
            for j, (gr, gl) in enumerate(sub_rates):
                new_points.append(ConnectionPoint(p.owner, rank + j, gr, gl))
            rank += len(sub_rates) - 1
        else:
            new_points.append(ConnectionPoint(p.owner, rank, p.gamma_right, p.gamma_left))
    phases = list(layout.phases[:point]) + list(sub_phases) + list(layout.phases[point:])

    ok_r = split_sum_rule(old.gamma_right, [r for r, _ in sub_rates])
    ok_l = split_sum_rule(old.gamma_left, [l for _, l in sub_rates])
    checks = dict(layout.checks)
    checks.update(
        split_sum_rule_right=ok_r, split_sum_rule_left=ok_l, split_sum_rule=ok_r and ok_l
    )
    split = Layout(atoms=layout.atoms, points=new_points, phases=phases)
    validated = validate(split)
    return ValidatedLayout(
        atoms=validated.atoms, points=validated.points, phases=validated.phases, checks=checks
    )


def make_layout(atoms, order, phases, gamma_right=0.5, gamma_left=0.5, frequencies=None):
    """Build a validated layout from a point order such as ``"abab"``.

    `atoms` names the atoms (declaration order), `order` lists the owner of
    each point left to right. Rates may be scalars or per-point sequences.
    """
    n = len(order)
    gr = per_point(gamma_right, n)
    gl = per_point(gamma_left, n)
    freqs = frequencies or {}
    atom_objs = [
        a if isinstance(a, Atom) else Atom(a, frequency=freqs.get(a, 0.0)) for a in atoms
    ]
    points = [ConnectionPoint(owner, i, gr[i], gl[i]) for i, owner in enumerate(order)]
    return validate(Layout(atom_objs, points, list(phases)))


def per_point(value, n):
    if isinstance(value, (int, float)):
        return [float(value)] * n
    value = list(value)
    if len(value) != n:
        raise ValueError(f"expected {n} per-point rates, got {len(value)}")
    return [float(v) for v in value]
