"""Dark-state invariance when one connection point is split into several."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..coefficients import assemble_model, compute_coefficients
from ..topology import ValidatedLayout, split_point
from .dark import dark_span, find_dark_states, nontrivial, span_fidelity


@dataclass(frozen=True)
class SplitSpec:
    point: int
    sub_rates: Sequence[tuple[float, float]]
    sub_phases: Sequence[float] | None = field(default=None)


def undriven_dark_states(layout: ValidatedLayout, tol=1e-9):
    return nontrivial(find_dark_states(assemble_model(compute_coefficients(layout)), tol))


def splitting_fidelity(layout: ValidatedLayout, spec: SplitSpec, tol=1e-9):
    """Worst overlap of an original dark state with the split layout's dark span.

    Returns ``(fidelity, n_original, n_split)``; the fidelity is 1.0 when the
    original layout has no nontrivial dark state.
    """
    split = split_point(layout, spec.point, spec.sub_rates, spec.sub_phases)
    before = undriven_dark_states(layout, tol)
    after = undriven_dark_states(split, tol)
    span = dark_span(after)
    worst = min((span_fidelity(r.state, span) for r in before), default=1.0)
    return worst, len(before), len(after)


def verify_splitting_invariance(layout: ValidatedLayout, spec: SplitSpec, tol=1e-9) -> bool:
    """True iff the dark states before and after splitting agree within fidelity 1 - tol."""
    worst, n_before, n_after = splitting_fidelity(layout, spec, tol)
    return n_before == n_after and worst > 1.0 - tol
