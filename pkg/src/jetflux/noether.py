"""Integration by parts on jet space and Noether-type currents.

The central identity: given coefficient families G_a^J over derivative
multi-indices J (completely symmetric, so one slot per distinct J) and
cofactors eps_a,

    sum_a sum_J G_a^J * D_J(eps_a)
        = sum_a Ghat_a * eps_a + Div(boundary current),

with Ghat_a = sum_J (-D)_J G_a^J and an explicit boundary current assembled
by gauss_current.  Everything else here (variation split, Lagrangian
symmetries, Noether currents) is this identity applied to the jet-derivative
slots of a Lagrangian.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Mapping

from .errors import NoSolvedFormError
from .expr import EMPTY_INDEX, Expr, MultiIndex, partial_atom
from .jets import Characteristic, SystemSignature, total_derivative, variation
from .systems import Current, DESystem, divergence, on_shell_reduce
from .render import render
from .report import Report

SlotFamily = Mapping[MultiIndex, Expr]


def _perm(index: MultiIndex) -> int:
    """Distinct orderings of the directions of a multi-index."""
    out = factorial(index.order)
    for _, c in index.counts:
        out //= factorial(c)
    return out


def _sub_indices(index: MultiIndex) -> list[MultiIndex]:
    """All multi-indices A with A <= index componentwise."""
    names = [n for n, _ in index.counts]
    out = []
    for picks in product(*(range(c + 1) for _, c in index.counts)):
        out.append(MultiIndex(tuple(
            (n, k) for n, k in zip(names, picks) if k)))
    return out


class _DerivativeCache:
    """Total derivatives D_A(base) memoized by multi-index."""

    def __init__(self, sig: SystemSignature, base: Expr):
        self.sig = sig
        self.memo: dict[MultiIndex, Expr] = {EMPTY_INDEX: base}

    def get(self, index: MultiIndex) -> Expr:
        hit = self.memo.get(index)
        if hit is not None:
            return hit
        d = next(index.directions())
        out = total_derivative(self.sig, self.get(index - MultiIndex.of(d)), d)
        self.memo[index] = out
        return out


@dataclass(frozen=True)
class IBPInput:
    """Coefficient slots per label plus the cofactor expression each label's
    slots contract against."""

    slots: tuple[tuple[str, tuple[tuple[MultiIndex, Expr], ...]], ...]
    eps: tuple[tuple[str, Expr], ...]

    @staticmethod
    def of(slots: Mapping[str, SlotFamily],
           eps: Mapping[str, Expr]) -> "IBPInput":
        packed = tuple(
            (label, tuple(sorted(family.items(),
                                 key=lambda kv: (kv[0].order, kv[0].counts))))
            for label, family in slots.items())
        return IBPInput(packed, tuple(eps.items()))

    def slot_map(self) -> dict[str, dict[MultiIndex, Expr]]:
        return {label: dict(family) for label, family in self.slots}

    def eps_map(self) -> dict[str, Expr]:
        return dict(self.eps)


def transposed_sum(sig: SystemSignature, family: SlotFamily) -> Expr:
    """sum_J (-D)_J applied to the slot coefficients."""
    total = Expr.zero()
    for index, g in family.items():
        moved = g
        for d in index.directions():
            moved = total_derivative(sig, moved, d)
        total = total + (-moved if index.order % 2 else moved)
    return total


def gauss_current(sig: SystemSignature, slots: Mapping[str, SlotFamily],
                  eps: Mapping[str, Expr]) -> Current:
    """The boundary current of the integration-by-parts identity.

    For each slot (label a, index J) and each direction mu in J, with
    K = J - e_mu, the mu-component receives

        sum_{A+B=K} (-1)^|A| perm(A) perm(B) / perm(J) * D_A(G_a^J) * D_B(eps_a).
    """
    comps = {mu: Expr.zero() for mu in sig.independents}
    for label, family in slots.items():
        eps_cache = _DerivativeCache(sig, eps[label])
        for index, g in family.items():
            if index.order == 0 or g.is_zero:
                continue
            g_cache = _DerivativeCache(sig, g)
            whole = _perm(index)
            for mu, _ in index.counts:
                rest = index - MultiIndex.of(mu)
                for a_part in _sub_indices(rest):
                    b_part = rest - a_part
                    weight = Fraction(_perm(a_part) * _perm(b_part), whole)
                    if a_part.order % 2:
                        weight = -weight
                    piece = g_cache.get(a_part) * eps_cache.get(b_part)
                    comps[mu] = comps[mu] + piece.scale(weight)
    return Current.of(sig, comps)


def ibp_contract(sig: SystemSignature, G: IBPInput) -> Expr:
    """sum_a sum_J G_a^J * D_J(eps_a) — the raw contracted form."""
    total = Expr.zero()
    eps = G.eps_map()
    for label, family in G.slots:
        cache = _DerivativeCache(sig, eps[label])
        for index, g in family:
            total = total + g * cache.get(index)
    return total


def ibp_split(sig: SystemSignature, G: IBPInput,
              ) -> tuple[dict[str, Expr], Current]:
    """Split the contracted form into transposed part and boundary current:
    ibp_contract == sum_a hat[a]*eps_a + divergence(current), exactly."""
    hat = {label: transposed_sum(sig, dict(family)) for label, family in G.slots}
    current = gauss_current(sig, G.slot_map(), G.eps_map())
    return hat, current


def lagrangian_slots(sig: SystemSignature, L: Expr,
                     names: tuple[str, ...] | None = None,
                     ) -> dict[str, dict[MultiIndex, Expr]]:
    """Distinct-index jet-derivative coefficients of L per field name."""
    if names is None:
        names = sig.fields
    slots: dict[str, dict[MultiIndex, Expr]] = {}
    for f in names:
        family: dict[MultiIndex, Expr] = {}
        for index in sorted(L.jet_indices(f), key=lambda j: (j.order, j.counts)):
            g = partial_atom(L, sig.jet(f, index))
            if not g.is_zero:
                family[index] = g
        slots[f] = family
    return slots


def variation_split(sig: SystemSignature, L: Expr, delta: Characteristic,
                    ) -> tuple[Expr, Current]:
    """variation(L, delta) = sum_i E^i(L)*delta_i + Div(j), both parts exact.

    Returns (the Euler part, j).  The Euler part is assembled from the same
    slots as j, so the identity is structural rather than checked.
    """
    names = tuple(f for f in sig.fields if f in delta)
    names += tuple(p for p in sig.parameters
                   if p in delta and p not in sig.fields)
    slots = lagrangian_slots(sig, L, names)
    el_part = Expr.zero()
    for f in names:
        hat = transposed_sum(sig, slots[f])
        el_part = el_part + hat * delta[f]
    j = gauss_current(sig, slots, {f: delta[f] for f in names})
    return el_part, j


@dataclass(frozen=True)
class SymmetryWitness:
    """A characteristic together with the current K certifying that the
    variation of a Lagrangian is the total divergence of K."""

    delta: Characteristic
    K: Current


def check_lagrangian_symmetry(target: DESystem | SystemSignature, L: Expr,
                              w: SymmetryWitness,
                              mode: str = "off-shell") -> Report:
    """variation(L, delta) - Div(K): zero identically (off-shell mode) or
    zero after reduction by the solved form (on-shell mode)."""
    sig = target.sig if isinstance(target, DESystem) else target
    rep = Report("symmetry")
    resid = variation(sig, L, w.delta) - divergence(sig, w.K)
    if mode == "off-shell":
        rep.add("variation(L) == Div K identically", resid.is_zero,
                "" if resid.is_zero else render(resid))
        return rep
    if mode != "on-shell":
        raise ValueError(f"unknown mode {mode!r}")
    if not isinstance(target, DESystem) or not target.solved:
        raise NoSolvedFormError("on-shell symmetry check needs a solved form")
    reduced = resid if resid.is_zero else on_shell_reduce(target, resid)
    rep.add("variation(L) == Div K on solutions", reduced.is_zero,
            "" if reduced.is_zero else render(reduced))
    rep.notes.append("on-shell mode")
    return rep


def noether_current(target: DESystem | SystemSignature, L: Expr,
                    w: SymmetryWitness,
                    mode: str = "off-shell") -> tuple[Current, Report]:
    """The current j - K for a Lagrangian symmetry witness.

    Off-shell mode also certifies Div(j - K) + sum_i E^i(L)*delta_i == 0.
    The returned current is meaningful only if the report passes.
    """
    sig = target.sig if isinstance(target, DESystem) else target
    rep = check_lagrangian_symmetry(target, L, w, mode)
    rep.command = "noether"
    el_part, j = variation_split(sig, L, w.delta)
    J = j - w.K
    if mode == "off-shell":
        resid = divergence(sig, J) + el_part
        rep.add("Div(noether current) + Euler part == 0", resid.is_zero,
                "" if resid.is_zero else render(resid))
    return J, rep
