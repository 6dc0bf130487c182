"""Structural congruence decided by canonicalization.

Configurations are identified up to parallel commutativity/associativity,
nil absorption, restriction reordering, scope extrusion, and renaming of
restriction-bound names. `canonicalize` computes a normal form -- one
restriction prefix over a flat, deterministically ordered parallel of
running processes and monitors -- such that two configurations are congruent
exactly when their canonical texts coincide.

Renaming covers restriction-bound names only. Variables recorded in stores
and monitor stacks are pinned by the undo machinery and are observable, so
they are never rewritten; binder variables still sitting under prefixes keep
their parsed spelling (the parser has already made them distinct).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .syntax import (
    CNIL, Configuration, ConfNil, ConfRes, Identifier, Kind, Monitor, Par,
    Running, iter_identifiers, map_identifiers)
from .surface import render_component, render_restriction_names

_MAX_TIE_CANDIDATES = 720


@dataclass(frozen=True)
class EvaluationContext:
    """Restriction prefix with a hole for a parallel of components."""

    restrictions: tuple[Identifier, ...]

    def plug(self, components: list[Configuration]) -> Configuration:
        body: Configuration = CNIL
        if components:
            body = components[0]
            for c in components[1:]:
                body = Par(body, c)
        for name in reversed(self.restrictions):
            body = ConfRes(name, body)
        return body


@dataclass(frozen=True)
class Flat:
    """Scope-extruded view: all restrictions hoisted, parallel flattened."""

    restrictions: tuple[Identifier, ...]
    components: tuple[Configuration, ...]  # Running | Monitor only

    def to_configuration(self) -> Configuration:
        return EvaluationContext(self.restrictions).plug(list(self.components))


def flatten(m: Configuration) -> Flat:
    restrictions: list[Identifier] = []
    components: list[Configuration] = []

    def walk(node: Configuration) -> None:
        if isinstance(node, ConfNil):
            return
        if isinstance(node, (Running, Monitor)):
            components.append(node)
        elif isinstance(node, ConfRes):
            restrictions.append(node.name)
            walk(node.body)
        elif isinstance(node, Par):
            walk(node.left)
            walk(node.right)
        else:
            raise TypeError(f"not a configuration: {node!r}")

    walk(m)
    return Flat(tuple(restrictions), tuple(components))


def decompose(m: Configuration) -> tuple[EvaluationContext, list[Configuration]]:
    """Split into an evaluation context and the components under it.

    Plugging the components back yields a configuration congruent to `m`.
    """
    flat = flatten(m)
    return EvaluationContext(flat.restrictions), list(flat.components)


# ---------------------------------------------------------------------------
# Canonical form


@dataclass(frozen=True)
class CanonicalForm:
    restricted: tuple[Identifier, ...]
    runners: tuple[Running, ...]
    monitors: tuple[Monitor, ...]
    text: str

    def to_configuration(self) -> Configuration:
        return EvaluationContext(self.restricted).plug(
            list(self.runners) + list(self.monitors))


def _mask_bound(c: Configuration, bound: set[str]) -> Configuration:
    def mask(i: Identifier) -> Identifier:
        return Identifier(i.kind, "\x00", i.dual) if i.base in bound else i

    return map_identifiers(c, mask)


def _restriction_sort_key(name: Identifier) -> tuple:
    return (0 if name.kind is Kind.CHANNEL else 1, len(name.base), name.base)


def _render_flat(restrictions: list[Identifier], components: list[Configuration]) -> str:
    if not components:
        return "0"
    body = " | ".join(render_component(c) for c in components)
    if len(components) > 1 and restrictions:
        body = f"({body})"
    if restrictions:
        return f"new({render_restriction_names(tuple(restrictions))}). {body}"
    return body


def _candidate_orders(flat: Flat, bound: set[str]) -> list[tuple[int, ...]]:
    def rank(c: Configuration) -> int:
        return 0 if isinstance(c, Running) else 1

    keys = [(rank(c), render_component(_mask_bound(c, bound)))
            for c in flat.components]
    keyed = sorted(range(len(flat.components)), key=lambda i: keys[i])
    groups: list[list[int]] = []
    last_key = None
    for i in keyed:
        if keys[i] == last_key:
            groups[-1].append(i)
        else:
            groups.append([i])
            last_key = keys[i]

    total = 1
    for g in groups:
        for k in range(2, len(g) + 1):
            total *= k
    if total > _MAX_TIE_CANDIDATES:
        # Pathological pile of look-alike components: fall back to the raw
        # rendering as a tiebreaker instead of searching all orders.
        order = []
        for g in groups:
            order.extend(sorted(g, key=lambda i: render_component(flat.components[i])))
        return [tuple(order)]

    perms_per_group = [list(itertools.permutations(g)) for g in groups]
    candidates = []
    for combo in itertools.product(*perms_per_group):
        order: list[int] = []
        for part in combo:
            order.extend(part)
        candidates.append(tuple(order))
    return candidates


def canonicalize(m: Configuration) -> CanonicalForm:
    """Normal form: nils dropped, scopes extruded, components flattened and
    deterministically ordered, restriction-bound names renamed canonically."""
    flat = flatten(m)
    bound = {r.base for r in flat.restrictions}
    if not flat.components:
        return CanonicalForm((), (), (), "0")

    used_free = {i.base for c in flat.components for i in iter_identifiers(c)
                 if i.base not in bound}

    best: tuple[str, list[Identifier], list[Configuration]] | None = None
    for order in _candidate_orders(flat, bound):
        mapping: dict[str, str] = {}
        used = set(used_free)
        counters = {Kind.SESSION: 0, Kind.CHANNEL: 0}
        kinds = {r.base: r.kind for r in flat.restrictions}

        def assign(base: str) -> None:
            kind = kinds[base]
            prefix = "s" if kind is Kind.SESSION else "c"
            i = counters[kind]
            while f"{prefix}{i}" in used:
                i += 1
            mapping[base] = f"{prefix}{i}"
            used.add(f"{prefix}{i}")
            counters[kind] = i + 1

        for idx in order:
            for occ in iter_identifiers(flat.components[idx]):
                if occ.base in bound and occ.base not in mapping:
                    assign(occ.base)
        for r in sorted(flat.restrictions, key=lambda n: n.base):
            if r.base not in mapping:
                assign(r.base)

        def rename(i: Identifier) -> Identifier:
            new = mapping.get(i.base)
            return Identifier(i.kind, new, i.dual) if new else i

        components = [map_identifiers(flat.components[idx], rename) for idx in order]
        restrictions = sorted(
            (Identifier(r.kind, mapping[r.base]) for r in flat.restrictions),
            key=_restriction_sort_key)
        text = _render_flat(restrictions, components)
        if best is None or text < best[0]:
            best = (text, restrictions, components)

    text, restrictions, components = best
    runners = tuple(c for c in components if isinstance(c, Running))
    monitors = tuple(c for c in components if isinstance(c, Monitor))
    return CanonicalForm(tuple(restrictions), runners, monitors, text)


def equiv(m: Configuration, n: Configuration) -> bool:
    """Structural congruence, decided via canonical forms."""
    return canonicalize(m).text == canonicalize(n).text
