"""Per-process local store: variables mapped to their full assignment history.

A variable's list holds every value it was ever bound to, oldest first; the
current binding is the last element. Keeping the whole list is what makes
communication undoable: reverse update pops exactly one assignment.
"""
from __future__ import annotations

from typing import Iterable, Mapping

from .errors import UnboundVariable
from .syntax import Identifier, Kind, Value


class Store:
    """Immutable variable store; update/reverse_update return new stores."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[Identifier, Iterable[Value]] | None = None):
        data: dict[Identifier, tuple[Value, ...]] = {}
        if entries:
            for var, values in entries.items():
                data[var] = tuple(values)
        self._entries = data

    def update(self, var: Identifier, value: Value) -> "Store":
        """Bind `var` to `value`, stacking on top of any previous binding."""
        new = dict(self._entries)
        new[var] = new.get(var, ()) + (value,)
        return Store(new)

    def reverse_update(self, var: Identifier) -> "Store":
        """Drop the most recent binding of `var`; inverse of `update`."""
        if var not in self._entries:
            raise UnboundVariable(f"{var.spelled()} has no recorded value")
        new = dict(self._entries)
        values = new[var][:-1]
        if values:
            new[var] = values
        else:
            del new[var]
        return Store(new)

    def evaluate(self, v: Value) -> Value:
        """Current value of a bound variable; anything else is itself."""
        if isinstance(v, Identifier) and v.kind is Kind.VARIABLE:
            values = self._entries.get(v)
            if values:
                return values[-1]
        return v

    def bound(self, var: Identifier) -> bool:
        return var in self._entries

    def items(self) -> list[tuple[Identifier, tuple[Value, ...]]]:
        return sorted(self._entries.items(), key=lambda kv: kv[0].base)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Store) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(tuple(self.items()))

    def __repr__(self) -> str:
        inner = ", ".join(
            f"{var.spelled()}=[{', '.join(map(repr, values))}]"
            for var, values in self.items())
        return f"Store({inner})"


EMPTY_STORE = Store()
