"""Term language: names, sorts, values, protocol types, cursored run-time types,
processes, and configurations.

All nodes are immutable. Configurations built by the parser or the reduction
engine are well formed; `validate` rejects anything that breaks linearity,
binder freshness, or monitor stack bookkeeping.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterator, Union

from .errors import NoFuture, NoPast, WellFormednessError


# ---------------------------------------------------------------------------
# Names


class Kind(enum.Enum):
    CHANNEL = "channel"
    SESSION = "session"
    VARIABLE = "variable"


@dataclass(frozen=True)
class Identifier:
    kind: Kind
    base: str
    dual: bool = False

    def __post_init__(self) -> None:
        if self.kind is Kind.VARIABLE and self.dual:
            raise WellFormednessError(f"variable {self.base!r} cannot carry a polarity")

    def spelled(self) -> str:
        return "~" + self.base if self.dual else self.base

    def __lt__(self, other: "Identifier") -> bool:
        return (self.base, self.dual) < (other.base, other.dual)


def channel(base: str, dual: bool = False) -> Identifier:
    return Identifier(Kind.CHANNEL, base, dual)


def session(base: str, dual: bool = False) -> Identifier:
    return Identifier(Kind.SESSION, base, dual)


def variable(base: str) -> Identifier:
    return Identifier(Kind.VARIABLE, base)


def dual_name(name: Identifier) -> Identifier:
    """Other polarity of a channel or session; an involution."""
    if name.kind is Kind.VARIABLE:
        raise WellFormednessError(f"variable {name.base!r} has no dual")
    return replace(name, dual=not name.dual)


def plain(name: Identifier) -> Identifier:
    return replace(name, dual=False) if name.dual else name


# ---------------------------------------------------------------------------
# Sorts and values


class Sort(enum.Enum):
    INT = "int"
    BOOL = "bool"


@dataclass(frozen=True)
class Lit:
    sort: Sort
    value: object


def lit_int(n: int) -> Lit:
    return Lit(Sort.INT, int(n))


def lit_bool(b: bool) -> Lit:
    return Lit(Sort.BOOL, bool(b))


Value = Union[Lit, Identifier]


def sort_of(v: Value) -> Sort | None:
    """Sort of a value; identifiers have none (no endpoint delegation)."""
    return v.sort if isinstance(v, Lit) else None


# ---------------------------------------------------------------------------
# Protocol types


@dataclass(frozen=True)
class End:
    pass


@dataclass(frozen=True)
class Send:
    sort: Sort
    cont: "SessionType"


@dataclass(frozen=True)
class Recv:
    sort: Sort
    cont: "SessionType"


SessionType = Union[End, Send, Recv]
END = End()


def dual_type(t: SessionType) -> SessionType:
    """Swap sends and receives throughout; fixes end."""
    if isinstance(t, Send):
        return Recv(t.sort, dual_type(t.cont))
    if isinstance(t, Recv):
        return Send(t.sort, dual_type(t.cont))
    return END


def is_dual(s: SessionType, t: SessionType) -> bool:
    return t == dual_type(s)


def type_depth(t: SessionType) -> int:
    """Number of communication actions remaining in the type."""
    n = 0
    while not isinstance(t, End):
        t = t.cont
        n += 1
    return n


# ---------------------------------------------------------------------------
# Run-time types with a cursor

# One executed communication; `sending` is the owner's view of the action.
@dataclass(frozen=True)
class Action:
    sending: bool
    sort: Sort


@dataclass(frozen=True)
class History:
    """A protocol type split by a cursor into executed and remaining actions."""

    past: tuple[Action, ...]
    future: SessionType


def initial_history(t: SessionType) -> History:
    return History((), t)


def cursor_advance(h: History) -> History:
    """Move the cursor over the next remaining action."""
    fut = h.future
    if isinstance(fut, End):
        raise NoFuture("no remaining action to execute")
    act = Action(isinstance(fut, Send), fut.sort)
    return History(h.past + (act,), fut.cont)


def cursor_rewind(h: History) -> History:
    """Move the cursor back over the most recent executed action."""
    if not h.past:
        raise NoPast("no executed action to undo")
    act = h.past[-1]
    ctor = Send if act.sending else Recv
    return History(h.past[:-1], ctor(act.sort, h.future))


# ---------------------------------------------------------------------------
# Processes


@dataclass(frozen=True)
class ProcNil:
    pass


@dataclass(frozen=True)
class Accept:
    subject: Identifier
    var: Identifier
    stype: SessionType
    body: "Process"


@dataclass(frozen=True)
class Request:
    subject: Identifier  # dual-polarized channel
    var: Identifier
    stype: SessionType
    body: "Process"


@dataclass(frozen=True)
class Output:
    subject: Identifier
    payload: Value
    body: "Process"


@dataclass(frozen=True)
class Input:
    subject: Identifier
    var: Identifier
    body: "Process"


@dataclass(frozen=True)
class ProcRes:
    name: Identifier  # channel
    body: "Process"


Process = Union[ProcNil, Accept, Request, Output, Input, ProcRes]
PNIL = ProcNil()


# ---------------------------------------------------------------------------
# Configurations


@dataclass(frozen=True)
class ConfNil:
    pass


@dataclass(frozen=True)
class Running:
    endpoints: tuple[Identifier, ...]
    proc: Process
    store: "Store"  # noqa: F821 - provided by rsx.store


@dataclass(frozen=True)
class Monitor:
    endpoint: Identifier
    htype: History
    vars: tuple[Value, ...]
    names: tuple[Identifier, ...]


@dataclass(frozen=True)
class ConfRes:
    name: Identifier  # base (plain) session or channel; binds both polarities
    body: "Configuration"


@dataclass(frozen=True)
class Par:
    left: "Configuration"
    right: "Configuration"


Configuration = Union[ConfNil, Running, Monitor, ConfRes, Par]
CNIL = ConfNil()


# ---------------------------------------------------------------------------
# Traversals

def _iter_value_ids(v: Value) -> Iterator[Identifier]:
    if isinstance(v, Identifier):
        yield v


def iter_proc_identifiers(p: Process) -> Iterator[Identifier]:
    """Every identifier occurrence in a process, binders included."""
    while True:
        if isinstance(p, ProcNil):
            return
        if isinstance(p, (Accept, Request)):
            yield p.subject
            yield p.var
            p = p.body
        elif isinstance(p, Output):
            yield p.subject
            yield from _iter_value_ids(p.payload)
            p = p.body
        elif isinstance(p, Input):
            yield p.subject
            yield p.var
            p = p.body
        elif isinstance(p, ProcRes):
            yield p.name
            p = p.body
        else:
            raise TypeError(f"not a process: {p!r}")


def iter_identifiers(m: Configuration) -> Iterator[Identifier]:
    """Every identifier occurrence in a configuration, binders included."""
    if isinstance(m, ConfNil):
        return
    if isinstance(m, Running):
        yield from m.endpoints
        yield from iter_proc_identifiers(m.proc)
        for var, values in m.store.items():
            yield var
            for v in values:
                yield from _iter_value_ids(v)
    elif isinstance(m, Monitor):
        yield m.endpoint
        for v in m.vars:
            yield from _iter_value_ids(v)
        yield from m.names
    elif isinstance(m, ConfRes):
        yield m.name
        yield from iter_identifiers(m.body)
    elif isinstance(m, Par):
        yield from iter_identifiers(m.left)
        yield from iter_identifiers(m.right)
    else:
        raise TypeError(f"not a configuration: {m!r}")


def all_base_names(m: Configuration) -> set[str]:
    return {i.base for i in iter_identifiers(m)}


def _proc_binders(p: Process) -> Iterator[Identifier]:
    while not isinstance(p, ProcNil):
        if isinstance(p, (Accept, Request, Input)):
            yield p.var
        elif isinstance(p, ProcRes):
            yield p.name
        p = p.body


def collect_binders(m: Configuration) -> list[Identifier]:
    """All binding occurrences: restriction names and prefix-bound variables."""
    out: list[Identifier] = []
    stack = [m]
    while stack:
        node = stack.pop()
        if isinstance(node, Running):
            out.extend(_proc_binders(node.proc))
        elif isinstance(node, ConfRes):
            out.append(node.name)
            stack.append(node.body)
        elif isinstance(node, Par):
            stack.append(node.right)
            stack.append(node.left)
    return out


def _proc_free_bases(p: Process, bound: frozenset[str]) -> set[str]:
    free: set[str] = set()
    while True:
        if isinstance(p, ProcNil):
            return free
        if isinstance(p, (Accept, Request)):
            if p.subject.base not in bound:
                free.add(p.subject.base)
            bound = bound | {p.var.base}
            p = p.body
        elif isinstance(p, Output):
            for i in (p.subject, *(_iter_value_ids(p.payload))):
                if i.base not in bound:
                    free.add(i.base)
            p = p.body
        elif isinstance(p, Input):
            if p.subject.base not in bound:
                free.add(p.subject.base)
            bound = bound | {p.var.base}
            p = p.body
        else:  # ProcRes
            bound = bound | {p.name.base}
            p = p.body


def free_base_names(m: Configuration, bound: frozenset[str] = frozenset()) -> set[str]:
    """Base names occurring outside the scope of any binder for them.

    Store keys and monitor stack entries count as free occurrences: nothing
    in the term binds them, yet undo rules dereference them by name.
    """
    if isinstance(m, ConfNil):
        return set()
    if isinstance(m, Running):
        free = _proc_free_bases(m.proc, bound)
        for e in m.endpoints:
            if e.base not in bound:
                free.add(e.base)
        for var, values in m.store.items():
            if var.base not in bound:
                free.add(var.base)
            for v in values:
                if isinstance(v, Identifier) and v.base not in bound:
                    free.add(v.base)
        return free
    if isinstance(m, Monitor):
        return {i.base for i in iter_identifiers(m) if i.base not in bound}
    if isinstance(m, ConfRes):
        return free_base_names(m.body, bound | {m.name.base})
    if isinstance(m, Par):
        return free_base_names(m.left, bound) | free_base_names(m.right, bound)
    raise TypeError(f"not a configuration: {m!r}")


def map_proc_identifiers(p: Process, fn) -> Process:
    if isinstance(p, ProcNil):
        return p
    if isinstance(p, Accept):
        return Accept(fn(p.subject), fn(p.var), p.stype, map_proc_identifiers(p.body, fn))
    if isinstance(p, Request):
        return Request(fn(p.subject), fn(p.var), p.stype, map_proc_identifiers(p.body, fn))
    if isinstance(p, Output):
        payload = fn(p.payload) if isinstance(p.payload, Identifier) else p.payload
        return Output(fn(p.subject), payload, map_proc_identifiers(p.body, fn))
    if isinstance(p, Input):
        return Input(fn(p.subject), fn(p.var), map_proc_identifiers(p.body, fn))
    if isinstance(p, ProcRes):
        return ProcRes(fn(p.name), map_proc_identifiers(p.body, fn))
    raise TypeError(f"not a process: {p!r}")


def map_identifiers(m: Configuration, fn) -> Configuration:
    """Rebuild a configuration with every identifier occurrence passed through
    `fn` (binders included). `fn` must preserve well-kindedness."""
    from .store import Store

    def map_value(v: Value) -> Value:
        return fn(v) if isinstance(v, Identifier) else v

    if isinstance(m, ConfNil):
        return m
    if isinstance(m, Running):
        entries = {fn(var): tuple(map_value(v) for v in values)
                   for var, values in m.store.items()}
        return Running(tuple(fn(e) for e in m.endpoints),
                       map_proc_identifiers(m.proc, fn),
                       Store(entries))
    if isinstance(m, Monitor):
        return Monitor(fn(m.endpoint), m.htype,
                       tuple(map_value(v) for v in m.vars),
                       tuple(fn(n) for n in m.names))
    if isinstance(m, ConfRes):
        return ConfRes(fn(m.name), map_identifiers(m.body, fn))
    if isinstance(m, Par):
        return Par(map_identifiers(m.left, fn), map_identifiers(m.right, fn))
    raise TypeError(f"not a configuration: {m!r}")


# ---------------------------------------------------------------------------
# Well-formedness


def _check_monitor(mon: Monitor) -> None:
    if mon.endpoint.kind is not Kind.SESSION:
        raise WellFormednessError(
            f"monitor must watch a session endpoint, got {mon.endpoint.spelled()!r}")
    past = mon.htype.past
    if len(mon.vars) != len(past) + 1 or len(mon.names) != len(past) + 1:
        raise WellFormednessError(
            f"monitor {mon.endpoint.spelled()}: stacks must hold "
            f"{len(past) + 1} entries, got {len(mon.vars)}/{len(mon.names)}")
    first = mon.vars[0]
    if not (isinstance(first, Identifier) and first.kind is Kind.VARIABLE):
        raise WellFormednessError(
            f"monitor {mon.endpoint.spelled()}: first stack entry must be the "
            f"establishment variable")
    for act, entry in zip(past, mon.vars[1:]):
        if not act.sending:
            if not (isinstance(entry, Identifier) and entry.kind is Kind.VARIABLE):
                raise WellFormednessError(
                    f"monitor {mon.endpoint.spelled()}: receive action must "
                    f"record the variable it bound")


def validate(m: Configuration) -> None:
    """Reject configurations violating structural invariants."""
    binders = collect_binders(m)
    seen: set[str] = set()
    for b in binders:
        if b.base in seen:
            raise WellFormednessError(f"binder {b.base!r} declared twice")
        seen.add(b.base)
    free = free_base_names(m)
    clash = seen & free
    if clash:
        raise WellFormednessError(
            f"binder(s) {sorted(clash)} also occur free elsewhere")

    kinds: dict[str, Kind] = {}
    for i in iter_identifiers(m):
        k = kinds.setdefault(i.base, i.kind)
        if k is not i.kind:
            raise WellFormednessError(
                f"name {i.base!r} used both as {k.value} and {i.kind.value}")

    owners: dict[Identifier, int] = {}
    monitors: set[Identifier] = set()
    stack = [m]
    while stack:
        node = stack.pop()
        if isinstance(node, Running):
            locally: set[Identifier] = set()
            for e in node.endpoints:
                if e.kind is not Kind.SESSION:
                    raise WellFormednessError(
                        f"endpoint list entry {e.spelled()!r} is not a session")
                if e in locally or e in owners:
                    raise WellFormednessError(
                        f"endpoint {e.spelled()} owned by more than one process")
                locally.add(e)
                owners[e] = owners.get(e, 0) + 1
            for var, values in node.store.items():
                if var.kind is not Kind.VARIABLE:
                    raise WellFormednessError(
                        f"store key {var.spelled()!r} is not a variable")
                if not values:
                    raise WellFormednessError(
                        f"store entry {var.base!r} has an empty history")
        elif isinstance(node, Monitor):
            _check_monitor(node)
            if node.endpoint in monitors:
                raise WellFormednessError(
                    f"two monitors for endpoint {node.endpoint.spelled()}")
            monitors.add(node.endpoint)
        elif isinstance(node, ConfRes):
            if node.name.kind is Kind.VARIABLE:
                raise WellFormednessError("cannot restrict a variable")
            stack.append(node.body)
        elif isinstance(node, Par):
            stack.append(node.left)
            stack.append(node.right)
    for e in monitors:
        if e not in owners:
            raise WellFormednessError(
                f"monitored endpoint {e.spelled()} is owned by no process")


def is_initial(m: Configuration) -> bool:
    """No monitors, and every running process has empty store and endpoints."""
    stack = [m]
    while stack:
        node = stack.pop()
        if isinstance(node, Monitor):
            return False
        if isinstance(node, Running) and (node.endpoints or len(node.store)):
            return False
        if isinstance(node, ConfRes):
            stack.append(node.body)
        elif isinstance(node, Par):
            stack.append(node.left)
            stack.append(node.right)
    return True
