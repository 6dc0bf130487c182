"""Reduction engine: forward session establishment and communication, their
exact inverses, redex enumeration, and concurrency labels.

Forward steps are enabled by the monitors' remaining protocol (dynamic type
checking); backward steps are enabled by what the monitors remember. Every
operation is pure: configurations are never mutated, and `apply_redex`
re-checks the redex against the configuration it is given, raising
`StaleRedex` when the two have drifted apart.

Monitors record prefix subjects and payloads exactly as written, so undoing
a step rebuilds the original prefix text; a forward step followed by its
inverse lands on a congruent configuration, and vice versa.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .congruence import Flat, flatten
from .errors import StaleRedex
from .surface import render_component, render_value
from .syntax import (
    Accept, Configuration, End, History, Identifier, Input, Kind, Monitor,
    Output, Recv, Request, Running, Send, cursor_advance, cursor_rewind,
    dual_name, dual_type, iter_identifiers, plain, sort_of)

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class Label:
    """Resources a reduction touches: session endpoints plus the service
    channel for establishment steps. Disjoint labels commute."""

    endpoints: frozenset[Identifier]
    service: Identifier | None = None

    def to_json(self) -> dict:
        return {
            "endpoints": sorted(e.spelled() for e in self.endpoints),
            "service": self.service.spelled() if self.service else None,
        }

    def render(self) -> str:
        eps = ",".join(sorted(e.spelled() for e in self.endpoints))
        return f"{{{eps};{self.service.spelled()}}}" if self.service else f"{{{eps}}}"


def concurrent(l1: Label, l2: Label) -> bool:
    """Disjoint endpoint sets and distinct (or absent) service channels."""
    if l1.endpoints & l2.endpoints:
        return False
    if l1.service is not None and l2.service is not None and l1.service == l2.service:
        return False
    return True


@dataclass(frozen=True)
class Redex:
    """A matched rule instance, pinned to component indices of the flattened
    configuration it was enumerated from."""

    direction: str
    rule: str  # Open | Com | OpenU | ComU
    i: int  # first runner (requester / receiver)
    j: int  # second runner (acceptor / sender)
    mon_i: int | None
    mon_j: int | None
    session: Identifier | None  # plain session base (Com/ComU/OpenU)
    service: Identifier | None  # service channel (Open/OpenU)
    fresh: Identifier | None  # session base an Open will allocate
    print_i: str
    print_j: str
    label: Label
    key: str
    desc: str

    def fingerprint(self) -> tuple:
        """Identity that survives concurrent steps (excludes fresh names)."""
        return (self.direction, self.rule,
                self.session.base if self.session else None,
                self.service.spelled() if self.service else None,
                self.print_i, self.print_j)

    def to_json(self) -> dict:
        return {"key": self.key, "direction": self.direction, "rule": self.rule,
                "label": self.label.to_json(), "desc": self.desc}


def redex_label(r: Redex) -> Label:
    return r.label


def _mk_redex(direction: str, rule: str, flat: Flat, i: int, j: int,
              mon_i: int | None, mon_j: int | None, session: Identifier | None,
              service: Identifier | None, fresh: Identifier | None,
              desc: str) -> Redex:
    print_i = render_component(flat.components[i])
    print_j = render_component(flat.components[j])
    if session is not None:
        endpoints = frozenset({plain(session), dual_name(plain(session))})
    else:
        endpoints = frozenset({plain(fresh), dual_name(plain(fresh))})
    label = Label(endpoints, service)
    raw = "|".join([direction, rule, print_i, print_j,
                    session.base if session else "",
                    service.spelled() if service else ""])
    key = hashlib.sha1(raw.encode()).hexdigest()[:16]
    return Redex(direction, rule, i, j, mon_i, mon_j, session, service, fresh,
                 print_i, print_j, label, key, desc)


# ---------------------------------------------------------------------------
# Configuration views


class _View:
    def __init__(self, flat: Flat):
        self.flat = flat
        self.components = flat.components
        self.restricted = {r.base for r in flat.restrictions}
        self.owner: dict[Identifier, int] = {}
        self.monitor: dict[Identifier, int] = {}
        self.runners: list[int] = []
        self.session_bases: list[str] = []
        seen: set[str] = set()
        for idx, c in enumerate(flat.components):
            if isinstance(c, Running):
                self.runners.append(idx)
                for e in c.endpoints:
                    self.owner[e] = idx
            else:
                assert isinstance(c, Monitor)
                self.monitor[c.endpoint] = idx
                if c.endpoint.base not in seen:
                    seen.add(c.endpoint.base)
                    self.session_bases.append(c.endpoint.base)

    def monitored_pairs(self):
        """(plain endpoint, dual endpoint, mon idx, mon idx) for every session
        base monitored at both polarities, in first-seen order."""
        for base in self.session_bases:
            e = Identifier(Kind.SESSION, base)
            d = dual_name(e)
            if e in self.monitor and d in self.monitor:
                yield e, d, self.monitor[e], self.monitor[d]


def _as_flat(m: Configuration | Flat) -> Flat:
    return m if isinstance(m, Flat) else flatten(m)


def _fresh_session_base(flat: Flat) -> Identifier:
    used = {r.base for r in flat.restrictions}
    for c in flat.components:
        used.update(i.base for i in iter_identifiers(c))
    k = 0
    while f"s{k}" in used:
        k += 1
    return Identifier(Kind.SESSION, f"s{k}")


# ---------------------------------------------------------------------------
# Enumeration


def enumerate_forward(m: Configuration | Flat) -> list[Redex]:
    flat = _as_flat(m)
    view = _View(flat)
    out: list[Redex] = []
    fresh = _fresh_session_base(flat)

    # Session establishment: a request and an accept that evaluate to the
    # same service channel and carry dual protocol annotations.
    for i in view.runners:
        ri = flat.components[i]
        if not isinstance(ri.proc, Request):
            continue
        svc_i = ri.store.evaluate(plain(ri.proc.subject))
        if not (isinstance(svc_i, Identifier) and svc_i.kind is Kind.CHANNEL):
            continue
        for j in view.runners:
            if i == j:
                continue
            rj = flat.components[j]
            if not isinstance(rj.proc, Accept):
                continue
            svc_j = rj.store.evaluate(rj.proc.subject)
            if svc_i != svc_j:
                continue
            if rj.proc.stype != dual_type(ri.proc.stype):
                continue
            desc = (f"Open on {svc_i.spelled()}: establish "
                    f"({fresh.base},~{fresh.base})")
            out.append(_mk_redex(FORWARD, "Open", flat, i, j, None, None,
                                 None, svc_i, fresh, desc))

    # Intra-session communication: monitors on both endpoints agree that the
    # next action is a send/receive of one sort, the prefixes point at the
    # session, and the payload carries that sort.
    for e, d, me, md in view.monitored_pairs():
        for recv_ep, send_ep in ((e, d), (d, e)):
            mon_r = flat.components[view.monitor[recv_ep]]
            mon_s = flat.components[view.monitor[send_ep]]
            fut_r, fut_s = mon_r.htype.future, mon_s.htype.future
            if not (isinstance(fut_r, Recv) and isinstance(fut_s, Send)):
                continue
            if fut_r.sort is not fut_s.sort:
                continue
            ir, is_ = view.owner.get(recv_ep), view.owner.get(send_ep)
            if ir is None or is_ is None or ir == is_:
                continue
            rr, rs = flat.components[ir], flat.components[is_]
            if not (isinstance(rr.proc, Input) and isinstance(rs.proc, Output)):
                continue
            if rr.store.evaluate(rr.proc.subject) != recv_ep:
                continue
            if rs.store.evaluate(rs.proc.subject) != send_ep:
                continue
            v = rs.store.evaluate(rs.proc.payload)
            if sort_of(v) is not fut_r.sort:
                continue
            desc = (f"Com on {plain(recv_ep).base}: {render_value(v)} "
                    f"from {send_ep.spelled()} to {recv_ep.spelled()}")
            out.append(_mk_redex(FORWARD, "Com", flat, ir, is_,
                                 view.monitor[recv_ep], view.monitor[send_ep],
                                 plain(recv_ep), None, None, desc))
    out.sort(key=lambda r: (r.i, r.j, r.rule))
    return out


def enumerate_backward(m: Configuration | Flat) -> list[Redex]:
    flat = _as_flat(m)
    view = _View(flat)
    out: list[Redex] = []

    for e, d, me, md in view.monitored_pairs():
        mon_e: Monitor = flat.components[me]
        mon_d: Monitor = flat.components[md]

        # Undo establishment: both cursors at the start, stacks down to the
        # establishment entries, and the session still restricted.
        if (not mon_e.htype.past and not mon_d.htype.past
                and len(mon_e.vars) == 1 and len(mon_d.vars) == 1
                and e.base in view.restricted):
            req, acc = None, None
            if mon_d.names[0].dual and not mon_e.names[0].dual:
                req, acc = (md, d), (me, e)
            elif mon_e.names[0].dual and not mon_d.names[0].dual:
                req, acc = (me, e), (md, d)
            if req is not None:
                mon_req: Monitor = flat.components[req[0]]
                mon_acc: Monitor = flat.components[acc[0]]
                ok = (mon_req.names[0].kind is Kind.CHANNEL
                      and mon_acc.names[0].kind is Kind.CHANNEL
                      and mon_acc.htype.future == dual_type(mon_req.htype.future))
                ir, ia = view.owner.get(req[1]), view.owner.get(acc[1])
                if ok and ir is not None and ia is not None and ir != ia:
                    rr, ra = flat.components[ir], flat.components[ia]
                    svc_r = rr.store.evaluate(plain(mon_req.names[0]))
                    svc_a = ra.store.evaluate(mon_acc.names[0])
                    if (svc_r == svc_a and isinstance(svc_r, Identifier)
                            and svc_r.kind is Kind.CHANNEL
                            and rr.store.bound(mon_req.vars[0])
                            and ra.store.bound(mon_acc.vars[0])):
                        desc = f"OpenU on {svc_r.spelled()}: collapse ({e.base},~{e.base})"
                        out.append(_mk_redex(BACKWARD, "OpenU", flat, ir, ia,
                                             req[0], acc[0], plain(e), svc_r,
                                             None, desc))

        # Undo the most recent communication on this session: the matching
        # send/receive pair sits on top of both monitors.
        if mon_e.htype.past and mon_d.htype.past:
            last_e, last_d = mon_e.htype.past[-1], mon_d.htype.past[-1]
            if last_e.sending == last_d.sending or last_e.sort is not last_d.sort:
                continue
            if last_e.sending:
                send_side, recv_side = (me, e), (md, d)
            else:
                send_side, recv_side = (md, d), (me, e)
            mon_recv: Monitor = flat.components[recv_side[0]]
            mon_send: Monitor = flat.components[send_side[0]]
            x = mon_recv.vars[-1]
            if not (isinstance(x, Identifier) and x.kind is Kind.VARIABLE):
                continue
            ir = view.owner.get(recv_side[1])
            is_ = view.owner.get(send_side[1])
            if ir is None or is_ is None or ir == is_:
                continue
            rr, rs = flat.components[ir], flat.components[is_]
            if rr.store.evaluate(mon_recv.names[-1]) != recv_side[1]:
                continue
            if rs.store.evaluate(mon_send.names[-1]) != send_side[1]:
                continue
            if not rr.store.bound(x):
                continue
            desc = (f"ComU on {e.base}: undo "
                    f"{render_value(rr.store.evaluate(x))} at {recv_side[1].spelled()}")
            out.append(_mk_redex(BACKWARD, "ComU", flat, ir, is_,
                                 recv_side[0], send_side[0], plain(e), None,
                                 None, desc))
    out.sort(key=lambda r: (r.i, r.j, r.rule))
    return out


def enumerate_all(m: Configuration | Flat) -> list[Redex]:
    flat = _as_flat(m)
    return enumerate_forward(flat) + enumerate_backward(flat)


# ---------------------------------------------------------------------------
# Application


def _without(eps: tuple[Identifier, ...], e: Identifier) -> tuple[Identifier, ...]:
    return tuple(x for x in eps if x != e)


def apply_redex(m: Configuration | Flat, r: Redex) -> Configuration:
    """Apply a redex, re-validating it against `m` first."""
    flat = _as_flat(m)
    fresh_match = next((x for x in enumerate_all(flat) if x.key == r.key), None)
    if fresh_match is None:
        raise StaleRedex(f"redex {r.rule} [{r.key}] no longer applies")
    r = fresh_match
    comps = list(flat.components)
    restrictions = flat.restrictions

    if r.rule == "Open":
        req: Running = comps[r.i]
        acc: Running = comps[r.j]
        s_plain = plain(r.fresh)
        s_dual = dual_name(s_plain)
        comps[r.i] = Running(req.endpoints + (s_dual,), req.proc.body,
                             req.store.update(req.proc.var, s_dual))
        comps[r.j] = Running(acc.endpoints + (s_plain,), acc.proc.body,
                             acc.store.update(acc.proc.var, s_plain))
        comps.append(Monitor(s_dual, History((), req.proc.stype),
                             (req.proc.var,), (req.proc.subject,)))
        comps.append(Monitor(s_plain, History((), acc.proc.stype),
                             (acc.proc.var,), (acc.proc.subject,)))
        restrictions = restrictions + (s_plain,)

    elif r.rule == "Com":
        recv: Running = comps[r.i]
        send: Running = comps[r.j]
        mon_r: Monitor = comps[r.mon_i]
        mon_s: Monitor = comps[r.mon_j]
        v = send.store.evaluate(send.proc.payload)
        comps[r.i] = Running(recv.endpoints, recv.proc.body,
                             recv.store.update(recv.proc.var, v))
        comps[r.j] = Running(send.endpoints, send.proc.body, send.store)
        comps[r.mon_i] = Monitor(mon_r.endpoint, cursor_advance(mon_r.htype),
                                 mon_r.vars + (recv.proc.var,),
                                 mon_r.names + (recv.proc.subject,))
        comps[r.mon_j] = Monitor(mon_s.endpoint, cursor_advance(mon_s.htype),
                                 mon_s.vars + (send.proc.payload,),
                                 mon_s.names + (send.proc.subject,))

    elif r.rule == "OpenU":
        req: Running = comps[r.i]
        acc: Running = comps[r.j]
        mon_req: Monitor = comps[r.mon_i]
        mon_acc: Monitor = comps[r.mon_j]
        comps[r.i] = Running(
            _without(req.endpoints, mon_req.endpoint),
            Request(mon_req.names[0], mon_req.vars[0], mon_req.htype.future, req.proc),
            req.store.reverse_update(mon_req.vars[0]))
        comps[r.j] = Running(
            _without(acc.endpoints, mon_acc.endpoint),
            Accept(mon_acc.names[0], mon_acc.vars[0], mon_acc.htype.future, acc.proc),
            acc.store.reverse_update(mon_acc.vars[0]))
        for idx in sorted((r.mon_i, r.mon_j), reverse=True):
            del comps[idx]
        restrictions = tuple(x for x in restrictions if x.base != r.session.base)

    elif r.rule == "ComU":
        recv: Running = comps[r.i]
        send: Running = comps[r.j]
        mon_r: Monitor = comps[r.mon_i]
        mon_s: Monitor = comps[r.mon_j]
        comps[r.i] = Running(recv.endpoints,
                             Input(mon_r.names[-1], mon_r.vars[-1], recv.proc),
                             recv.store.reverse_update(mon_r.vars[-1]))
        comps[r.j] = Running(send.endpoints,
                             Output(mon_s.names[-1], mon_s.vars[-1], send.proc),
                             send.store)
        comps[r.mon_i] = Monitor(mon_r.endpoint, cursor_rewind(mon_r.htype),
                                 mon_r.vars[:-1], mon_r.names[:-1])
        comps[r.mon_j] = Monitor(mon_s.endpoint, cursor_rewind(mon_s.htype),
                                 mon_s.vars[:-1], mon_s.names[:-1])
    else:
        raise StaleRedex(f"unknown rule {r.rule!r}")

    return Flat(restrictions, tuple(comps)).to_configuration()


def replay_keys(m: Configuration, keys: list[str]) -> str:
    """Deterministically re-apply a sequence of redex keys, canonicalizing
    between steps; returns the final canonical text. This is the reference
    semantics every interactive client must agree with byte-for-byte."""
    from .congruence import canonicalize

    cfg = canonicalize(m).to_configuration()
    for k in keys:
        match = next((r for r in enumerate_all(cfg) if r.key == k), None)
        if match is None:
            raise StaleRedex(f"redex key {k} does not apply")
        cfg = canonicalize(apply_redex(cfg, match)).to_configuration()
    return canonicalize(cfg).text


# ---------------------------------------------------------------------------
# Stuckness diagnostics


def stuck_diagnostics(m: Configuration | Flat) -> list[str]:
    """Explain why established sessions cannot take a forward step."""
    flat = _as_flat(m)
    view = _View(flat)
    notes: list[str] = []
    for e, d, me, md in view.monitored_pairs():
        mon_e: Monitor = flat.components[me]
        mon_d: Monitor = flat.components[md]
        fut_e, fut_d = mon_e.htype.future, mon_d.htype.future
        if isinstance(fut_e, End) and isinstance(fut_d, End):
            continue
        if isinstance(fut_e, End) != isinstance(fut_d, End):
            notes.append(f"session {e.base}: one endpoint already completed "
                         f"its protocol, the other has actions left")
            continue
        if isinstance(fut_e, Send) == isinstance(fut_d, Send):
            notes.append(f"session {e.base}: both endpoints expect to "
                         f"{'send' if isinstance(fut_e, Send) else 'receive'}")
            continue
        if fut_e.sort is not fut_d.sort:
            notes.append(f"session {e.base}: endpoint sorts disagree "
                         f"({fut_e.sort.value} vs {fut_d.sort.value})")
            continue
        send_ep = e if isinstance(fut_e, Send) else d
        recv_ep = d if send_ep == e else e
        sender_idx = view.owner.get(send_ep)
        recv_idx = view.owner.get(recv_ep)
        if sender_idx is None or recv_idx is None:
            continue
        sender: Running = flat.components[sender_idx]
        receiver: Running = flat.components[recv_idx]
        want = (fut_e if isinstance(fut_e, Send) else fut_d).sort
        if isinstance(sender.proc, Output):
            v = sender.store.evaluate(sender.proc.payload)
            if sort_of(v) is not want:
                got = sort_of(v).value if sort_of(v) else "a name"
                notes.append(f"session {e.base}: payload "
                             f"{render_value(sender.proc.payload)} has sort "
                             f"{got}, monitor demands {want.value}")
                continue
        if not isinstance(sender.proc, Output) or not isinstance(receiver.proc, Input):
            notes.append(f"session {e.base}: processes are not at matching "
                         f"communication prefixes")
    return notes
