"""Metatheory harness: random well-formed program generation, state-graph
exploration, and checkers for undoability, commutation of independent steps,
and causal consistency.

The checkers are falsification harnesses over explicit state graphs, not
proofs: they exhaustively test every node of every explored graph and report
concrete counterexample traces when a property fails.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from .congruence import canonicalize
from .semantics import Label, Redex, apply_redex, concurrent, enumerate_all
from .store import EMPTY_STORE
from .syntax import (
    CNIL, END, PNIL, Accept, Configuration, End, Identifier, Input, Output,
    Par, Process, Recv, Request, Running, Send, SessionType, Sort, channel,
    dual_type, lit_bool, lit_int, variable)

_INT_POOL = (7, 42, 0, 3, 5)


@dataclass(frozen=True)
class GenSpec:
    """Shape of generated programs: `processes` running processes paired into
    request/accept partners, protocols up to `depth` actions."""

    processes: int = 2
    depth: int = 1
    sort_weights: tuple[float, float] = (0.5, 0.5)  # (int, bool)
    seed: int = 0
    mismatch: float = 0.0  # fraction of pairs given an ill-sorted payload


def _chan_name(k: int) -> str:
    return chr(ord("a") + k) if k < 8 else f"ch{k}"


def _realize(t: SessionType, subj: Identifier, rng: random.Random,
             zvars: list[str], corrupt_first_send: bool) -> Process:
    """Process that walks its protocol to completion on `subj`."""
    if isinstance(t, Send):
        sort = t.sort
        if corrupt_first_send:
            sort = Sort.BOOL if sort is Sort.INT else Sort.INT
        if sort is Sort.INT:
            payload = lit_int(rng.choice(_INT_POOL))
        else:
            payload = lit_bool(rng.random() >= 0.5)
        body = _realize(t.cont, subj, rng, zvars, False)
        return Output(subj, payload, body)
    if isinstance(t, Recv):
        var = variable(zvars.pop(0))
        return Input(subj, var, _realize(t.cont, subj, rng, zvars, False))
    return PNIL


def generate_initial(spec: GenSpec) -> Configuration:
    """Deterministic-in-seed initial configuration: matched request/accept
    pairs with dual annotations whose bodies perform the full protocol."""
    rng = random.Random(spec.seed)
    pairs = spec.processes // 2
    if pairs <= 0:
        return CNIL

    runners: list[Configuration] = []
    z_counter = 0
    for k in range(pairs):
        svc = channel(_chan_name(k))
        depth = rng.randint(1, max(1, spec.depth))
        t: SessionType = END
        for _ in range(depth):
            sending = rng.random() >= 0.5
            iw, bw = spec.sort_weights
            sort = Sort.INT if rng.random() < iw / (iw + bw) else Sort.BOOL
            t = (Send if sending else Recv)(sort, t)
        corrupt = rng.random() < spec.mismatch

        req_var = variable("x" if k == 0 else f"x{k}")
        acc_var = variable("y" if k == 0 else f"y{k}")
        n_recv = sum(1 for side in (t, dual_type(t))
                     for a in _actions(side) if not a[0])
        zs = []
        for _ in range(n_recv):
            zs.append("z" if z_counter == 0 else f"z{z_counter}")
            z_counter += 1

        req_body = _realize(t, req_var, rng, zs, corrupt)
        acc_body = _realize(dual_type(t), acc_var, rng, zs, False)
        runners.append(Running((), Request(channel(svc.base, dual=True),
                                           req_var, t, req_body), EMPTY_STORE))
        runners.append(Running((), Accept(svc, acc_var, dual_type(t),
                                          acc_body), EMPTY_STORE))

    m: Configuration = runners[0]
    for r in runners[1:]:
        m = Par(m, r)
    return m


def _actions(t: SessionType) -> list[tuple[bool, Sort]]:
    out = []
    while not isinstance(t, End):
        out.append((isinstance(t, Send), t.sort))
        t = t.cont
    return out


# ---------------------------------------------------------------------------
# State graphs


@dataclass
class Edge:
    src: str
    dst: str
    direction: str
    rule: str
    label: Label
    redex_key: str

    def to_json(self) -> dict:
        return {"src": self.src, "dst": self.dst, "direction": self.direction,
                "rule": self.rule, "label": self.label.to_json(),
                "redex": self.redex_key}


@dataclass
class Node:
    key: str
    config: Configuration  # canonical representative
    expanded: bool = False


@dataclass
class StateGraph:
    root: str
    nodes: dict[str, Node] = field(default_factory=dict)
    forward_edges: list[Edge] = field(default_factory=list)
    backward_edges: list[Edge] = field(default_factory=list)
    truncated: bool = False

    @property
    def edges(self) -> list[Edge]:
        return self.forward_edges + self.backward_edges


def explore(m: Configuration, node_budget: int = 10_000) -> StateGraph:
    """Breadth-first closure of forward and backward steps, nodes keyed by
    canonical text. When the budget is hit the graph is flagged truncated."""
    canon = canonicalize(m)
    root = Node(canon.text, canon.to_configuration())
    graph = StateGraph(root=canon.text, nodes={canon.text: root})
    queue: deque[str] = deque([canon.text])
    while queue:
        key = queue.popleft()
        node = graph.nodes[key]
        for r in enumerate_all(node.config):
            child = apply_redex(node.config, r)
            ckey_form = canonicalize(child)
            ckey = ckey_form.text
            if ckey not in graph.nodes:
                if len(graph.nodes) >= node_budget:
                    graph.truncated = True
                    continue
                graph.nodes[ckey] = Node(ckey, ckey_form.to_configuration())
                queue.append(ckey)
            edge = Edge(key, ckey, r.direction, r.rule, r.label, r.key)
            (graph.forward_edges if r.direction == "forward"
             else graph.backward_edges).append(edge)
        node.expanded = True
    return graph


def _paths_from_root(graph: StateGraph) -> dict[str, list[Edge]]:
    """Shortest edge-path from the root to every node (mixed directions)."""
    paths: dict[str, list[Edge]] = {graph.root: []}
    adj: dict[str, list[Edge]] = {}
    for e in graph.edges:
        adj.setdefault(e.src, []).append(e)
    queue = deque([graph.root])
    while queue:
        key = queue.popleft()
        for e in adj.get(key, ()):
            if e.dst not in paths:
                paths[e.dst] = paths[key] + [e]
                queue.append(e.dst)
    return paths


def _trace_json(path: list[Edge]) -> list[dict]:
    return [e.to_json() for e in path]


@dataclass
class CheckReport:
    check: str
    nodes: int
    edges: int
    violations: list[dict]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"check": self.check, "nodes": self.nodes, "edges": self.edges,
                "violations": self.violations}


def check_loop(graph: StateGraph) -> CheckReport:
    """Every forward edge has a backward mate landing on a congruent source,
    and every backward edge has a forward mate."""
    inverse = {"Open": "OpenU", "Com": "ComU", "OpenU": "Open", "ComU": "Com"}
    paths = _paths_from_root(graph)
    fwd = {(e.src, e.dst, e.rule) for e in graph.forward_edges}
    bwd = {(e.src, e.dst, e.rule) for e in graph.backward_edges}
    violations: list[dict] = []

    def complete(key: str) -> bool:
        n = graph.nodes.get(key)
        return n is not None and n.expanded

    for e in graph.forward_edges:
        if not (complete(e.src) and complete(e.dst)):
            continue
        if (e.dst, e.src, inverse[e.rule]) not in bwd:
            violations.append({
                "node": e.src, "redexes": [e.redex_key],
                "witness_trace": _trace_json(paths.get(e.src, []) + [e]),
                "missing": f"backward {inverse[e.rule]} from {e.dst}"})
    for e in graph.backward_edges:
        if not (complete(e.src) and complete(e.dst)):
            continue
        if (e.dst, e.src, inverse[e.rule]) not in fwd:
            violations.append({
                "node": e.src, "redexes": [e.redex_key],
                "witness_trace": _trace_json(paths.get(e.src, []) + [e]),
                "missing": f"forward {inverse[e.rule]} from {e.dst}"})
    return CheckReport("loop", len(graph.nodes), len(graph.edges), violations)


def _lift(r: Redex, cfg: Configuration) -> Redex | None:
    want = r.fingerprint()
    for cand in enumerate_all(cfg):
        if cand.fingerprint() == want:
            return cand
    return None


def check_square(graph: StateGraph) -> CheckReport:
    """Coinitial label-disjoint redexes commute to congruent results."""
    paths = _paths_from_root(graph)
    violations: list[dict] = []
    for key, node in graph.nodes.items():
        if not node.expanded:
            continue
        redexes = enumerate_all(node.config)
        for a in range(len(redexes)):
            for b in range(a + 1, len(redexes)):
                r1, r2 = redexes[a], redexes[b]
                if not concurrent(r1.label, r2.label):
                    continue
                n1 = apply_redex(node.config, r1)
                n2 = apply_redex(node.config, r2)
                lifted2 = _lift(r2, n1)
                lifted1 = _lift(r1, n2)
                if lifted2 is None or lifted1 is None:
                    violations.append({
                        "node": key, "redexes": [r1.key, r2.key],
                        "witness_trace": _trace_json(paths.get(key, [])),
                        "missing": "concurrent redex not re-enabled"})
                    continue
                p1 = canonicalize(apply_redex(n1, lifted2)).text
                p2 = canonicalize(apply_redex(n2, lifted1)).text
                if p1 != p2:
                    violations.append({
                        "node": key, "redexes": [r1.key, r2.key],
                        "witness_trace": _trace_json(paths.get(key, [])),
                        "missing": "orders disagree"})
    return CheckReport("square", len(graph.nodes), len(graph.edges), violations)


def check_causal(graph: StateGraph) -> CheckReport:
    """Undo never escapes what forward execution can reach: the node set
    reachable by mixed paths equals the forward-reachable set."""
    paths = _paths_from_root(graph)
    forward_reach = {graph.root}
    adj: dict[str, list[Edge]] = {}
    for e in graph.forward_edges:
        adj.setdefault(e.src, []).append(e)
    queue = deque([graph.root])
    while queue:
        key = queue.popleft()
        for e in adj.get(key, ()):
            if e.dst not in forward_reach:
                forward_reach.add(e.dst)
                queue.append(e.dst)
    violations: list[dict] = []
    for key in graph.nodes:
        if key not in forward_reach:
            violations.append({
                "node": key, "redexes": [],
                "witness_trace": _trace_json(paths.get(key, [])),
                "missing": "node not forward-reachable"})
    for e in graph.backward_edges:
        if e.src not in forward_reach or e.dst not in forward_reach:
            violations.append({
                "node": e.src, "redexes": [e.redex_key],
                "witness_trace": _trace_json(paths.get(e.src, []) + [e]),
                "missing": "backward edge leaves the forward-reachable set"})
    return CheckReport("causal", len(graph.nodes), len(graph.edges), violations)


def run_all_checks(m: Configuration, node_budget: int = 10_000) -> list[CheckReport]:
    graph = explore(m, node_budget)
    return [check_loop(graph), check_square(graph), check_causal(graph)]
