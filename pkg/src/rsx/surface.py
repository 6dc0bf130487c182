"""Concrete syntax: parser and printer for configurations, processes, types,
stores, and monitors.

The grammar (`--` starts a line comment; whitespace is free):

    config  := atom ("|" atom)*
    atom    := "0" | runner | monitor | "(" config ")" | "new(" names ")." config
    runner  := "proc" "[" endpoints? "]" "{" process "}" "store" "{" bindings? "}"
    monitor := "mon" endpoint "{" htype ";" "[" values? "]" ";" "[" names? "]" "}"
    process := "0" | prefix "." process | "new(" id ")." process
    prefix  := id "(" id ":" stype ")"           -- accept on a service channel
             | "~" id "(" id ":" stype ")"       -- request on its dual
             | name "!<" value ">"               -- output
             | name "?(" id ")"                  -- input
    stype   := "end" | "!" sort "." stype | "?" sort "." stype
    htype   := (("!"|"?") sort ".")* "^" stype?  -- '^' is the cursor; executed
                                                 -- actions sit to its left
    value   := int | "true" | "false" | name
    name    := "~"? id

A restriction's body extends as far right as possible; parenthesize to stop
it early. `new(s,~s)` (both polarities listed) restricts a session pair,
`new(a)` a service channel.

Name kinds are inferred from positions of use (service subjects are channels,
prefix binders and store keys are variables, endpoint lists and monitor
subjects are sessions); using one name in conflicting positions is rejected.
Clashing binders are renamed apart automatically and the renaming reported.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import RsxError, WellFormednessError
from .store import Store
from .syntax import (
    CNIL, END, PNIL, Accept, Action, Configuration, ConfNil, ConfRes, End,
    History, Identifier, Input, Kind, Monitor, Output, Par, Process, ProcNil,
    ProcRes, Recv, Request, Running, Send, SessionType, Sort, Value,
    all_base_names, free_base_names, lit_bool, lit_int, map_identifiers,
    validate)

RESERVED = {"end", "int", "bool", "true", "false", "proc", "mon", "store", "new"}

_PUNCT = set("(){}[]<>!?.^;,=|~:")


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


class ParseError(RsxError):
    def __init__(self, span: SourceSpan, expected: str, found: str):
        super().__init__(f"at {span}: expected {expected}, found {found}")
        self.span = span
        self.expected = expected
        self.found = found


@dataclass(frozen=True)
class Token:
    typ: str  # "ident", "int", "eof", or the punctuation character itself
    text: str
    span: SourceSpan


def _lex(text: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def span(start: int, start_line: int, start_col: int) -> SourceSpan:
        return SourceSpan(start, i, start_line, start_col)

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            if c == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1
            continue
        start, sl, sc = i, line, col
        if c == "-" and i + 1 < n and text[i + 1] == "-":
            while i < n and text[i] != "\n":
                i += 1
            col += i - start
            continue
        if c == "-" and i + 1 < n and text[i + 1].isdigit():
            i += 1
            while i < n and text[i].isdigit():
                i += 1
            col += i - start
            toks.append(Token("int", text[start:i], span(start, sl, sc)))
            continue
        if c.isdigit():
            while i < n and text[i].isdigit():
                i += 1
            col += i - start
            toks.append(Token("int", text[start:i], span(start, sl, sc)))
            continue
        if c.isalpha() or c == "_":
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            col += i - start
            toks.append(Token("ident", text[start:i], span(start, sl, sc)))
            continue
        if c in _PUNCT:
            i += 1
            col += 1
            toks.append(Token(c, c, span(start, sl, sc)))
            continue
        raise ParseError(SourceSpan(i, i + 1, line, col), "a token", repr(c))
    toks.append(Token("eof", "", SourceSpan(n, n, line, col)))
    return toks


# ---------------------------------------------------------------------------
# Parsing

# Provisional identifier spelling ("~"-marked or not); kinds resolved later.
@dataclass(frozen=True)
class _RawId:
    base: str
    dual: bool
    span: SourceSpan

    def spelled(self) -> str:
        return "~" + self.base if self.dual else self.base


@dataclass
class _Constraints:
    required: dict[str, tuple[Kind, SourceSpan]] = field(default_factory=dict)
    dual_seen: set[str] = field(default_factory=set)
    restricted: set[str] = field(default_factory=set)

    def require(self, rid: _RawId, kind: Kind) -> None:
        prev = self.required.get(rid.base)
        if prev is not None and prev[0] is not kind:
            raise WellFormednessError(
                f"name {rid.base!r} used both as {prev[0].value} (at {prev[1]}) "
                f"and {kind.value} (at {rid.span})")
        self.required[rid.base] = (kind, rid.span)

    def note(self, rid: _RawId) -> None:
        if rid.dual:
            self.dual_seen.add(rid.base)

    def resolve(self, base: str) -> Kind:
        if base in self.required:
            return self.required[base][0]
        if base in self.dual_seen or base in self.restricted:
            return Kind.CHANNEL
        return Kind.VARIABLE


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.pos = 0
        self.cons = _Constraints()

    # -- token plumbing

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.typ != "eof":
            self.pos += 1
        return t

    def expect(self, typ: str, what: str | None = None) -> Token:
        t = self.peek()
        if t.typ != typ:
            raise ParseError(t.span, what or repr(typ), repr(t.text or "end of input"))
        return self.next()

    def at_ident(self, word: str) -> bool:
        t = self.peek()
        return t.typ == "ident" and t.text == word

    def expect_word(self, word: str) -> Token:
        t = self.peek()
        if not self.at_ident(word):
            raise ParseError(t.span, repr(word), repr(t.text or "end of input"))
        return self.next()

    # -- names and values

    def parse_name(self, kind: Kind | None = None) -> _RawId:
        dual = False
        if self.peek().typ == "~":
            self.next()
            dual = True
        t = self.expect("ident", "a name")
        if t.text in RESERVED:
            raise ParseError(t.span, "a name", f"reserved word {t.text!r}")
        rid = _RawId(t.text, dual, t.span)
        self.cons.note(rid)
        if kind is not None:
            self.cons.require(rid, kind)
        return rid

    def parse_value(self):
        t = self.peek()
        if t.typ == "int":
            self.next()
            return lit_int(int(t.text))
        if t.typ == "ident" and t.text in ("true", "false"):
            self.next()
            return lit_bool(t.text == "true")
        return self.parse_name()

    # -- types

    def parse_sort(self) -> Sort:
        t = self.expect("ident", "'int' or 'bool'")
        if t.text == "int":
            return Sort.INT
        if t.text == "bool":
            return Sort.BOOL
        raise ParseError(t.span, "'int' or 'bool'", repr(t.text))

    def parse_stype(self) -> SessionType:
        t = self.peek()
        if t.typ == "ident" and t.text == "end":
            self.next()
            return END
        if t.typ in ("!", "?"):
            self.next()
            sort = self.parse_sort()
            self.expect(".")
            cont = self.parse_stype()
            return Send(sort, cont) if t.typ == "!" else Recv(sort, cont)
        raise ParseError(t.span, "a session type", repr(t.text or "end of input"))

    def parse_htype(self) -> History:
        past: list[Action] = []
        while self.peek().typ in ("!", "?"):
            t = self.next()
            sort = self.parse_sort()
            self.expect(".")
            past.append(Action(t.typ == "!", sort))
        self.expect("^", "the cursor '^'")
        if self.peek().typ in ("!", "?") or self.at_ident("end"):
            future = self.parse_stype()
        else:
            future = END
        return History(tuple(past), future)

    # -- processes

    def parse_process(self) -> Process:
        t = self.peek()
        if t.typ == "int" and t.text == "0":
            self.next()
            return PNIL
        if self.at_ident("new"):
            self.next()
            self.expect("(")
            name = self.parse_name(Kind.CHANNEL)
            self.expect(")")
            self.expect(".")
            return ProcRes(self._id(name), self.parse_process())
        return self.parse_prefix()

    def parse_prefix(self) -> Process:
        subj = self.parse_name()
        t = self.peek()
        if t.typ == "(":  # session establishment
            self.cons.require(subj, Kind.CHANNEL)
            self.next()
            var = self.parse_name(Kind.VARIABLE)
            self.expect(":")
            stype = self.parse_stype()
            self.expect(")")
            self.expect(".")
            body = self.parse_process()
            ctor = Request if subj.dual else Accept
            return ctor(self._id(subj), self._id(var), stype, body)
        if t.typ == "!":
            self.next()
            self.expect("<")
            payload = self.parse_value()
            self.expect(">")
            self.expect(".")
            return Output(self._id(subj), self._val(payload), self.parse_process())
        if t.typ == "?":
            self.next()
            self.expect("(")
            var = self.parse_name(Kind.VARIABLE)
            self.expect(")")
            self.expect(".")
            return Input(self._id(subj), self._id(var), self.parse_process())
        raise ParseError(t.span, "a prefix ('(', '!<', or '?(')",
                         repr(t.text or "end of input"))

    # -- configurations

    def parse_config(self) -> Configuration:
        parts = [self.parse_atom()]
        while self.peek().typ == "|":
            self.next()
            parts.append(self.parse_atom())
        m = parts[0]
        for p in parts[1:]:
            m = Par(m, p)
        return m

    def parse_atom(self) -> Configuration:
        t = self.peek()
        if t.typ == "int" and t.text == "0":
            self.next()
            return CNIL
        if t.typ == "(":
            self.next()
            m = self.parse_config()
            self.expect(")")
            return m
        if self.at_ident("new"):
            self.next()
            self.expect("(")
            names = [self.parse_name()]
            while self.peek().typ == ",":
                self.next()
                names.append(self.parse_name())
            self.expect(")")
            self.expect(".")
            body = self.parse_config()
            return self._wrap_restrictions(names, body)
        if self.at_ident("proc"):
            return self.parse_runner()
        if self.at_ident("mon"):
            return self.parse_monitor()
        raise ParseError(t.span, "a configuration ('0', 'proc', 'mon', 'new', or '(')",
                         repr(t.text or "end of input"))

    def _wrap_restrictions(self, names: list[_RawId], body: Configuration) -> Configuration:
        # A (n, ~n) pair in one `new` restricts the session n; lone names keep
        # their inferred kind (channel when nothing else pins them down).
        bases = [n.base for n in names]
        out: list[_RawId] = []
        for rid in names:
            self.cons.restricted.add(rid.base)
            if bases.count(rid.base) > 1:
                self.cons.require(rid, Kind.SESSION)
            if rid.base not in [o.base for o in out]:
                out.append(_RawId(rid.base, False, rid.span))
        m = body
        for rid in reversed(out):
            m = ConfRes(self._id(rid), m)
        return m

    def parse_runner(self) -> Configuration:
        self.expect_word("proc")
        self.expect("[")
        endpoints: list[Identifier] = []
        if self.peek().typ != "]":
            endpoints.append(self._id(self.parse_name(Kind.SESSION)))
            while self.peek().typ == ",":
                self.next()
                endpoints.append(self._id(self.parse_name(Kind.SESSION)))
        self.expect("]")
        self.expect("{")
        proc = self.parse_process()
        self.expect("}")
        self.expect_word("store")
        self.expect("{")
        entries: dict[Identifier, tuple[Value, ...]] = {}
        if self.peek().typ != "}":
            while True:
                var = self._id(self.parse_name(Kind.VARIABLE))
                self.expect("=")
                self.expect("[")
                values = [self._val(self.parse_value())]
                while self.peek().typ == ",":
                    self.next()
                    values.append(self._val(self.parse_value()))
                self.expect("]")
                if var in entries:
                    raise WellFormednessError(f"duplicate store entry {var.base!r}")
                entries[var] = tuple(values)
                if self.peek().typ != ",":
                    break
                self.next()
        self.expect("}")
        return Running(tuple(endpoints), proc, Store(entries))

    def parse_monitor(self) -> Configuration:
        self.expect_word("mon")
        endpoint = self._id(self.parse_name(Kind.SESSION))
        self.expect("{")
        htype = self.parse_htype()
        self.expect(";")
        self.expect("[")
        vars_: list[Value] = []
        if self.peek().typ != "]":
            vars_.append(self._val(self.parse_value()))
            while self.peek().typ == ",":
                self.next()
                vars_.append(self._val(self.parse_value()))
        self.expect("]")
        self.expect(";")
        self.expect("[")
        names: list[Identifier] = []
        if self.peek().typ != "]":
            names.append(self._id(self.parse_name()))
            while self.peek().typ == ",":
                self.next()
                names.append(self._id(self.parse_name()))
        self.expect("]")
        self.expect("}")
        return Monitor(endpoint, htype, tuple(vars_), tuple(names))

    # -- provisional identifiers (kinds patched in a second pass)

    def _id(self, rid: _RawId) -> Identifier:
        kind = Kind.CHANNEL if rid.dual else Kind.VARIABLE
        return Identifier(kind, rid.base, rid.dual)

    def _val(self, v) -> Value:
        return self._id(v) if isinstance(v, _RawId) else v

    def finish(self, m: Configuration) -> Configuration:
        def fix(i: Identifier) -> Identifier:
            kind = self.cons.resolve(i.base)
            if kind is Kind.VARIABLE and i.dual:
                raise WellFormednessError(
                    f"variable {i.base!r} cannot be written with '~'")
            return Identifier(kind, i.base, i.dual)

        return map_identifiers(m, fix)


# ---------------------------------------------------------------------------
# Binder freshening


def _freshen(m: Configuration) -> tuple[Configuration, list[tuple[str, str]]]:
    """Rename clashing binders apart (Barendregt discipline), scope-aware."""
    frees = free_base_names(m)
    used = set(all_base_names(m)) | frees
    declared: set[str] = set()
    renamings: list[tuple[str, str]] = []

    def fresh(base: str) -> str:
        k = 1
        while f"{base}_{k}" in used:
            k += 1
        name = f"{base}_{k}"
        used.add(name)
        return name

    def visit_binder(b: Identifier, env: dict[str, str]) -> tuple[Identifier, dict[str, str]]:
        if b.base in declared or b.base in frees:
            new = fresh(b.base)
            renamings.append((b.base, new))
            declared.add(new)
            return Identifier(b.kind, new, b.dual), {**env, b.base: new}
        declared.add(b.base)
        return b, env

    def sub(i: Identifier, env: dict[str, str]) -> Identifier:
        new = env.get(i.base)
        return Identifier(i.kind, new, i.dual) if new else i

    def sub_value(v: Value, env: dict[str, str]) -> Value:
        return sub(v, env) if isinstance(v, Identifier) else v

    def walk_proc(p: Process, env: dict[str, str]) -> Process:
        if isinstance(p, ProcNil):
            return p
        if isinstance(p, (Accept, Request)):
            subj = sub(p.subject, env)
            var, env2 = visit_binder(p.var, env)
            return type(p)(subj, var, p.stype, walk_proc(p.body, env2))
        if isinstance(p, Output):
            return Output(sub(p.subject, env), sub_value(p.payload, env),
                          walk_proc(p.body, env))
        if isinstance(p, Input):
            subj = sub(p.subject, env)
            var, env2 = visit_binder(p.var, env)
            return Input(subj, var, walk_proc(p.body, env2))
        name, env2 = visit_binder(p.name, env)
        return ProcRes(name, walk_proc(p.body, env2))

    def walk(node: Configuration, env: dict[str, str]) -> Configuration:
        if isinstance(node, ConfNil):
            return node
        if isinstance(node, Running):
            entries = {sub(var, env): tuple(sub_value(v, env) for v in values)
                       for var, values in node.store.items()}
            return Running(tuple(sub(e, env) for e in node.endpoints),
                           walk_proc(node.proc, env), Store(entries))
        if isinstance(node, Monitor):
            return Monitor(sub(node.endpoint, env), node.htype,
                           tuple(sub_value(v, env) for v in node.vars),
                           tuple(sub(n, env) for n in node.names))
        if isinstance(node, ConfRes):
            name, env2 = visit_binder(node.name, env)
            return ConfRes(name, walk(node.body, env2))
        return Par(walk(node.left, env), walk(node.right, env))

    return walk(m, {}), renamings


@dataclass(frozen=True)
class ParseOutcome:
    config: Configuration
    renamings: tuple[tuple[str, str], ...]


def parse_with_renamings(text: str) -> ParseOutcome:
    p = _Parser(text)
    raw = p.parse_config()
    p.expect("eof", "end of input")
    resolved = p.finish(raw)
    freshened, renamings = _freshen(resolved)
    validate(freshened)
    return ParseOutcome(freshened, tuple(renamings))


def parse_config(text: str) -> Configuration:
    return parse_with_renamings(text).config


# ---------------------------------------------------------------------------
# Printing


def render_value(v: Value) -> str:
    if isinstance(v, Identifier):
        return v.spelled()
    if v.sort is Sort.BOOL:
        return "true" if v.value else "false"
    return str(v.value)


def render_stype(t: SessionType) -> str:
    parts: list[str] = []
    while not isinstance(t, End):
        parts.append(("!" if isinstance(t, Send) else "?") + t.sort.value + ".")
        t = t.cont
    return "".join(parts) + "end"


def render_htype(h: History) -> str:
    past = "".join(("!" if a.sending else "?") + a.sort.value + "." for a in h.past)
    return past + "^" + render_stype(h.future)


def render_process(p: Process) -> str:
    parts: list[str] = []
    while True:
        if isinstance(p, ProcNil):
            parts.append("0")
            return ". ".join(parts)
        if isinstance(p, (Accept, Request)):
            parts.append(f"{p.subject.spelled()}({p.var.spelled()}:{render_stype(p.stype)})")
        elif isinstance(p, Output):
            parts.append(f"{p.subject.spelled()}!<{render_value(p.payload)}>")
        elif isinstance(p, Input):
            parts.append(f"{p.subject.spelled()}?({p.var.spelled()})")
        elif isinstance(p, ProcRes):
            parts.append(f"new({p.name.spelled()})")
        else:
            raise TypeError(f"not a process: {p!r}")
        p = p.body


def render_store(store: Store) -> str:
    if not len(store):
        return "store{}"
    entries = ", ".join(
        f"{var.spelled()} = [{','.join(render_value(v) for v in values)}]"
        for var, values in store.items())
    return f"store{{ {entries} }}"


def render_running(r: Running) -> str:
    eps = ",".join(e.spelled() for e in r.endpoints)
    return f"proc[{eps}]{{ {render_process(r.proc)} }} {render_store(r.store)}"


def render_monitor(m: Monitor) -> str:
    vars_ = ",".join(render_value(v) for v in m.vars)
    names = ",".join(n.spelled() for n in m.names)
    return f"mon {m.endpoint.spelled()}{{ {render_htype(m.htype)} ; [{vars_}] ; [{names}] }}"


def render_component(c: Configuration) -> str:
    if isinstance(c, Running):
        return render_running(c)
    if isinstance(c, Monitor):
        return render_monitor(c)
    raise TypeError(f"not a flat component: {c!r}")


def render_restriction_names(names: tuple[Identifier, ...]) -> str:
    parts = []
    for n in names:
        if n.kind is Kind.SESSION:
            parts.append(f"{n.base},~{n.base}")
        else:
            parts.append(n.base)
    return ",".join(parts)


def render_config(m: Configuration) -> str:
    """Print any configuration tree; `parse_config` inverts it."""
    if isinstance(m, ConfNil):
        return "0"
    if isinstance(m, (Running, Monitor)):
        return render_component(m)
    if isinstance(m, ConfRes):
        body = render_config(m.body)
        if isinstance(m.body, Par):
            body = f"({body})"
        return f"new({render_restriction_names((m.name,))}). {body}"
    if isinstance(m, Par):
        parts: list[Configuration] = []
        stack = [m]
        while stack:
            node = stack.pop()
            if isinstance(node, Par):
                stack.append(node.right)
                stack.append(node.left)
            else:
                parts.append(node)
        rendered = []
        for part in parts:
            text = render_config(part)
            if isinstance(part, ConfRes):
                text = f"({text})"
            rendered.append(text)
        return " | ".join(rendered)
    raise TypeError(f"not a configuration: {m!r}")
