"""Workbench for a reversible, monitor-based session calculus."""

from .congruence import CanonicalForm, canonicalize, decompose, equiv
from .errors import (
    NoFuture, NoPast, RsxError, StaleRedex, UnboundVariable, UnknownSession,
    WellFormednessError)
from .semantics import (
    Label, Redex, apply_redex, concurrent, enumerate_backward,
    enumerate_forward, redex_label, replay_keys)
from .store import Store
from .surface import ParseError, parse_config, render_config
from .syntax import (
    Configuration, History, Identifier, Process, SessionType, Sort,
    cursor_advance, cursor_rewind, dual_name, dual_type, is_initial, validate)
from .properties import (
    GenSpec, StateGraph, check_causal, check_loop, check_square, explore,
    generate_initial)

__all__ = [
    "CanonicalForm", "Configuration", "GenSpec", "History", "Identifier",
    "Label", "NoFuture", "NoPast", "ParseError", "Process", "Redex",
    "RsxError", "SessionType", "Sort", "StaleRedex", "StateGraph", "Store",
    "UnboundVariable", "UnknownSession", "WellFormednessError", "apply_redex",
    "canonicalize", "check_causal", "check_loop", "check_square", "concurrent",
    "cursor_advance", "cursor_rewind", "decompose", "dual_name", "dual_type",
    "enumerate_backward", "enumerate_forward", "equiv", "explore",
    "generate_initial", "is_initial", "parse_config", "redex_label",
    "render_config", "replay_keys", "validate",
]
