"""Reversible, unidirectional Turing machines on a finite two-track tape.

The tape alphabet is work symbol x witness bit.  Rules only ever rewrite the
work symbol; the witness bit is read-only.  Every state carries the direction
from which it is entered (``L``, ``R`` or ``N``) and the machine is stored as
a reduced map ``(state, symbol, bit) -> (next, written, move)``.

Symbols are single characters.  The sigma/gamma markers use upper/lower case:
``A R B X`` for sigma_A, sigma_R, sigma_B, sigma_X and ``a r b x`` for the
gamma versions.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

BITS = (0, 1)
MOVES = {"L": -1, "R": 1, "N": 0}

SIGMA = {"A": "A", "R": "R", "B": "B", "X": "X"}
GAMMA = {"A": "a", "R": "r", "B": "b", "X": "x"}


class TMError(Exception):
    pass


class UndefinedTransition(TMError):
    pass


class HeadOutOfBounds(TMError):
    pass


Key = tuple  # (state, symbol, bit)


@dataclass(frozen=True, eq=False)
class TuringMachine:
    name: str
    states: tuple[tuple[str, str], ...]      # (name, entry direction), ordered
    alphabet: tuple[str, ...]
    delta: Mapping[Key, tuple[str, str, str]]
    start: str
    final: str

    @property
    def dirs(self) -> dict[str, str]:
        return dict(self.states)

    @property
    def state_names(self) -> list[str]:
        return [q for q, _ in self.states]

    def rule(self, q: str, a: str, bit: int = 0):
        return self.delta.get((q, a, bit))

    def inverse(self) -> dict[Key, Key]:
        """(next, written, bit) -> (state, read, bit).  Later rules win on collisions."""
        return {(q2, b, bit): (q, a, bit) for (q, a, bit), (q2, b, _) in self.delta.items()}

    def with_rules(self, updates: Mapping[Key, tuple[str, str, str]], name: str | None = None):
        d = dict(self.delta)
        d.update(updates)
        return replace(self, delta=d, name=name or self.name)


@dataclass(frozen=True)
class TapeConfig:
    work: str
    witness: str
    head: int          # 1-based
    state: str

    def __post_init__(self):
        if len(self.work) != len(self.witness):
            raise ValueError("work and witness tracks differ in length")
        if not 1 <= self.head <= len(self.work):
            raise HeadOutOfBounds(f"head {self.head} outside 1..{len(self.work)}")

    @classmethod
    def blank(cls, work: str, state: str, witness: str | None = None, head: int = 1):
        return cls(work, witness if witness is not None else "0" * len(work), head, state)


@dataclass
class RunTrace:
    min_cell: int
    max_cell: int
    steps: list = field(default_factory=list)


@dataclass(frozen=True)
class ReversibilityReport:
    unidirectional: bool
    reduced_injective: bool
    normal_form: bool
    normal_form_exceptions: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.unidirectional and self.reduced_injective and self.normal_form

    def as_dict(self) -> dict:
        return {
            "unidirectional": self.unidirectional,
            "reduced_injective": self.reduced_injective,
            "normal_form": self.normal_form,
            "normal_form_exceptions": list(self.normal_form_exceptions),
        }


# -- construction helpers ---------------------------------------------------

def make_machine(name, states, alphabet, rules, start, final, *,
                 witness_rules=None, normal_form=True, totalize=True) -> TuringMachine:
    """Assemble a machine from witness-blind rules ``(q, a) -> (q2, b[, move])``.

    ``witness_rules`` may override single ``(q, a, bit)`` entries.  The
    normal-form loop ``final -> start`` is added for every symbol, then
    the table is made total while keeping it injective and unidirectional.
    """
    dirs = dict(states)
    delta: dict[Key, tuple[str, str, str]] = {}
    for (q, a), out in rules.items():
        q2, b = out[0], out[1]
        mv = out[2] if len(out) > 2 else dirs[q2]
        for bit in BITS:
            delta[(q, a, bit)] = (q2, b, mv)
    for (q, a, bit), out in (witness_rules or {}).items():
        q2, b = out[0], out[1]
        delta[(q, a, bit)] = (q2, b, out[2] if len(out) > 2 else dirs[q2])
    if normal_form:
        for a in alphabet:
            for bit in BITS:
                delta.setdefault((final, a, bit), (start, a, "N"))
    m = TuringMachine(name, tuple(states), tuple(alphabet), delta, start, final)
    return totalize_machine(m) if totalize else m


def totalize_machine(m: TuringMachine) -> TuringMachine:
    """Fill undefined inputs with unused outputs, both taken in
    (state index, symbol index) order, separately for each witness bit."""
    names = m.state_names
    dirs = m.dirs
    delta = dict(m.delta)
    for bit in BITS:
        used = {(q2, b) for (q, a, bb), (q2, b, _) in delta.items() if bb == bit}
        holes = [(q, a) for q in names for a in m.alphabet if (q, a, bit) not in delta]
        free = [(q, a) for q in names for a in m.alphabet if (q, a) not in used]
        if len(holes) != len(free):
            raise TMError(f"{m.name}: partial table is not injective; cannot totalize")
        for (q, a), (q2, b) in zip(holes, free):
            delta[(q, a, bit)] = (q2, b, dirs[q2])
    return replace(m, delta=delta)


def check_reversible(m: TuringMachine) -> ReversibilityReport:
    dirs = m.dirs
    uni = all(mv == dirs.get(q2) for (q2, _, mv) in m.delta.values())
    seen = set()
    inj = True
    for (q, a, bit), (q2, b, _) in m.delta.items():
        if (q2, b, bit) in seen:
            inj = False
            break
        seen.add((q2, b, bit))
    bad = []
    for a in m.alphabet:
        for bit in BITS:
            if m.delta.get((m.final, a, bit)) != (m.start, a, "N"):
                bad.append(a)
                break
    return ReversibilityReport(uni, inj, not bad, tuple(bad))


# -- stepping -----------------------------------------------------------------

def step(m: TuringMachine, c: TapeConfig) -> TapeConfig:
    i = c.head - 1
    a, bit = c.work[i], int(c.witness[i])
    out = m.delta.get((c.state, a, bit))
    if out is None:
        raise UndefinedTransition(f"{m.name}: no rule for ({c.state}, {a!r}, {bit})")
    q2, b, mv = out
    h = c.head + MOVES[mv]
    if not 1 <= h <= len(c.work):
        raise HeadOutOfBounds(f"{m.name}: head would leave 1..{len(c.work)} (to {h})")
    return TapeConfig(c.work[:i] + b + c.work[i + 1:], c.witness, h, q2)


def step_back(m: TuringMachine, c: TapeConfig, inv: Mapping[Key, Key] | None = None) -> TapeConfig:
    """Undo one step.  Unidirectionality pins where the head came from."""
    inv = m.inverse() if inv is None else inv
    h = c.head - MOVES[m.dirs[c.state]]
    if not 1 <= h <= len(c.work):
        raise HeadOutOfBounds(f"{m.name}: no predecessor inside the tape")
    i = h - 1
    src = inv.get((c.state, c.work[i], int(c.witness[i])))
    if src is None:
        raise UndefinedTransition(f"{m.name}: no predecessor for {c}")
    q, a, _ = src
    return TapeConfig(c.work[:i] + a + c.work[i + 1:], c.witness, h, q)


def run(m: TuringMachine, c: TapeConfig, t: int, *, record: bool = False):
    """Exactly ``t`` steps.  Returns the final configuration and a trace with
    head extremes (and per-step records when ``record`` is set)."""
    tr = RunTrace(c.head, c.head)
    for k in range(t):
        nxt = step(m, c)
        if record:
            tr.steps.append({"step": k + 1, "state": nxt.state, "head": nxt.head,
                             "written": nxt.work[c.head - 1]})
        c = nxt
        tr.min_cell = min(tr.min_cell, c.head)
        tr.max_cell = max(tr.max_cell, c.head)
    return c, tr


def run_back(m: TuringMachine, c: TapeConfig, t: int) -> TapeConfig:
    inv = m.inverse()
    for _ in range(t):
        c = step_back(m, c, inv)
    return c


def run_until(m: TuringMachine, c: TapeConfig, state: str, budget: int = 100_000):
    """Step until ``state`` is entered; returns (config, steps)."""
    for k in range(1, budget + 1):
        c = step(m, c)
        if c.state == state:
            return c, k
    raise TMError(f"{m.name}: state {state} not reached within {budget} steps")


# -- the concrete machines --------------------------------------------------

def build_mbc() -> TuringMachine:
    """Binary counter: increments a reversed binary string in place."""
    states = [("q0", "N"), ("q1", "R"), ("q2", "R"), ("q3", "R"),
              ("q4", "L"), ("q5", "L"), ("qf", "N")]
    rules = {
        ("q0", "0"): ("qf", "1", "N"), ("q0", "1"): ("q1", "#", "R"),
        ("q1", "0"): ("q2", "#", "R"), ("q1", "1"): ("q1", "0", "R"), ("q1", "#"): ("q3", "#", "R"),
        ("q2", "0"): ("q4", "0", "L"), ("q2", "1"): ("q4", "1", "L"),
        ("q3", "#"): ("q4", "#", "L"),
        ("q4", "#"): ("q5", "1", "L"),
        ("q5", "0"): ("q5", "0", "L"), ("q5", "#"): ("qf", "0", "N"),
    }
    return make_machine("M_BC", states, ("0", "1", "#"), rules, "q0", "qf")


POST_ALPHABET = ("0", "1", "#", "a", "r", "b", "x", "A", "R", "B", "X")


def build_mpost(alphabet: Iterable[str] = POST_ALPHABET) -> TuringMachine:
    """Turns gamma_{A,R,B} gamma_X^T into sigma_{A,R,B} sigma_X^T, the
    leading sigma letter being written on the very last step."""
    alphabet = tuple(alphabet)
    states = [("s0", "N"), ("sR", "R"), ("sL", "L"), ("sf", "N")]
    lead = {"a": "A", "r": "R", "b": "B"}
    sig = set("ARBX")
    rules = {}
    for g in lead:
        rules[("s0", g)] = ("sR", g, "R")
        rules[("sR", g)] = ("sL", g, "L")
        rules[("sL", g)] = ("sf", lead[g], "N")
    rules[("s0", "x")] = ("sf", "x", "N")
    rules[("sR", "x")] = ("sR", "X", "R")
    rules[("sL", "X")] = ("sL", "X", "L")
    for s in alphabet:
        if s in lead or s == "x":
            continue
        if s not in sig:
            rules[("s0", s)] = ("sf", s, "N")
        if s != "X":
            rules[("sR", s)] = ("sL", s, "L")
    return make_machine("M_post", states, alphabet, rules, "s0", "sf")


# -- transformations ----------------------------------------------------------

def dovetail(m1: TuringMachine, m2: TuringMachine, name: str | None = None) -> TuringMachine:
    if set(m1.alphabet) != set(m2.alphabet):
        raise TMError("dovetail needs identical work alphabets")
    clash = set(m1.state_names) & set(m2.state_names)
    if clash:
        raise TMError(f"dovetail needs disjoint state sets; shared: {sorted(clash)}")
    delta = {}
    for (q, a, bit), out in m1.delta.items():
        delta[(q, a, bit)] = (m2.start, a, "N") if q == m1.final else out
    for (q, a, bit), out in m2.delta.items():
        delta[(q, a, bit)] = (m1.start, a, "N") if q == m2.final else out
    return TuringMachine(name or f"{m1.name}+{m2.name}", m1.states + m2.states,
                         m1.alphabet, delta, m1.start, m2.final)


def add_symbols(m: TuringMachine, a: str) -> TuringMachine:
    if a in m.alphabet:
        raise TMError(f"symbol {a!r} already in the alphabet")
    dirs = m.dirs
    delta = dict(m.delta)
    for q in m.state_names:
        if q == m.start:
            out = (m.final, a, dirs[m.final])
        elif q == m.final:
            out = (m.start, a, dirs[m.start])
        else:
            out = (q, a, dirs[q])
        for bit in BITS:
            delta[(q, a, bit)] = out
    return replace(m, alphabet=m.alphabet + (a,), delta=delta)


def extend_alphabet(m: TuringMachine, symbols: Iterable[str]) -> TuringMachine:
    for a in symbols:
        if a not in m.alphabet:
            m = add_symbols(m, a)
    return m


def add_states(m: TuringMachine, q_new: str) -> TuringMachine:
    if q_new in m.dirs:
        raise TMError(f"state {q_new!r} already exists")
    delta = dict(m.delta)
    for a in m.alphabet:
        for bit in BITS:
            delta[(q_new, a, bit)] = (q_new, a, "N")
    return replace(m, states=m.states + ((q_new, "N"),), delta=delta)


def transform_timewaste(m: TuringMachine, trigger_symbols: Iterable[str],
                        q_star: str = "q*") -> TuringMachine:
    """Once the final state sits on a trigger symbol, sweep right forever
    (until another trigger) without touching the tape."""
    trig = tuple(trigger_symbols)
    missing = [s for s in trig if s not in m.alphabet]
    if missing:
        raise TMError(f"trigger symbols missing from alphabet: {missing}")
    if q_star in m.dirs:
        raise TMError(f"state {q_star!r} already exists")
    delta = dict(m.delta)
    for bit in BITS:
        for s in trig:
            delta[(m.final, s, bit)] = (q_star, s, "R")
            delta[(q_star, s, bit)] = (m.start, s, "N")
        for b in m.alphabet:
            if b not in trig:
                delta[(q_star, b, bit)] = (q_star, b, "R")
    return replace(m, name=f"T({m.name})", states=m.states + ((q_star, "R"),), delta=delta)


def rename_states(m: TuringMachine, suffix: str) -> TuringMachine:
    f = lambda q: q + suffix  # noqa: E731
    delta = {(f(q), a, bit): (f(q2), b, mv) for (q, a, bit), (q2, b, mv) in m.delta.items()}
    return TuringMachine(m.name + suffix, tuple((f(q), d) for q, d in m.states),
                         m.alphabet, delta, f(m.start), f(m.final))


# -- binary counter bookkeeping -------------------------------------------

def leading_ones(x: str) -> int:
    return len(x) - len(x.lstrip("1"))


def reversed_value(x: str) -> int:
    """Value of x read with its first character as the least significant bit."""
    return int(x[::-1], 2)


def n_of_x_closed_form(x: str) -> int:
    n = reversed_value(x)
    return 5 * n - 2 * x.count("1") - 4 * (n % 2)


@dataclass(frozen=True)
class NofX:
    x: str
    value: int             # operational: steps + 2
    closed_form: int
    head_min: int
    head_max: int

    @property
    def delta(self) -> int:
        return self.closed_form - self.value


def n_of_x(x: str, budget: int = 10_000_000, m: TuringMachine | None = None) -> NofX:
    """Operational reduction: the first time M_BC, started on "1" followed by
    blanks, sits in q_f at cell 1 with x on the tape, plus 2."""
    if len(x) < 2 or x[-1] != "1" or set(x) - {"0", "1"}:
        raise ValueError("x must be a binary string of length >= 2 ending in 1")
    m = m or build_mbc()
    L = len(x) + 3
    target = x + "#" * (L - len(x))
    c = TapeConfig.blank("1" + "#" * (L - 1), m.start)
    lo = hi = 1
    for t in range(1, budget + 1):
        c = step(m, c)
        lo, hi = min(lo, c.head), max(hi, c.head)
        if c.state == m.final and c.head == 1 and c.work == target:
            return NofX(x, t + 2, n_of_x_closed_form(x), lo, hi)
    raise TMError(f"x={x} not produced within {budget} steps")


def string_after(steps: int, length: int, m: TuringMachine | None = None) -> TapeConfig:
    """Configuration after ``steps`` steps of M_BC from the counter's start."""
    m = m or build_mbc()
    c = TapeConfig.blank("1" + "#" * (length - 1), m.start)
    return run(m, c, steps)[0]


# -- JSON ---------------------------------------------------------------------

def machine_to_json(m: TuringMachine) -> dict:
    rules = []
    for (q, a, bit), (q2, b, mv) in sorted(m.delta.items()):
        rules.append({"state": q, "read": a, "witness": bit, "write": b, "next": q2, "move": mv})
    return {
        "name": m.name,
        "states": [{"name": q, "dir": d} for q, d in m.states],
        "alphabet": list(m.alphabet),
        "rules": rules,
        "start": m.start,
        "final": m.final,
    }


def machine_from_json(data: dict | str) -> TuringMachine:
    if isinstance(data, str):
        data = json.loads(data)
    states = [(s["name"], s["dir"]) for s in data["states"]]
    dirs = dict(states)
    rules, wrules = {}, {}
    for r in data["rules"]:
        out = (r["next"], r["write"], r.get("move", dirs[r["next"]]))
        if "witness" in r:
            wrules[(r["state"], r["read"], int(r["witness"]))] = out
        else:
            rules[(r["state"], r["read"])] = out
    return make_machine(data.get("name", "machine"), states, data["alphabet"], rules,
                        data["start"], data["final"], witness_rules=wrules,
                        normal_form=data.get("normal_form", True),
                        totalize=data.get("totalize", True))
