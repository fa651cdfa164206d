"""Three-track circular clock.

Cells are numbered 1..n with n = N - 2; the brackets at both ends are
implicit.  ASCII encoding:

* track 1: ``=`` filled, ``_`` blank, ``R1``..``R8`` / ``L1``..``L8`` pointers
* track 2: ``=`` ``_`` ``>`` ``<``
* track 3: ``=`` ``_`` ``>`` ``<`` ``X`` (dead)

Transition rules live in a table (:data:`RULES`) that a single interpreter
applies; every rule has a unique id and the label used for it in the
construction's own numbering (which reuses some labels).
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum

PTR_RE = re.compile(r"^[RL][1-8]$")
T2_RE = re.compile(r"^=*[<>]_*$")
T3_RE = re.compile(r"^=*[<>]_*X*$")


class Step(Enum):
    NONE = "none"
    ILLEGAL = "illegal"


class ClockError(ValueError):
    pass


def p_of(N: int) -> int:
    if N < 4:
        raise ValueError("N must be >= 4")
    return 4 * (N - 2) * (2 * N - 3)


def segment_lengths(N: int) -> list[int]:
    n = N - 2
    long, short = n * (2 * N - 5), 2 * n
    return [long, short] * 4


@dataclass(frozen=True)
class ClockConfig:
    t1: tuple[str, ...]
    t2: str
    t3: str

    @property
    def n(self) -> int:
        return len(self.t1)

    @property
    def pos(self) -> int:
        """0-based index of the track-1 pointer."""
        for i, s in enumerate(self.t1):
            if len(s) == 2:
                return i
        raise ClockError("no track-1 pointer")

    @property
    def pointer(self) -> str:
        return self.t1[self.pos]

    @property
    def label(self) -> int:
        return int(self.pointer[1])

    @property
    def timer(self) -> int:
        return sum(ch in "=_" for ch in self.t3)

    def __str__(self) -> str:
        return f"{' '.join(self.t1)} | {' '.join(self.t2)} | {' '.join(self.t3)}"

    @classmethod
    def parse(cls, s: str) -> "ClockConfig":
        a, b, c = (part.split() for part in s.split("|"))
        return cls(tuple(a), "".join(b), "".join(c))


def is_well_formed(c: ClockConfig) -> bool:
    if not (len(c.t1) == len(c.t2) == len(c.t3)) or c.n < 2:
        return False
    ptrs = [i for i, s in enumerate(c.t1) if PTR_RE.match(s)]
    if len(ptrs) != 1:
        return False
    p = ptrs[0]
    if any(s != "=" for s in c.t1[:p]) or any(s != "_" for s in c.t1[p + 1:]):
        return False
    return bool(T2_RE.match(c.t2) and T3_RE.match(c.t3))


def time0(N: int, T: int) -> ClockConfig:
    n = N - 2
    if not 0 <= T <= n - 1:
        raise ClockError(f"timer T={T} outside 0..{n - 1}")
    return ClockConfig(("R1",) + ("_",) * (n - 1), ">" + "_" * (n - 1),
                       ">" + "_" * T + "X" * (n - 1 - T))


# -- rule table ---------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    uid: str
    ref: str                       # external rule name, e.g. "TR-6"
    where: str                     # pair | left_end | right_end | cell
    t1_in: tuple[str, ...]
    t1_out: tuple[str, ...] | None
    t2_in: object = None           # per-cell guards, or a frozenset of allowed strings
    t2_out: str | None = None      # "." keeps a cell
    t3_in: object = None
    t3_out: str | None = None
    action: str | None = None      # computation-track action triggered by this move

    @property
    def width(self) -> int:
        return len(self.t1_in)


def _cell_ok(guard: str, ch: str) -> bool:
    if guard == "*":
        return True
    if guard.startswith("!"):
        return ch not in guard[1:]
    return ch in guard


def _guard_ok(guard, window: str) -> bool:
    if guard is None:
        return True
    if isinstance(guard, frozenset):
        return window in guard
    return all(_cell_ok(g, ch) for g, ch in zip(guard, window))


def _rewrite(window: str, out: str | None) -> str:
    if out is None:
        return window
    return "".join(w if o == "." else o for w, o in zip(window, out))


def _pair(uid, ref, t1_in, t1_out, t2=None, t2o=None, t3=None, t3o=None, action=None):
    return Rule(uid, ref, "pair", t1_in, t1_out, t2, t2o, t3, t3o, action)


def _end(side, uid, ref, a, b, t2=None, t2o=None, t3=None, t3o=None):
    return Rule(uid, ref, side, (a,), (b,), t2, t2o, t3, t3o)


def _sweep_rules(i: int, nxt: str, names: list[str], left_action, right_action, uid0: int):
    """Rules shared by 1/5 pointers (i odd, left-to-right family)."""
    P, Q = f"R{i}", f"L{i}"
    u = lambda k: f"c{uid0 + k:02d}"  # noqa: E731
    return [
        _pair(u(0), names[0], ("=", Q), (Q, "_"), ("!>", "!>"), action=left_action),
        _pair(u(1), names[1], ("=", Q), (Q, "_"), (">", "_"), "=>", action=left_action),
        _pair(u(2), names[2], (P, "_"), ("=", P), ("!<", "*"), action=right_action),
        _end("right_end", u(3), names[3], P, Q, ("!><",)),
        _end("left_end", u(4), names[4], Q, P),
        _end("right_end", u(5), names[5], P, nxt, (">",), "<"),
    ]


def _shuttle_rules(i: int, nxt: str, names, left_action, right_action, uid0: int):
    """Rules shared by 2/6 pointers (single round trip from the right end)."""
    P, Q = f"R{i}", f"L{i}"
    u = lambda k: f"c{uid0 + k:02d}"  # noqa: E731
    return [
        _pair(u(0), names[0], ("=", Q), (Q, "_"), action=left_action),
        _end("left_end", u(1), names[1], Q, P),
        _pair(u(2), names[2], (P, "_"), ("=", P), action=right_action),
        _end("right_end", u(3), names[3], P, nxt, ("<",)),
    ]


def _back_sweep_rules(i: int, nxt: str, names, left_action, right_action, uid0: int):
    """Rules shared by 3/7 pointers (right-to-left family)."""
    P, Q = f"R{i}", f"L{i}"
    u = lambda k: f"c{uid0 + k:02d}"  # noqa: E731
    return [
        _pair(u(0), names[0], (P, "_"), ("=", P), ("!<", "!<"), action=right_action),
        _pair(u(1), names[1], (P, "_"), ("=", P), ("=", "<"), "<_", action=right_action),
        _pair(u(2), names[2], ("=", Q), (Q, "_"), ("*", "!>"), action=left_action),
        _end("left_end", u(3), names[3], Q, P, ("!><",)),
        _end("right_end", u(4), names[4], P, Q),
        _end("left_end", u(5), names[5], Q, nxt, ("<",), ">"),
    ]


def _build_rules() -> list[Rule]:
    r: list[Rule] = []
    r += _sweep_rules(1, "L2", [f"TR-{k}" for k in range(1, 7)], "BC", None, 1)
    r += _shuttle_rules(2, "L3", ["TR-7", "TR-8", "TR-9", "TR-10"], "BC", None, 7)
    r += _back_sweep_rules(3, "R4", [f"TR-{k}" for k in range(11, 17)], "check", None, 11)
    r += [
        _pair("c17", "TR-17", ("R4", "_"), ("=", "R4")),
        _end("right_end", "c18", "TR-18", "R4", "L4"),
        _pair("c19", "TR-19", ("=", "L4"), ("L4", "_")),
        _end("left_end", "c20", "TR-20", "L4", "R5", (">",)),
    ]
    r += _sweep_rules(5, "L6", [f"TR-{k} (5-pointer)" for k in range(21, 26)] + ["TR-26"],
                      None, "check_inv", 21)
    r += _shuttle_rules(6, "L7", ["TR-21 (6-pointer)", "TR-22 (6-pointer)",
                                  "TR-23 (6-pointer)", "TR-27"], None, "BC_inv", 27)
    r += _back_sweep_rules(7, "R8", [f"TR-{k}" for k in range(31, 37)], None, "BC_inv", 31)
    r += [
        _pair("c37", "TR-37", ("=", "L8"), ("L8", "_"), t3=(">", "_"), t3o="=>"),
        _pair("c38", "TR-38", ("R8", "_"), ("=", "R8"), t3=("=", "<"), t3o="<_"),
        _pair("c39", "TR-39", ("R8", "_"), ("=", "R8"), t3=(">", "X"), t3o="<X"),
        _end("right_end", "c40", "TR-40", "R8", "L8", t3=(">",), t3o="<"),
        _end("left_end", "c41", "TR-41", "L8", "R1", (">",), None, ("<",), ">"),
        _pair("c42", "TR-42", ("R8", "_"), ("=", "R8"),
              t3=frozenset({"_X", "__", "==", ">_", "=>", "XX"})),
        _pair("c43", "TR-43", ("=", "L8"), ("L8", "_"), t3=("!>", "!>")),
        _end("right_end", "c44", "TR-44", "R8", "L8", t3=("_",)),
        _end("right_end", "c45", "TR-45", "R8", "L8", t3=("X",)),
        _end("left_end", "c46", "TR-46", "L8", "R1", (">",), None, ("=",)),
    ]
    return r


def _build_illegal() -> list[Rule]:
    bad: list[Rule] = []
    for i in (1, 5):
        bad += [Rule(f"x-R{i}<", "h_cl 1", "cell", (f"R{i}",), None, ("<",)),
                Rule(f"x-L{i}>", "h_cl 1", "cell", (f"L{i}",), None, (">",))]
    for i in (2, 6):
        bad.append(Rule(f"x-R{i}]", "h_cl 2", "right_end", (f"R{i}",), None, ("!<",)))
    for i in (3, 7):
        bad += [Rule(f"x-L{i}>", "h_cl 3", "cell", (f"L{i}",), None, (">",)),
                Rule(f"x-R{i}<", "h_cl 3", "cell", (f"R{i}",), None, ("<",))]
    bad.append(Rule("x-[L4", "h_cl 4", "left_end", ("L4",), None, ("!>",)))
    bad += [
        Rule("x-L8/>", "h_cl 5", "cell", ("L8",), None, None, None, (">",)),
        Rule("x-R8/<", "h_cl 5", "cell", ("R8",), None, None, None, ("<",)),
        Rule("x-[L8", "h_cl 5", "left_end", ("L8",), None, ("!>",)),
        Rule("x-=L8/>X", "h_cl 6", "pair", ("=", "L8"), None, None, None, (">", "X")),
    ]
    return bad


RULES: list[Rule] = _build_rules()
ILLEGAL: list[Rule] = _build_illegal()
RULES_BY_ID = {r.uid: r for r in RULES}


def _index(rules):
    idx: dict[str, list[Rule]] = {}
    for r in rules:
        ptr = next(s for s in r.t1_in if len(s) == 2)
        idx.setdefault(ptr, []).append(r)
    return idx


_RULE_IDX = _index(RULES)
_ILLEGAL_IDX = _index(ILLEGAL)


def _windows(c: ClockConfig, rule: Rule, p: int):
    """Start indices where ``rule`` could sit given the pointer at index p."""
    if rule.where == "cell":
        return [p]
    if rule.where == "left_end":
        return [0] if p == 0 else []
    if rule.where == "right_end":
        return [p] if p == c.n - 1 else []
    k = rule.t1_in.index(c.t1[p])
    s = p - k
    return [s] if 0 <= s and s + 1 < c.n else []


def _matches(c: ClockConfig, rule: Rule, s: int) -> bool:
    w = rule.width
    return (c.t1[s:s + w] == rule.t1_in
            and _guard_ok(rule.t2_in, c.t2[s:s + w])
            and _guard_ok(rule.t3_in, c.t3[s:s + w]))


def illegal_patterns(c: ClockConfig) -> list[str]:
    p = c.pos
    return [r.uid for r in _ILLEGAL_IDX.get(c.t1[p], ())
            for s in _windows(c, r, p) if _matches(c, r, s)]


def matching_rules(c: ClockConfig) -> list[tuple[Rule, int]]:
    p = c.pos
    return [(r, s) for r in _RULE_IDX.get(c.t1[p], ())
            for s in _windows(c, r, p) if _matches(c, r, s)]


def apply_rule(c: ClockConfig, rule: Rule, s: int) -> ClockConfig:
    w = rule.width
    t1 = c.t1[:s] + rule.t1_out + c.t1[s + w:]
    t2 = c.t2[:s] + _rewrite(c.t2[s:s + w], rule.t2_out) + c.t2[s + w:]
    t3 = c.t3[:s] + _rewrite(c.t3[s:s + w], rule.t3_out) + c.t3[s + w:]
    return ClockConfig(t1, t2, t3)


def step_with_rule(c: ClockConfig):
    """(successor, rule, window start), or a :class:`Step` marker."""
    if not is_well_formed(c):
        raise ClockError(f"malformed clock configuration: {c}")
    if illegal_patterns(c):
        return Step.ILLEGAL
    hits = matching_rules(c)
    if not hits:
        return Step.NONE
    if len(hits) > 1:
        raise ClockError(f"non-deterministic: {[h[0].uid for h in hits]} match {c}")
    rule, s = hits[0]
    return apply_rule(c, rule, s), rule, s


def step_forward(c: ClockConfig):
    out = step_with_rule(c)
    return out if isinstance(out, Step) else out[0]


# -- classification -----------------------------------------------------------

def correct_tracks12(c: ClockConfig) -> bool:
    i, ptr, p = c.label, c.pointer, c.pos
    t2 = c.t2
    t2p = next(k for k, ch in enumerate(t2) if ch in "<>")
    if i in (4, 8) and not (t2[0] == ">" and t2p == 0):
        return False
    if i in (2, 6) and t2[-1] != "<":
        return False
    if i in (1, 5) and t2[t2p] != ">":
        return False
    if i in (3, 7) and t2[t2p] != "<":
        return False
    if i in (1, 3, 5, 7) and p == t2p:
        if (ptr[0] == "R" and t2[p] == "<") or (ptr[0] == "L" and t2[p] == ">"):
            return False
    return True


def classify(c: ClockConfig) -> str:
    if not is_well_formed(c):
        return "not-well-formed"
    if not correct_tracks12(c):
        return "incorrect"
    p, ptr, t3 = c.pos, c.pointer, c.t3
    q = next(k for k, ch in enumerate(t3) if ch in "<>")
    eight = c.label == 8
    if eight and p == q and ((ptr[0] == "R" and t3[q] == "<") or (ptr[0] == "L" and t3[q] == ">")):
        return "incorrect"
    if t3[q] == "<" and q == 0 and not eight:
        return "incorrect"
    if t3[q] == ">" and q + 1 < c.n and t3[q + 1] == "X" and eight and t3[p] == "X":
        return "incorrect"
    return "correct"


# -- enumeration and graph --------------------------------------------------

POINTERS = tuple(f"{d}{i}" for i in range(1, 9) for d in "RL")


def _track_strings(n: int, T: int | None = None, dead: bool = False):
    if not dead:
        for k in range(n):
            for a in "><":
                yield "=" * k + a + "_" * (n - k - 1)
        return
    live = T + 1
    for k in range(live):
        for a in "><":
            yield "=" * k + a + "_" * (live - k - 1) + "X" * (n - live)


def enumerate_well_formed(N: int, T: int):
    n = N - 2
    if not 0 <= T <= n - 1:
        raise ClockError(f"timer T={T} outside 0..{n - 1}")
    t3s = list(_track_strings(n, T, dead=True))
    t2s = list(_track_strings(n))
    for ptr in POINTERS:
        for k in range(n):
            t1 = ("=",) * k + (ptr,) + ("_",) * (n - k - 1)
            for t2 in t2s:
                for t3 in t3s:
                    yield ClockConfig(t1, t2, t3)


def well_formed_count(N: int, T: int) -> int:
    n = N - 2
    return 16 * n * 2 * n * 2 * (T + 1)


@dataclass
class ConfigGraph:
    N: int
    T: int
    nodes: list[ClockConfig]
    succ: dict[ClockConfig, ClockConfig]
    terminal: dict[ClockConfig, Step] = field(default_factory=dict)
    via: dict[ClockConfig, str] = field(default_factory=dict)

    def pred(self) -> dict[ClockConfig, ClockConfig]:
        return {b: a for a, b in self.succ.items()}

    def to_json(self) -> dict:
        return {
            "N": self.N, "T": self.T,
            "nodes": [str(c) for c in self.nodes],
            "edges": [{"from": str(a), "to": str(b), "rule": self.via[a]} for a, b in self.succ.items()],
            "terminal": {str(c): s.value for c, s in self.terminal.items()},
        }

    def to_dot(self) -> str:
        lines = ["digraph clock {"]
        for a, b in self.succ.items():
            lines.append(f'  "{a}" -> "{b}" [label="{self.via[a]}"];')
        for c, s in self.terminal.items():
            if s is Step.ILLEGAL:
                lines.append(f'  "{c}" [color=red];')
        lines.append("}")
        return "\n".join(lines)


def build_graph(N: int, T: int, budget_N: int = 9) -> tuple[ConfigGraph, dict]:
    if N > budget_N:
        raise ClockError(f"N={N} over enumeration budget {budget_N} "
                         f"({well_formed_count(N, T)} configurations for T={T})")
    nodes = list(enumerate_well_formed(N, T))
    g = ConfigGraph(N, T, nodes, {})
    for c in nodes:
        out = step_with_rule(c)
        if isinstance(out, Step):
            g.terminal[c] = out
        else:
            g.succ[c], g.via[c] = out[0], out[1].uid
    return g, structure_report(g)


def structure_report(g: ConfigGraph) -> dict:
    N, T = g.N, g.T
    p = p_of(N)
    node_set = set(g.nodes)
    kind = {c: classify(c) for c in g.nodes}
    closed = all(b in node_set for b in g.succ.values())
    timer_kept = all(b.timer == a.timer for a, b in g.succ.items())

    indeg: dict[ClockConfig, int] = {}
    for b in g.succ.values():
        indeg[b] = indeg.get(b, 0) + 1
    max_in = max(indeg.values(), default=0)

    correct = [c for c in g.nodes if kind[c] == "correct"]
    expected = (2 * T + 1) * p

    # walk the cycle from Time 0
    start = time0(N, T)
    seen, c, cycle_ok = [], start, True
    for _ in range(expected):
        if kind.get(c) != "correct" or c not in g.succ:
            cycle_ok = False
            break
        seen.append(c)
        c = g.succ[c]
    cycle_ok = cycle_ok and c == start and len(set(seen)) == expected
    one_cycle = cycle_ok and set(seen) == set(correct)

    # repeats of each tracks-1/2 configuration along the cycle
    spacing_ok = False
    if cycle_ok:
        spacing_ok = all(
            (seen[t].t1, seen[t].t2) == (seen[(t + p) % expected].t1, seen[(t + p) % expected].t2)
            for t in range(expected)
        ) and len({(x.t1, x.t2) for x in seen}) == p

    # incorrect components: follow each path from its source
    incorrect = {c for c in g.nodes if kind[c] == "incorrect"}
    pred = g.pred()
    longest, bad_end, mixed, covered = 0, 0, 0, set()
    for c in incorrect:
        if c in pred:
            continue
        path = [c]
        while path[-1] in g.succ:
            path.append(g.succ[path[-1]])
            if len(path) > len(g.nodes):
                break
        covered.update(path)
        longest = max(longest, len(path))
        if g.terminal.get(path[-1]) is not Step.ILLEGAL:
            bad_end += 1
        if any(kind[x] != "incorrect" for x in path):
            mixed += 1
    incorrect_cycles = len(incorrect - covered)
    dead_ends = sum(1 for c in g.nodes if g.terminal.get(c) is Step.NONE)

    return {
        "N": N, "T": T, "p": p,
        "well_formed": len(g.nodes),
        "correct": len(correct),
        "expected_correct": expected,
        "cycle_length": len(seen) if cycle_ok else None,
        "single_cycle": one_cycle,
        "repeat_spacing_ok": spacing_ok,
        "incorrect": len(incorrect),
        "longest_incorrect_path": longest,
        "incorrect_paths_not_ending_illegal": bad_end,
        "incorrect_on_cycles": incorrect_cycles,
        "mixed_components": mixed,
        "terminal_none": dead_ends,
        "max_in_degree": max_in,
        "closed": closed,
        "timer_conserved": timer_kept,
        "ok": (one_cycle and len(correct) == expected and longest <= p and bad_end == 0
               and incorrect_cycles == 0 and mixed == 0 and max_in <= 1 and closed and timer_kept),
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


# -- walking the cycle ------------------------------------------------------

def segment_of(c: ClockConfig) -> int:
    return c.label


def walk(N: int, T: int, steps: int | None = None):
    """Yield (t, config, rule, window start) along the correct cycle from
    Time 0; the rule is the one taking config t to t+1."""
    c = time0(N, T)
    total = (2 * T + 1) * p_of(N) if steps is None else steps
    for t in range(total):
        out = step_with_rule(c)
        if isinstance(out, Step):
            raise ClockError(f"clock stopped ({out.value}) at t={t}: {c}")
        nxt, rule, s = out
        yield t, c, rule, s
        c = nxt
