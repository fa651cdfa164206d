"""Block decomposition of the finite-chain Hamiltonian.

A block is fixed by the timer length T, the computation tracks at time 0
(``v``) and the witness ``w``.  Inside a block the propagation term is half
the Laplacian of a cycle of length (2T+1)p(N); everything else is a diagonal
penalty profile.  Profiles come from two independent routes:

* ``semantic``: walk the clock alone and feed the penalty terms the tape the
  computation is known to hold (machine simulation or the ideal output);
* ``track-walk``: carry the computation tracks along and apply the local
  TM-step rules on every pointer move that triggers one.
"""
from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import numpy as np

from . import clock as ck
from . import spectral as sp
from . import tm
from .precision import BigFixed, fx_compare, one_minus_cos_pi_over

INIT = "init"
SIGMA_OUT = frozenset("ARX")
HALF = Fraction(1, 2)
TOY_INSTANCES = ("toy-m0", "toy-m1", "toy-m2")


class BudgetExceeded(RuntimeError):
    pass


# -- oracle instances -----------------------------------------------------------

def _lookup(table: dict, keys, what: str):
    for k in keys:
        if k in table:
            return table[k]
    raise KeyError(f"no {what} entry for any of {list(keys)}")


@dataclass(frozen=True)
class OracleInstance:
    """Tabulated stand-in for the oracle machine M, language L and verifier V.

    Tables are keyed by strings; ``*`` is a wildcard for the input part.
    ``queries`` maps ``"x|prefix"`` to the next query string, ``witnesses``
    lists the accepting ``wlen``-bit certificates for each yes-query, and
    ``f`` maps ``"x|y"`` to the output value.
    """
    name: str
    m: dict
    queries: dict
    language: dict
    witnesses: dict
    wlen: int
    f: dict
    note: str = ""

    def m_of(self, x: str) -> int:
        return int(_lookup(self.m, (x, "*"), "m"))

    def query(self, x: str, prefix: str) -> str:
        keys = (f"{x}|{prefix}", f"*|{prefix}", f"{x}|*", "*|*")
        return _lookup(self.queries, keys, "query")

    def in_language(self, q: str) -> bool:
        return bool(self.language[q])

    def verify(self, q: str, u: str) -> bool:
        return u in self.witnesses.get(q, ())

    def f_of(self, x: str, y: str) -> int:
        return int(_lookup(self.f, (f"{x}|{y}", f"{x}|*", f"*|{y}", "*|*"), "f"))

    def queries_for(self, x: str, y: str) -> list[str]:
        return [self.query(x, y[:i]) for i in range(len(y))]

    def validate(self) -> None:
        for q, ok in self.language.items():
            ws = self.witnesses.get(q, [])
            if ok and not ws:
                raise ValueError(f"{self.name}: yes-query {q!r} has no accepting witness")
            if not ok and ws:
                raise ValueError(f"{self.name}: no-query {q!r} lists witnesses")
            if any(len(w) != self.wlen or set(w) - {"0", "1"} for w in ws):
                raise ValueError(f"{self.name}: witness for {q!r} is not {self.wlen} bits")

    def to_json(self) -> dict:
        return {"name": self.name, "m": self.m, "queries": self.queries,
                "language": self.language, "witnesses": self.witnesses,
                "wlen": self.wlen, "f": self.f, "note": self.note}

    @classmethod
    def from_json(cls, data) -> "OracleInstance":
        if isinstance(data, str):
            data = json.loads(data)
        inst = cls(data["name"], dict(data["m"]), dict(data.get("queries", {})),
                   dict(data.get("language", {})),
                   {k: list(v) for k, v in data.get("witnesses", {}).items()},
                   int(data.get("wlen", 0)), dict(data["f"]), data.get("note", ""))
        inst.validate()
        return inst

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def __hash__(self):
        return hash(self.digest())


def load_instance(name_or_path: str) -> OracleInstance:
    """A shipped toy instance by name (``toy-m1``), or a JSON file path."""
    stem = name_or_path[:-5] if name_or_path.endswith(".json") else name_or_path
    stem = stem.rsplit("/", 1)[-1]
    if stem in TOY_INSTANCES and "/" not in name_or_path:
        text = resources.files("tihsim.data").joinpath(f"{stem}.json").read_text()
        return OracleInstance.from_json(text)
    try:
        with open(name_or_path) as fh:
            return OracleInstance.from_json(fh.read())
    except FileNotFoundError:
        if stem in TOY_INSTANCES:
            return load_instance(stem)
        raise


def y_tilde(inst: OracleInstance, x: str) -> str:
    """Guess string answering every (adaptive) query truthfully."""
    y = ""
    for _ in range(inst.m_of(x)):
        y += "1" if inst.in_language(inst.query(x, y)) else "0"
    return y


def in_y_rej(inst: OracleInstance, x: str, y: str) -> bool:
    return any(b == "1" and not inst.in_language(q)
               for b, q in zip(y, inst.queries_for(x, y)))


def t_formula(m: int, f: int, y: str) -> int:
    if len(y) != m:
        raise ValueError(f"y has {len(y)} bits, expected m={m}")
    if not 0 <= f < 2 ** m:
        raise ValueError(f"f={f} does not fit below 2^m={2 ** m}")
    tally = 4 ** (m + 1) + sum(int(b) * 4 ** (m - j + 1) for j, b in enumerate(y, 1))
    return f + 2 ** m * tally


def t_of_xy(inst: OracleInstance, x: str, y: str) -> int:
    return t_formula(inst.m_of(x), inst.f_of(x, y), y)


# -- witness layout -------------------------------------------------------------

def split_witness(inst: OracleInstance, x: str, w: str) -> tuple[str, list[str]]:
    m = inst.m_of(x)
    need = m + m * inst.wlen
    if len(w) < need:
        raise ValueError(f"witness has {len(w)} bits, needs at least {need}")
    u = w[m:need]
    return w[:m], [u[i * inst.wlen:(i + 1) * inst.wlen] for i in range(m)]


def verifier_accepts(inst: OracleInstance, x: str, w: str) -> bool:
    y, us = split_witness(inst, x, w)
    return all(inst.verify(q, u) for b, q, u in zip(y, inst.queries_for(x, y), us) if b == "1")


def ideal_out(inst: OracleInstance, x: str, w: str, n: int) -> str:
    """Work tape after the forward computation, as the ideal machine leaves it:
    A/R, then T(x,y) copies of X, then blanks (clipped to n cells)."""
    y, _ = split_witness(inst, x, w)
    head = "A" if verifier_accepts(inst, x, w) else "R"
    body = head + "X" * t_of_xy(inst, x, y)
    return body[:n].ljust(n, "#")


# -- blocks -------------------------------------------------------------------

@dataclass(frozen=True)
class BlockSpec:
    N: int
    T: int
    w: str
    v: object = INIT          # "init" or a tm.TapeConfig for tracks 4-5

    def __post_init__(self):
        if not 0 <= self.T <= self.N - 3:
            raise ValueError(f"timer T={self.T} outside 0..{self.N - 3}")
        if len(self.w) != self.N - 4:
            raise ValueError(f"witness must have N-4={self.N - 4} bits")

    @property
    def n(self) -> int:
        return self.N - 2

    @property
    def is_init(self) -> bool:
        return isinstance(self.v, str) and self.v == INIT

    @property
    def cycle_length(self) -> int:
        return (2 * self.T + 1) * ck.p_of(self.N)


@lru_cache(maxsize=4096)
def _counter_tape(N: int) -> tm.TapeConfig:
    return tm.string_after(N - 2, N - 2)


def x_of_N(N: int) -> str:
    """Tape contents after N-2 steps of the binary counter (blanks stripped)."""
    return _counter_tape(N).work.rstrip("#")


def is_valid_N(N: int) -> bool:
    c = _counter_tape(N)
    return c.state == "qf" and c.head == 1


def classify_block(inst: OracleInstance, b: BlockSpec) -> str:
    if not b.is_init:
        return "S1"
    x = x_of_N(b.N)
    y, _ = split_witness(inst, x, b.w)
    if b.T != t_of_xy(inst, x, y):
        return "S2"
    if in_y_rej(inst, x, y):
        return "S3"
    return "S4"


def smallest_valid_N(inst: OracleInstance, start: int = 5, stop: int = 4000) -> int:
    """Least N = N(x) with T(x, y~) <= N - 3 and room for y and the certificates."""
    for N in range(start, stop):
        if not is_valid_N(N):
            continue
        x = x_of_N(N)
        m = inst.m_of(x)
        if N - 4 < m + m * inst.wlen:
            continue
        if t_of_xy(inst, x, y_tilde(inst, x)) <= N - 3:
            return N
    raise BudgetExceeded(f"no valid N below {stop}")


# -- computation tracks -----------------------------------------------------------

@dataclass
class Comp:
    """Tracks 4 (head/state), 5 (work) and 6 (witness) as per-cell lists."""
    t4: list
    t5: list
    t6: str

    def key(self) -> tuple:
        return (tuple(self.t4), tuple(self.t5))

    def copy(self) -> "Comp":
        return Comp(list(self.t4), list(self.t5), self.t6)

    @classmethod
    def from_tape(cls, c: tm.TapeConfig) -> "Comp":
        n = len(c.work)
        t4 = ["="] * (c.head - 1) + [c.state] + ["_"] * (n - c.head)
        return cls(t4, list(c.work), c.witness)

    def to_tape(self) -> tm.TapeConfig:
        heads = [i for i, s in enumerate(self.t4) if s not in ("=", "_")]
        if len(heads) != 1 or self.t4[heads[0]].endswith("'"):
            raise tm.TMError(f"track 4 is mid-step: {self.t4}")
        h = heads[0]
        return tm.TapeConfig("".join(self.t5), self.t6, h + 1, self.t4[h])


def witness_track(w: str, n: int) -> str:
    return w.ljust(n, "0")


def initial_comp(b: BlockSpec) -> Comp:
    n = b.n
    if b.is_init:
        c = tm.TapeConfig("1" + "#" * (n - 1), witness_track(b.w, n), 1, "q0")
    else:
        v: tm.TapeConfig = b.v
        c = tm.TapeConfig(v.work, witness_track(b.w, n), v.head, v.state)
    return Comp.from_tape(c)


# -- the concrete machines ----------------------------------------------------------

def build_toy_mtv() -> tm.TuringMachine:
    """Small reversible stand-in for the timer/verifier machine.

    Marks cell 1 with A (input starts with 1) or R, turns the following run of
    1s into X, and walks back to cell 1.
    """
    states = [("p0", "N"), ("p1", "R"), ("p2", "L"), ("pf", "N")]
    rules = {
        ("p0", "1"): ("p1", "A", "R"), ("p0", "0"): ("p1", "R", "R"),
        ("p1", "1"): ("p1", "X", "R"), ("p1", "#"): ("p2", "#", "L"),
        ("p2", "X"): ("p2", "X", "L"),
        ("p2", "A"): ("pf", "A", "N"), ("p2", "R"): ("pf", "R", "N"),
    }
    return tm.make_machine("M_TV(toy)", states, ("0", "1", "#", "A", "R", "X"), rules, "p0", "pf")


@dataclass(frozen=True)
class Machines:
    bc: tm.TuringMachine         # counter, widened to the shared state set and alphabet
    check: tm.TuringMachine      # time-waste transform of counter + M_TV

    @property
    def all(self):
        return {"BC": self.bc, "check": self.check}


@lru_cache(maxsize=1)
def toy_machines() -> Machines:
    tv = build_toy_mtv()
    bc = tm.extend_alphabet(tm.build_mbc(), ("A", "R", "X"))
    check = tm.transform_timewaste(tm.dovetail(bc, tv), ("A", "R"))
    wide = bc
    for q in tv.state_names + ["q*"]:
        wide = tm.add_states(wide, q)
    return Machines(wide, check)


def mutate(machines: Machines, which: str = "check", key=None) -> Machines:
    """Corrupt one rule so that it collides with another (breaks injectivity)."""
    m = machines.all[which]
    key = key or ("p1", "1", 0)
    q2, b, mv = m.delta[key]
    other = next(s for s in m.alphabet if s != b)
    bad = m.with_rules({key: (q2, other, mv)}, name=m.name + "*")
    return Machines(bad, machines.check) if which == "BC" else Machines(machines.bc, bad)


# -- local TM-step rules ---------------------------------------------------------

def _is_state(tok: str) -> bool:
    return tok not in ("=", "_")


def apply_step_pair(m: tm.TuringMachine, comp: Comp, j: int) -> None:
    """Forward step rule on cells (j, j+1); used when the pointer moves left."""
    a, b = comp.t4[j], comp.t4[j + 1]
    dirs = m.dirs
    if _is_state(a) and not a.endswith("'") and b == "_":
        out = m.delta.get((a, comp.t5[j], int(comp.t6[j])))
        if out is None:
            raise tm.UndefinedTransition(f"{m.name}: no rule for ({a}, {comp.t5[j]})")
        q2, sym, mv = out
        comp.t5[j] = sym
        if mv == "R":
            comp.t4[j], comp.t4[j + 1] = "=", q2
        elif mv == "N":
            comp.t4[j] = q2
        else:
            comp.t4[j] = q2 + "'"
        return
    if a == "=" and b.endswith("'"):
        comp.t4[j], comp.t4[j + 1] = b[:-1], "_"
        return
    if (a, b) in (("_", "_"), ("=", "=")):
        return
    if a == "=" and _is_state(b) and dirs.get(b) in ("L", "N"):
        return
    raise tm.TMError(f"{m.name}: forward rule undefined on ({a}, {b}) at cell {j + 1}")


def apply_inverse_pair(m: tm.TuringMachine, inv: dict, comp: Comp, j: int) -> None:
    """Inverse step rule on cells (j, j+1); used when the pointer moves right."""
    a, b = comp.t4[j], comp.t4[j + 1]
    dirs = m.dirs

    def undo(state: str, cell: int) -> str:
        src = inv.get((state, comp.t5[cell], int(comp.t6[cell])))
        if src is None:
            raise tm.UndefinedTransition(f"{m.name}: no predecessor for {state} on {comp.t5[cell]}")
        comp.t5[cell] = src[1]
        return src[0]

    if a == "=" and _is_state(b) and not b.endswith("'") and dirs.get(b) == "R":
        comp.t4[j], comp.t4[j + 1] = undo(b, j), "_"
        return
    if _is_state(a) and b == "_":
        if a.endswith("'"):
            comp.t4[j] = undo(a[:-1], j)
            return
        d = dirs.get(a)
        if d == "N":
            comp.t4[j] = undo(a, j)
            return
        if d == "L":
            comp.t4[j], comp.t4[j + 1] = "=", a + "'"
            return
    if (a, b) in (("_", "_"), ("=", "=")):
        return
    if a == "=" and _is_state(b) and dirs.get(b) in ("L", "N"):
        return
    raise tm.TMError(f"{m.name}: inverse rule undefined on ({a}, {b}) at cell {j + 1}")


def sweep_left(m: tm.TuringMachine, comp: Comp) -> Comp:
    """One right-to-left pointer sweep: pairs (n-1, n) down to (1, 2)."""
    comp = comp.copy()
    for j in range(len(comp.t4) - 2, -1, -1):
        apply_step_pair(m, comp, j)
    return comp


def sweep_right_inverse(m: tm.TuringMachine, comp: Comp) -> Comp:
    comp = comp.copy()
    inv = m.inverse()
    for j in range(len(comp.t4) - 1):
        apply_inverse_pair(m, inv, comp, j)
    return comp


# -- penalty terms -------------------------------------------------------------

def penalty_terms(c: ck.ClockConfig, comp: Comp | None) -> dict:
    """Nonzero h_init, h_length, h_V and h_final contributions at one clock step.

    ``comp`` may be None when the caller knows no computation-dependent
    term can fire (only h_final is then evaluated).
    """
    ptr, p = c.pointer, c.pos
    out: dict[str, Fraction] = {}

    def add(term, wt):
        if wt:
            out[term] = out.get(term, Fraction(0)) + wt

    if ptr in ("L4", "R5") and p == 0 and c.t2[0] == ">" and c.t3[0] == ">":
        add("final", HALF)
    if comp is None:
        return out
    if ptr == "L8":
        if p >= 1:
            add("init", int(comp.t5[p] != "#"))
        else:
            add("init", int(comp.t5[0] != "1"))
            add("init", int(comp.t5[0] == "1" and comp.t4[0] != "q0"))
    elif ptr == "L4":
        live = c.t3[p] != "X"
        sig = comp.t5[p] in SIGMA_OUT
        add("length", int(live and not sig) + int(not live and sig))
        if p == 0:
            add("V", int(comp.t5[0] == "R"))
    return out


def penalty_at(c: ck.ClockConfig, comp: Comp | None) -> Fraction:
    return sum(penalty_terms(c, comp).values(), Fraction(0))


@dataclass
class PenaltyProfile:
    length: int
    period: int
    hits: dict = field(default_factory=dict)     # t -> total weight
    terms: dict = field(default_factory=dict)    # t -> {term: weight}

    def record(self, t: int, contrib: dict) -> None:
        if contrib:
            self.terms[t] = contrib
            self.hits[t] = sum(contrib.values(), Fraction(0))

    def diagonal(self) -> np.ndarray:
        d = np.zeros(self.length)
        for t, wt in self.hits.items():
            d[t] = float(wt)
        return d

    def final_pair(self) -> list[int]:
        return sorted(t for t, d in self.terms.items() if "final" in d)

    def periodic_hit(self) -> bool:
        """At least one weight-1 hit in every repetition of length p."""
        reps = self.length // self.period
        seen = {t // self.period for t, d in self.terms.items()
                if any(k != "final" for k in d)}
        return len(seen) == reps

    def to_json(self) -> dict:
        return {"length": self.length, "period": self.period,
                "hits": {str(t): str(wt) for t, wt in sorted(self.hits.items())}}


def _forward_tapes(b: BlockSpec, machines: Machines) -> tm.TapeConfig:
    start = initial_comp(b).to_tape()
    mid, _ = tm.run(machines.bc, start, b.N - 2)
    out, _ = tm.run(machines.check, mid, b.N - 2)
    return out


def semantic_profile(b: BlockSpec, inst: OracleInstance | None = None,
                     machines: Machines | None = None) -> PenaltyProfile:
    """Clock-only walk; the tape during the 4- and 8-segments is supplied
    from machine simulation (``machines``) or the ideal output (``inst``)."""
    if (inst is None) == (machines is None):
        raise ValueError("give exactly one of inst or machines")
    v_comp = initial_comp(b)
    out_comp = None
    if b.is_init:
        if machines is not None:
            out_comp = Comp.from_tape(_forward_tapes(b, machines))
        else:
            work = ideal_out(inst, x_of_N(b.N), b.w, b.n)
            out_comp = Comp(["q0"] + ["_"] * (b.n - 1), list(work), v_comp.t6)
    prof = PenaltyProfile(b.cycle_length, ck.p_of(b.N))
    for t, c, _, _ in ck.walk(b.N, b.T):
        lab = c.label
        comp = out_comp if lab == 4 else v_comp if lab == 8 else None
        prof.record(t, penalty_terms(c, comp))
    return prof


@dataclass
class WalkResult:
    profile: PenaltyProfile
    comps: list            # computation-track keys at each t
    distinct: bool


def track_walk(b: BlockSpec, machines: Machines | None = None, budget: int = 200_000,
               record: bool = False) -> WalkResult:
    """Walk clock and computation tracks together for one full cycle."""
    machines = machines or toy_machines()
    if b.cycle_length > budget:
        raise BudgetExceeded(f"cycle length {b.cycle_length} exceeds budget {budget}")
    inv = {k: m.inverse() for k, m in machines.all.items()}
    comp = initial_comp(b)
    prof = PenaltyProfile(b.cycle_length, ck.p_of(b.N))
    keys, seen = [], set()
    distinct = True
    for t, c, rule, s in ck.walk(b.N, b.T):
        prof.record(t, penalty_terms(c, comp))
        k = comp.key()
        if record:
            keys.append(k)
        state = (c, k)
        if state in seen:
            distinct = False
        seen.add(state)
        act = rule.action
        if act in ("BC", "check"):
            apply_step_pair(machines.all[act], comp, s)
        elif act in ("BC_inv", "check_inv"):
            base = act[:-4]
            apply_inverse_pair(machines.all[base], inv[base], comp, s)
    if record:
        keys.append(comp.key())
    return WalkResult(prof, keys, distinct)


def penalty_profile(inst: OracleInstance | None, b: BlockSpec, mode: str = "semantic",
                    machines: Machines | None = None, budget: int = 200_000) -> PenaltyProfile:
    if mode == "semantic":
        return semantic_profile(b, None if machines else inst, machines)
    if mode == "track-walk":
        return track_walk(b, machines, budget).profile
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class CycleCheck:
    ok: bool
    N: int
    T: int
    first_mismatch: int | None = None
    distinct: bool = True
    error: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def track_walk_cycle_check(N: int, T: int, w: str | None = None,
                           machines: Machines | None = None, v=INIT) -> CycleCheck:
    """Do tracks 4-6 repeat with period p(N) along the whole cycle?"""
    w = "0" * (N - 4) if w is None else w
    b = BlockSpec(N, T, w, v)
    try:
        res = track_walk(b, machines, record=True)
    except tm.TMError as e:
        return CycleCheck(False, N, T, error=str(e))
    p = ck.p_of(N)
    keys = res.comps
    for t in range(len(keys) - p):
        if keys[t] != keys[t + p]:
            return CycleCheck(False, N, T, t, res.distinct)
    return CycleCheck(res.distinct, N, T, None, res.distinct)


# -- energies --------------------------------------------------------------------

def s4_energy(N: int, T: int, precision_bits: int = 64) -> BigFixed:
    return one_minus_cos_pi_over((2 * T + 1) * ck.p_of(N) + 1, precision_bits)


def periodic_bound(N: int, precision_bits: int = 64) -> BigFixed:
    return sp.periodic_lower_bound(1, ck.p_of(N), precision_bits)


@dataclass
class BlockEnergy:
    block: BlockSpec
    cls: str
    kind: str                 # "exact" | "bound"
    value: BigFixed
    numeric: float | None = None

    def to_json(self, digits: int = 20) -> dict:
        from .precision import fx_to_decimal
        x = x_of_N(self.block.N)
        return {"N": self.block.N, "T": self.block.T, "x": x, "w": self.block.w,
                "v": "init" if self.block.is_init else str(self.block.v),
                "class": self.cls, "kind": self.kind,
                "energy": fx_to_decimal(self.value, digits),
                "numeric": None if self.numeric is None else repr(self.numeric)}


def block_ground_energy(inst: OracleInstance, b: BlockSpec, precision_bits: int = 64,
                        numeric: bool = False, budget: int = sp.DENSE_BUDGET) -> BlockEnergy:
    cls = classify_block(inst, b)
    accepted = cls == "S4" and verifier_accepts(inst, x_of_N(b.N), b.w)
    if accepted:
        out = BlockEnergy(b, cls, "exact", s4_energy(b.N, b.T, precision_bits))
    else:
        out = BlockEnergy(b, cls, "bound", periodic_bound(b.N, precision_bits))
    if numeric:
        out.numeric = numeric_block_energy(inst, b, budget)
    return out


def numeric_block_energy(inst: OracleInstance, b: BlockSpec, budget: int = sp.DENSE_BUDGET,
                         machines: Machines | None = None) -> float:
    prof = semantic_profile(b, None if machines else inst, machines)
    if prof.length > budget:
        raise BudgetExceeded(f"cycle length {prof.length} exceeds dense budget {budget}")
    m = sp.assemble(sp.PenalizedMatrix("cycle", prof.length), budget)
    m[np.diag_indices_from(m)] += prof.diagonal()
    return sp.smallest_eig(m)


@dataclass
class GlobalResult:
    N: int
    x: str
    y_tilde: str
    energy: BigFixed
    argmin: BlockSpec
    expected: BigFixed
    per_y: dict              # y -> best BlockEnergy for that guess string
    blocks_seen: int

    @property
    def argmin_y(self) -> str:
        return self.argmin.w[:len(self.y_tilde)]

    @property
    def matches_closed_form(self) -> bool:
        a, b = self.energy.interval(), self.expected.interval()
        return abs(self.energy.to_fraction() - self.expected.to_fraction()) <= max(
            a[1] - a[0], b[1] - b[0]) + Fraction(1, 10 ** 12)

    @property
    def others_strictly_higher(self) -> bool:
        for y, be in self.per_y.items():
            if y == self.y_tilde:
                continue
            if fx_compare(be.value, self.energy) != 1:
                return False
        return True


def _lt(a: BigFixed, b: BigFixed) -> bool:
    c = fx_compare(a, b)
    if c is None and a.to_fraction() == b.to_fraction():
        return False        # the same closed form or bound, computed twice
    if c is None:
        raise ArithmeticError("energies not separated at working precision")
    return c < 0


def global_ground_energy(inst: OracleInstance, N: int, precision_bits: int = 128,
                         budget: int = 1 << 16) -> GlobalResult:
    """Minimize over every block at chain length N.

    Only the bits the computation reads (y and the m certificate segments)
    are enumerated; the padding bits of the witness do not enter any
    penalty, so each class of padding is represented once.
    """
    if not is_valid_N(N):
        raise ValueError(f"N={N} is not N(x) for any x")
    x = x_of_N(N)
    m, wl = inst.m_of(x), inst.wlen
    read = m + m * wl
    if N - 4 < read:
        raise ValueError(f"N={N} leaves no room for {read} witness bits")
    count = 2 ** read * (N - 2) + 1
    if count > budget:
        raise BudgetExceeded(f"{count} blocks exceed budget {budget}")
    pad = "0" * (N - 4 - read)
    yt = y_tilde(inst, x)
    per_y: dict[str, BlockEnergy] = {}
    best: BlockEnergy | None = None
    seen = 0
    for bits in itertools.product("01", repeat=read):
        w = "".join(bits) + pad
        y = w[:m]
        for T in range(N - 2):
            be = block_ground_energy(inst, BlockSpec(N, T, w), precision_bits)
            seen += 1
            cur = per_y.get(y)
            if cur is None or _lt(be.value, cur.value):
                per_y[y] = be
            if best is None or _lt(be.value, best.value):
                best = be
    # one representative wrong-start block; all such blocks share the bound
    bad_v = tm.TapeConfig("0" + "#" * (N - 3), "0" * (N - 2), 1, "q0")
    s1 = block_ground_energy(inst, BlockSpec(N, 0, "0" * (N - 4), bad_v), precision_bits)
    seen += 1
    if _lt(s1.value, best.value):
        best = s1
    expected = s4_energy(N, t_of_xy(inst, x, yt), precision_bits)
    return GlobalResult(N, x, yt, best.value, best.block, expected, per_y, seen)
