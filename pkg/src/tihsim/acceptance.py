"""The twelve acceptance checks, shared by ``tihsim verify-all`` and the test suite.

Each check returns a ``Result`` whose ``detail`` is deterministic; wall-clock
time is kept separately so that two runs print identical JSON.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import blocks, clock, ged, robinson, spectral, tm
from .precision import fx_to_decimal


@dataclass
class Result:
    id: int
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0
    limit: float | None = None

    @property
    def in_time(self) -> bool:
        return self.limit is None or self.seconds <= self.limit

    @property
    def passed(self) -> bool:
        return self.ok and self.in_time

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = "" if self.in_time else f" (over time limit: {self.seconds:.1f}s > {self.limit}s)"
        return f"{tag} criterion {self.id}: {self.name}{extra}"

    def to_json(self) -> dict:
        return {"id": self.id, "name": self.name, "ok": self.ok, "detail": self.detail}


def _timed(fn):
    def wrapper(*a, **kw):
        t0 = time.perf_counter()
        r = fn(*a, **kw)
        r.seconds = time.perf_counter() - t0
        return r
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def c1_closed_form() -> Result:
    worst, worst_L = 0.0, None
    for L in range(3, 201):
        m = spectral.assemble(spectral.cycle_with_adjacent_halves(L))
        got = spectral.smallest_eig(m)
        want = float(spectral.cycle_two_halves_exact(L, 80).to_fraction())
        if abs(got - want) > worst:
            worst, worst_L = abs(got - want), L
    return Result(1, "closed-form spectrum of the two-half-penalty cycle", worst <= 1e-10,
                  {"max_abs_error": f"{worst:.3e}", "worst_L": worst_L}, limit=60)


@_timed
def c2_periodic_bound() -> Result:
    worst_margin, worst_rs, failures = None, None, []
    for r in range(1, 11):
        for s in range(1, 21):
            m = spectral.assemble(spectral.periodic_penalty(r, s))
            ev = spectral.smallest_eig(m)
            bound = float(spectral.periodic_lower_bound(r, s, 80).to_fraction())
            margin = ev - bound
            if margin < -1e-12:
                failures.append([r, s])
            if worst_margin is None or margin < worst_margin:
                worst_margin, worst_rs = margin, [r, s]
    return Result(2, "periodic-penalty lower bound", not failures,
                  {"min_margin": f"{worst_margin:.6e}", "at_rs": worst_rs, "failures": failures},
                  limit=120)


@_timed
def c3_fourier_block() -> Result:
    worst = 0.0
    for r in range(1, 9):
        for s in range(1, 9):
            diff = np.abs(spectral.fourier_block(r, s) - spectral.fourier_block_expected(r, s))
            worst = max(worst, float(diff.max()))
    return Result(3, "Fourier block structure of the periodic penalty", worst <= 1e-10,
                  {"max_abs_error": f"{worst:.3e}"})


@_timed
def c4_clock_structure(Ns=range(4, 9)) -> Result:
    rows, ok = [], True
    for N in Ns:
        for T in range(0, N - 2):
            _, rep = clock.build_graph(N, T)
            ok = ok and rep["ok"]
            rows.append({k: rep[k] for k in ("N", "T", "p", "correct", "expected_correct",
                                             "single_cycle", "longest_incorrect_path",
                                             "incorrect_paths_not_ending_illegal",
                                             "max_in_degree", "ok")})
    return Result(4, "clock configuration graph structure", ok, {"cases": rows}, limit=300)


def _increment_steps(m: tm.TuringMachine, x: str) -> int:
    """Steps for one increment from (q0, x) back to q_f at cell 1."""
    c = tm.TapeConfig.blank(x + "###", m.start)
    for t in range(1, 10 * len(x) + 10):
        c = tm.step(m, c)
        if c.state == m.final and c.head == 1:
            return t
    raise tm.TMError(f"increment of {x!r} did not finish")


@_timed
def c5_counter_law(max_len: int = 10) -> Result:
    m = tm.build_mbc()
    bad, deltas, checked = [], {}, 0
    for n in range(2, max_len + 1):
        for v in range(2 ** (n - 1)):
            x = format(v, f"0{n - 1}b") + "1"
            r = tm.n_of_x(x, m=m)
            checked += 1
            ok = (r.head_min >= 1 and r.head_max <= r.value - 4 and r.value >= 2 ** n)
            c = tm.string_after(r.value - 2, len(x) + 3, m)
            ok = ok and c.state == m.final and c.head == 1 and c.work.startswith(x)
            if not ok:
                bad.append(x)
            deltas[r.delta] = deltas.get(r.delta, 0) + 1
    inc_bad = []
    # counter values: binary strings ending in 1 (least significant bit first)
    for n in range(1, max_len + 1):
        for v in range(2 ** (n - 1)):
            x = (format(v, f"0{n - 1}b") if n > 1 else "") + "1"
            want = 1 if tm.leading_ones(x) == 0 else 2 * tm.leading_ones(x) + 3
            if _increment_steps(m, x) != want:
                inc_bad.append(x)
    return Result(5, "binary-counter timing law", not bad and not inc_bad,
                  {"strings_checked": checked, "failures": bad[:10],
                   "increment_failures": inc_bad[:10],
                   "closed_form_minus_simulation": {str(k): v for k, v in sorted(deltas.items())}})


def _machines_under_test() -> dict:
    bc = tm.build_mbc()
    post = tm.build_mpost()
    tv = blocks.build_toy_mtv()
    bc_ext = tm.extend_alphabet(bc, ("A", "R", "X"))
    out = {
        "M_BC": bc,
        "M_post": post,
        "M_TV(toy)": tv,
        "M_BC+A,R,X": bc_ext,
        "dovetail(M_BC,M_BC')": tm.dovetail(bc, tm.rename_states(bc, "'")),
        "dovetail(M_BC,M_TV)": tm.dovetail(bc_ext, tv),
        "add_states(M_BC,z)": tm.add_states(bc, "z"),
    }
    mach = blocks.toy_machines()
    out["BC(widened)"] = mach.bc
    out["T(M_BC+M_TV)"] = mach.check
    return out


TIMEWASTE = {"T(M_BC+M_TV)"}


def _round_trips(machines: dict, n: int, seed: int = 1234) -> tuple[int, int]:
    rng = random.Random(seed)
    names = sorted(machines)
    done = bad = 0
    while done < n:
        m = machines[names[done % len(names)]]
        L = rng.randint(4, 12)
        syms = list(m.alphabet)
        c = tm.TapeConfig("".join(rng.choice(syms) for _ in range(L)),
                          "".join(rng.choice("01") for _ in range(L)),
                          rng.randint(1, L), rng.choice(m.state_names))
        t = rng.randint(1, 40)
        try:
            fwd, _ = tm.run(m, c, t)
        except tm.TMError:
            continue            # ran off the tape; draw again
        if tm.run_back(m, fwd, t) != c:
            bad += 1
        done += 1
    return done, bad


@_timed
def c6_reversibility(trips: int = 10_000) -> Result:
    machines = _machines_under_test()
    reports, ok = {}, True
    for name, m in sorted(machines.items()):
        rep = tm.check_reversible(m)
        d = rep.as_dict()
        if name in TIMEWASTE:
            # the transform rewires (p_f, trigger) by construction; any other
            # normal-form gap is still a failure
            extra = set(rep.normal_form_exceptions) - {"A", "R"}
            good = rep.unidirectional and rep.reduced_injective and not extra
            d["normal_form_scope"] = "all symbols except the trigger symbols A, R"
        else:
            good = rep.ok
        d["ok"] = good
        reports[name] = d
        ok = ok and good
    done, bad = _round_trips(machines, trips)
    return Result(6, "reversibility of every machine used", ok and bad == 0,
                  {"machines": reports, "round_trips": done, "round_trip_failures": bad})


@_timed
def c7_cyclic_computation() -> Result:
    rows, ok = [], True
    mach = blocks.toy_machines()
    for name in blocks.TOY_INSTANCES:
        inst = blocks.load_instance(name)
        for N in (6, 8):
            ws = sorted({"0" * (N - 4), "1" * (N - 4), ("01" * N)[:N - 4], ("10" * N)[:N - 4]})
            for T in range(0, N - 2):
                for w in ws:
                    r = blocks.track_walk_cycle_check(N, T, w, mach)
                    ok = ok and bool(r)
                    rows.append({"instance": name, "digest": inst.digest()[:12],
                                 "N": N, "T": T, "w": w, "ok": bool(r)})
    bad = blocks.mutate(mach)
    flipped = not blocks.track_walk_cycle_check(8, 2, "0000", bad)
    unmutated = bool(blocks.track_walk_cycle_check(8, 2, "0000", mach))
    return Result(7, "tracks 4-6 cycle with the clock; a corrupted rule breaks it",
                  ok and flipped and unmutated,
                  {"cases": len(rows), "failures": [r for r in rows if not r["ok"]],
                   "mutation": "check rule (p1, '1', witness 0) writes a colliding symbol",
                   "mutation_flips": flipped})


@_timed
def c8_minimization(precision_bits: int = 128) -> Result:
    rows, ok = [], True
    for name in blocks.TOY_INSTANCES:
        inst = blocks.load_instance(name)
        N = blocks.smallest_valid_N(inst)
        g = blocks.global_ground_energy(inst, N, precision_bits)
        good = g.argmin_y == g.y_tilde and g.matches_closed_form and g.others_strictly_higher
        ok = ok and good
        rows.append({"instance": name, "N": N, "x": g.x, "y_tilde": g.y_tilde,
                     "argmin_y": g.argmin_y, "energy": fx_to_decimal(g.energy, 30),
                     "closed_form": fx_to_decimal(g.expected, 30),
                     "others_strictly_higher": g.others_strictly_higher,
                     "blocks": g.blocks_seen, "ok": good})
    return Result(8, "correct guesses minimize the ground energy", ok, {"instances": rows})


@_timed
def c9_extraction(precision_bits: int = 4096) -> Result:
    rows, ok = [], True
    for name in blocks.TOY_INSTANCES:
        inst = blocks.load_instance(name)
        series = ged.GedSeries(inst, precision_bits=precision_bits)
        a = ged.alpha0(series).to_fraction()
        for x in (1, 2, 3):
            want = inst.f_of(str(x), blocks.y_tilde(inst, str(x)))
            q = ged.q_of(inst, x)
            eps = Fraction(1, 2 ** (q + 1))
            got = [ged.extract_f(a + d, x, inst).recovered_f for d in (0, eps, -eps)]
            good = all(g == want for g in got)
            ok = ok and good
            rows.append({"instance": name, "x": x, "q": q, "f": want,
                         "recovered": got, "ok": good})
    return Result(9, "f(x) recovered from the ground-energy density", ok,
                  {"precision_bits": precision_bits, "cases": rows}, limit=120)


@_timed
def c10_binary_search(n: int = 100, rounds: int = 30, seed: int = 2024) -> Result:
    rng = random.Random(seed)
    bad = 0
    for i in range(n):
        den = rng.randint(1, 10 ** 9)
        lam0 = Fraction(rng.randint(0, den), den)
        for adv in ("accept", "reject"):
            try:
                res = ged.binary_search(ged.PromiseOracle(lam0, adv), rounds)
            except ged.ContractViolation:
                bad += 1
                continue
            if res.u - res.l != Fraction(1, 2 ** rounds) or not res.l <= lam0 <= res.u:
                bad += 1
    return Result(10, "promise-oracle binary search", bad == 0,
                  {"trials": 2 * n, "rounds": rounds, "failures": bad})


@_timed
def c11_robinson(max_m: int = 8) -> Result:
    inst = blocks.load_instance("toy-m1")
    series = ged.GedSeries(inst, precision_bits=200)
    lams = {k: ged.lambda0_4k(series, k) for k in range(1, max_m + 1)}
    rows, ok, gaps = [], True, []
    for m in range(1, max_m + 1):
        L = 4 ** m
        h = robinson.hierarchy(L)
        counts_ok = all(
            robinson.count_interval(L, k)[0] <= h.count(k) <= robinson.count_interval(L, k)[1]
            for k in range(1, robinson.k_top(L) + 1))
        iv = robinson.energy_interval(L, lams)
        lo, hi = iv.density()
        tr = robinson.truncated_density(L, lams)
        bracket = lo <= tr <= hi
        gaps.append(hi - lo)
        ok = ok and counts_ok and bracket
        rows.append({"m": m, "L": L, "counts_ok": counts_ok, "bracket": bracket,
                     "gap": f"{float(hi - lo):.6e}"})
    monotone = all(b < a for a, b in zip(gaps[1:], gaps[2:]))
    return Result(11, "Robinson square counts and energy interval", ok and monotone,
                  {"rows": rows, "gap_strictly_decreasing_from_m2": monotone})


@_timed
def c12_decay() -> Result:
    rows, ok = [], True
    for name in blocks.TOY_INSTANCES:
        inst = blocks.load_instance(name)
        for r in ged.decay_checks(inst):
            r = {"instance": name, **r}
            ok = ok and r["T_ok"] and r["l_ok"]
            rows.append(r)
    return Result(12, "timer and energy-term decay", ok, {"rows": rows})


CHECKS = (c1_closed_form, c2_periodic_bound, c3_fourier_block, c4_clock_structure,
          c5_counter_law, c6_reversibility, c7_cyclic_computation, c8_minimization,
          c9_extraction, c10_binary_search, c11_robinson, c12_decay)


def run_all(only=None, on_result=None) -> list[Result]:
    out = []
    for i, fn in enumerate(CHECKS, 1):
        if only and i not in only:
            continue
        r = fn()
        out.append(r)
        if on_result:
            on_result(r)
    return out
