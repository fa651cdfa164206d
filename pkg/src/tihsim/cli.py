"""Command-line front end: ``tihsim <group> <command> [options]``.

Numbers leave the program as decimal strings.  ``--json-out`` additionally
writes a manifest (command, parameters, input digests, versions) next to the
result, and a content-addressed cache holds computed lambda0(4^k) values.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction
from importlib import metadata
from pathlib import Path

from . import acceptance, blocks, clock, ged, robinson, spectral, tm
from .precision import BigFixed, fx_to_decimal

DEFAULT_DIGITS = 30


# -- cache ---------------------------------------------------------------------

def _stable(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def cache_root(flag: str | None) -> Path:
    if flag:
        return Path(flag)
    env = os.environ.get("TIHSIM_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "tihsim"


class ResultCache:
    """JSON files named by the sha256 of their key.

    The full key is stored with each value and compared on read, so an entry
    is only ever returned for exactly the key it was computed under.
    """

    def __init__(self, root: Path | None):
        self.root = root
        self.hits = self.misses = 0

    def _path(self, key: dict) -> Path:
        h = hashlib.sha256(_stable(key).encode()).hexdigest()
        return self.root / h[:2] / f"{h}.json"

    def get(self, key: dict):
        if self.root is None:
            return None
        p = self._path(key)
        if not p.exists():
            return None
        try:
            entry = json.loads(p.read_text())
        except (OSError, ValueError):
            return None
        if entry.get("key") != key:
            return None
        return entry["value"]

    def put(self, key: dict, value) -> None:
        if self.root is None:
            return
        p = self._path(key)
        p.parent.mkdir(parents=True, exist_ok=True)
        tmp = p.with_suffix(".tmp")
        tmp.write_text(_stable({"key": key, "value": value}))
        tmp.replace(p)

    def lambda_fn(self, series: ged.GedSeries):
        digest = series.instance.digest()

        def lam(k: int, bits: int) -> BigFixed:
            key = {"kind": "lambda0_4k", "instance": digest, "k": k, "bits": bits,
                   "K": sorted(series.K)}
            hit = self.get(key)
            if hit is not None:
                self.hits += 1
                return BigFixed(int(hit["num"]), hit["scale"], int(hit["err"]))
            self.misses += 1
            v = ged.lambda0_4k(series, k, bits)
            self.put(key, {"num": str(v.num), "scale": v.scale, "err": str(v.err)})
            return v
        return lam


# -- helpers -------------------------------------------------------------------

def _dec(v: BigFixed, digits: int) -> str:
    return fx_to_decimal(v, digits)


def _float(v: float) -> str:
    return repr(float(v))


def _ints(s: str | None) -> list[int]:
    return [int(t) for t in s.split(",") if t.strip()] if s else []


def _machine(name: str) -> tm.TuringMachine:
    builtin = {
        "mbc": tm.build_mbc,
        "mpost": tm.build_mpost,
        "toy-tv": blocks.build_toy_mtv,
        "check": lambda: blocks.toy_machines().check,
    }
    if name in builtin:
        return builtin[name]()
    return tm.machine_from_json(Path(name).read_text())


def _digest_file(path: str) -> str | None:
    p = Path(path)
    return hashlib.sha256(p.read_bytes()).hexdigest() if p.is_file() else None


# -- tm ------------------------------------------------------------------------

def cmd_tm_run(a):
    m = _machine(a.machine)
    c = tm.TapeConfig(a.tape, a.witness or "0" * len(a.tape), a.head, a.state or m.start)
    end, trace = tm.run(m, c, a.steps)
    return {"machine": m.name, "steps": a.steps, "state": end.state, "head": end.head,
            "work": end.work, "witness": end.witness,
            "min_cell": trace.min_cell, "max_cell": trace.max_cell}


def cmd_tm_check(a):
    m = _machine(a.machine)
    return {"machine": m.name, "states": len(m.states), **tm.check_reversible(m).as_dict()}


def cmd_tm_nofx(a):
    r = tm.n_of_x(a.x, budget=a.budget or 10_000_000)
    return {"x": r.x, "N": r.value, "closed_form": r.closed_form,
            "closed_form_minus_simulation": r.delta,
            "head_min": r.head_min, "head_max": r.head_max}


# -- clock ---------------------------------------------------------------------

def cmd_clock_graph(a):
    g, rep = clock.build_graph(a.N, a.T, budget_N=a.budget or 9)
    if a.dot:
        Path(a.dot).write_text(g.to_dot() + "\n")
    if a.report:
        return rep
    return g.to_json()


def cmd_clock_report(a):
    Ts = [a.T] if a.T is not None else list(range(0, a.N - 2))
    reps = [clock.build_graph(a.N, T, budget_N=a.budget or 9)[1] for T in Ts]
    return {"N": a.N, "p": clock.p_of(a.N), "segments": clock.segment_lengths(a.N),
            "reports": reps, "ok": all(r["ok"] for r in reps)}


# -- spectral ------------------------------------------------------------------

def cmd_spectral_eig(a):
    if a.matrix:
        spec = spectral.PenalizedMatrix.from_json(Path(a.matrix).read_text())
    elif a.periodic:
        r, s = _ints(a.periodic)
        spec = spectral.periodic_penalty(r, s)
    else:
        spec = spectral.cycle_with_adjacent_halves(a.L)
    m = spectral.assemble(spec, budget=a.budget or spectral.DENSE_BUDGET)
    return {"base": spec.base, "L": spec.L, "smallest_eigenvalue": _float(spectral.smallest_eig(m))}


def cmd_spectral_closed_form(a):
    bits = int(a.digits * 3.33) + 16
    bits = max(bits, a.precision_bits or 0)
    if a.kind == "path":
        v = spectral.path_half_exact(a.L, bits)
    else:
        v = spectral.cycle_two_halves_exact(a.L, bits)
    return {"kind": a.kind, "L": a.L, "digits": a.digits, "value": _dec(v, a.digits)}


def cmd_spectral_bounds(a):
    bits = a.precision_bits or 128
    if a.N is not None:
        c = spectral.bound_compare(a.N, a.T or 0, bits)
        return {"N": a.N, "T": a.T or 0, "p": clock.p_of(a.N),
                "s4_energy": _dec(c.s4_value, a.digits),
                "periodic_bound": _dec(c.periodic_bound, a.digits),
                "s4_below_bound": c.holds, "T_at_least_4": c.in_hypothesis}
    m = spectral.assemble(spectral.periodic_penalty(a.r, a.s), budget=a.budget or spectral.DENSE_BUDGET)
    ev = spectral.smallest_eig(m)
    lb = spectral.periodic_lower_bound(a.r, a.s, bits)
    return {"r": a.r, "s": a.s, "smallest_eigenvalue": _float(ev),
            "lower_bound": _dec(lb, a.digits), "holds": ev >= float(lb.to_fraction()) - 1e-12}


# -- blocks --------------------------------------------------------------------

def cmd_blocks_ground_energy(a):
    inst = blocks.load_instance(a.instance)
    N = a.N or blocks.smallest_valid_N(inst)
    g = blocks.global_ground_energy(inst, N, a.precision_bits or 128, a.budget or 1 << 16)
    return {
        "instance": inst.name, "digest": inst.digest(), "N": N, "x": g.x,
        "y_tilde": g.y_tilde, "argmin_y": g.argmin_y,
        "argmin_T": g.argmin.T, "energy": _dec(g.energy, a.digits),
        "closed_form": _dec(g.expected, a.digits),
        "matches_closed_form": g.matches_closed_form,
        "others_strictly_higher": g.others_strictly_higher,
        "per_y": {y: be.to_json(a.digits) for y, be in sorted(g.per_y.items())},
        "blocks": g.blocks_seen,
    }


def cmd_blocks_profile(a):
    b = blocks.BlockSpec(a.N, a.T, a.w or "0" * (a.N - 4))
    inst = blocks.load_instance(a.instance) if a.instance else None
    mach = None if inst and a.mode == "semantic" else blocks.toy_machines()
    prof = blocks.penalty_profile(inst, b, a.mode, mach, a.budget or 200_000)
    out = prof.to_json()
    out.update({"N": a.N, "T": a.T, "w": b.w, "mode": a.mode,
                "final_pair": prof.final_pair(), "periodic_hit": prof.periodic_hit()})
    if inst is not None:
        be = blocks.block_ground_energy(inst, b, a.precision_bits or 64)
        out["class"] = be.cls
        out["energy"] = be.to_json(a.digits)
    return out


def cmd_blocks_walk(a):
    mach = blocks.toy_machines()
    if a.mutate:
        mach = blocks.mutate(mach)
    r = blocks.track_walk_cycle_check(a.N, a.T, a.w, mach)
    return {"N": a.N, "T": a.T, "w": a.w or "0" * (a.N - 4), "mutated": a.mutate,
            "cycle_ok": r.ok, "first_mismatch": r.first_mismatch,
            "distinct": r.distinct, "error": r.error}


# -- ged -----------------------------------------------------------------------

def _series(a, cache: ResultCache, bits: int):
    inst = blocks.load_instance(a.instance)
    series = ged.GedSeries(inst, frozenset(_ints(a.K)), a.k_max, bits)
    return inst, series, ged.alpha0(series, lam_fn=cache.lambda_fn(series))


def cmd_ged_alpha0(a, cache):
    bits = a.precision_bits or 128
    inst, series, v = _series(a, cache, bits)
    digits = a.digits if a.digits != DEFAULT_DIGITS else int(bits / 3.33)
    return {"instance": inst.name, "digest": inst.digest(), "precision_bits": bits,
            "k_max": a.k_max or ged.required_k_max(bits), "K": sorted(series.K),
            "alpha0": _dec(v, digits), "error_bound": f"{float(v.error_bound):.3e}",
            "cache": {"hits": cache.hits, "misses": cache.misses}}


def cmd_ged_extract(a, cache):
    inst = blocks.load_instance(a.instance)
    q = ged.q_of(inst, a.x)
    bits = max(a.precision_bits or 0, q + 16)
    _, series, v = _series(a, cache, bits)
    res = ged.extract_f(v, a.x, inst, series.K)
    return {"instance": inst.name, "precision_bits": bits, **res.to_json()}


def cmd_ged_search(a):
    lam0 = Fraction(a.lam0)
    res = ged.binary_search(ged.PromiseOracle(lam0, a.adversary), a.rounds)
    return {"lam0": str(lam0), "rounds": a.rounds, "adversary": a.adversary,
            "l": str(res.l), "u": str(res.u), "width": str(res.u - res.l),
            "contains": res.l <= lam0 <= res.u,
            "trace": [{"round": j, "branch": br, "l": str(l), "u": str(u)}
                      for j, br, l, u in res.rounds]}


def cmd_ged_decay(a):
    inst = blocks.load_instance(a.instance)
    rows = ged.decay_checks(inst, tuple(_ints(a.ks)) or (1, 2, 3))
    return {"instance": inst.name, "rows": rows,
            "ok": all(r["T_ok"] and r["l_ok"] for r in rows)}


# -- robinson ------------------------------------------------------------------

def cmd_robinson_hierarchy(a):
    h = robinson.hierarchy(a.L)
    if a.ascii:
        print(robinson.render_ascii(h))
    levels = []
    for k in h.levels():
        lo, hi = robinson.count_interval(a.L, k)
        levels.append({"k": k, "side": 4 ** k, "count": h.count(k), "interval": [lo, hi],
                       "density": str(h.density(k)), "disjoint": robinson.segments_disjoint(h, k)})
    out = {"L": a.L, "levels": levels, "nesting_ok": robinson.nesting_ok(h)}
    if a.segments:
        out["segments"] = h.to_json(a.max_level)["levels"]
    return out


def cmd_robinson_interval(a, cache):
    inst = blocks.load_instance(a.instance)
    bits = a.precision_bits or 128
    series = ged.GedSeries(inst, frozenset(_ints(a.K)), precision_bits=bits)
    lam = cache.lambda_fn(series)
    lams = {k: lam(k, bits) for k in range(1, robinson.k_top(a.L) + 1)}
    iv = robinson.energy_interval(a.L, lams)
    lo, hi = iv.density()
    tr = robinson.truncated_density(a.L, lams)
    d = a.digits
    return {"L": a.L, "instance": inst.name, "energy_lo": _dec(iv.lo, d), "energy_hi": _dec(iv.hi, d),
            "density_lo": _dec_frac(lo, d), "density_hi": _dec_frac(hi, d),
            "truncated_density": _dec_frac(tr, d), "bracketed": lo <= tr <= hi}


def _dec_frac(f: Fraction, digits: int) -> str:
    from .precision import fx
    return _dec(fx(f, int(digits * 3.33) + 16), digits)


# -- verify-all ----------------------------------------------------------------

def cmd_verify_all(a):
    only = set(_ints(a.only)) or None
    results = acceptance.run_all(only, on_result=lambda r: print(r.line(), flush=True))
    return {"criteria": [r.to_json() for r in results],
            "passed": sum(r.passed for r in results), "total": len(results)}


# -- parser --------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    s = argparse.SUPPRESS
    p.add_argument("--precision-bits", type=int, default=s, help="working precision in bits")
    p.add_argument("--budget", type=int, default=s, help="size budget (steps, blocks or matrix side)")
    p.add_argument("--cache-dir", default=s, help="cache directory (default $TIHSIM_CACHE or ~/.cache/tihsim)")
    p.add_argument("--json-out", default=s, help="also write result and manifest to this file")
    p.add_argument("--digits", type=int, default=s, help="decimal digits in numeric output")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="tihsim", description=__doc__.splitlines()[0])
    ap.set_defaults(precision_bits=None, budget=None, cache_dir=None, json_out=None,
                    digits=DEFAULT_DIGITS)
    for p in common._actions:
        if p.option_strings:
            ap._add_action(p)
    groups = ap.add_subparsers(dest="group", required=True)

    def leaf(sub, name, fn, help_=None, cached=False):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(fn=fn, cached=cached)
        return p

    g = groups.add_parser("tm", help="Turing machine simulation and checks").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "run", cmd_tm_run, "run a machine for a number of steps")
    p.add_argument("--machine", default="mbc", help="mbc, mpost, toy-tv, check, or a JSON file")
    p.add_argument("--tape", required=True)
    p.add_argument("--witness")
    p.add_argument("--head", type=int, default=1)
    p.add_argument("--state")
    p.add_argument("--steps", type=int, required=True)
    p = leaf(g, "check", cmd_tm_check, "reversibility report")
    p.add_argument("--machine", default="mbc")
    p = leaf(g, "nofx", cmd_tm_nofx, "chain length N(x) by simulation")
    p.add_argument("--x", required=True)

    g = groups.add_parser("clock", help="clock configuration graph").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "graph", cmd_clock_graph, "enumerate the configuration graph")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--T", type=int, default=0)
    p.add_argument("--report", action="store_true", help="print the structure report instead of the graph")
    p.add_argument("--dot", help="write Graphviz output here")
    p = leaf(g, "report", cmd_clock_report, "structure reports for one N")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--T", type=int)

    g = groups.add_parser("spectral", help="penalized cycle matrices").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "eig", cmd_spectral_eig, "smallest eigenvalue")
    p.add_argument("--matrix", help="matrix description JSON")
    p.add_argument("--L", type=int, default=8)
    p.add_argument("--periodic", help="r,s for the periodic penalty D_{r,s,0}")
    p = leaf(g, "closed-form", cmd_spectral_closed_form, "1 - cos(pi/(L+1)) to any precision")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--kind", choices=("cycle", "path"), default="cycle")
    p = leaf(g, "bounds", cmd_spectral_bounds, "periodic lower bound checks")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--s", type=int, default=3)
    p.add_argument("--N", type=int)
    p.add_argument("--T", type=int)

    g = groups.add_parser("blocks", help="block energies and walks").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "ground-energy", cmd_blocks_ground_energy, "minimize over all blocks")
    p.add_argument("--instance", required=True)
    p.add_argument("--N", type=int)
    p = leaf(g, "profile", cmd_blocks_profile, "penalty profile of one block")
    p.add_argument("--instance")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--w")
    p.add_argument("--mode", choices=("semantic", "track-walk"), default="semantic")
    p = leaf(g, "walk", cmd_blocks_walk, "cycle check of the local-rule walk")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--w")
    p.add_argument("--mutate", action="store_true", help="corrupt one rule first")

    g = groups.add_parser("ged", help="ground-energy density").add_subparsers(dest="cmd", required=True)
    for name, fn in (("alpha0", cmd_ged_alpha0), ("extract", cmd_ged_extract)):
        p = leaf(g, name, fn, cached=True)
        p.add_argument("--instance", required=True)
        p.add_argument("--K", help="comma-separated insufficient k values")
        p.add_argument("--k-max", type=int)
        if name == "extract":
            p.add_argument("--x", type=int, required=True)
    p = leaf(g, "search", cmd_ged_search, "binary search against a promise oracle")
    p.add_argument("--lam0", required=True, help="rational, e.g. 1/3")
    p.add_argument("--rounds", type=int, default=30)
    p.add_argument("--adversary", choices=("accept", "reject"), default="accept")
    p = leaf(g, "decay", cmd_ged_decay, "timer and term decay checks")
    p.add_argument("--instance", required=True)
    p.add_argument("--ks", help="comma-separated k values")

    g = groups.add_parser("robinson", help="square hierarchy").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "hierarchy", cmd_robinson_hierarchy, "square counts per level")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--ascii", action="store_true")
    p.add_argument("--segments", action="store_true")
    p.add_argument("--max-level", type=int)
    p = leaf(g, "interval", cmd_robinson_interval, "ground-energy interval on an L x L grid", cached=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--K")

    p = groups.add_parser("verify-all", parents=[common], help="run the acceptance suite")
    p.set_defaults(fn=cmd_verify_all, cached=False)
    p.add_argument("--only", help="comma-separated criterion numbers")
    return ap


def _versions() -> dict:
    out = {}
    for pkg in ("artifact", "numpy", "scipy"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = None
    return out


def _manifest(a, argv) -> dict:
    skip = {"fn", "cached", "json_out", "cache_dir"}
    params = {k: v for k, v in sorted(vars(a).items()) if k not in skip}
    inputs = {}
    for k in ("instance", "matrix", "machine"):
        v = getattr(a, k, None)
        if v and (d := _digest_file(v)):
            inputs[v] = d
        elif k == "instance" and v:
            inputs[v] = blocks.load_instance(v).digest()
    return {"subcommand": " ".join(x for x in (a.group, getattr(a, "cmd", None)) if x),
            "parameters": params, "inputs": inputs,
            "outputs": [a.json_out] if a.json_out else [], "versions": _versions()}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    ap = build_parser()
    a = ap.parse_args(argv)      # unknown flags: usage on stderr, exit 2
    try:
        if a.cached:
            cache = ResultCache(cache_root(a.cache_dir))
            result = a.fn(a, cache)
        else:
            result = a.fn(a)
    except (ValueError, KeyError, ArithmeticError, tm.TMError, clock.ClockError,
            blocks.BudgetExceeded, ged.ContractViolation, OSError) as e:
        print(f"tihsim: error: {e}", file=sys.stderr)
        return 1
    text = json.dumps(result, indent=2, sort_keys=True)
    print(text)
    if a.json_out:
        doc = {"manifest": _manifest(a, argv), "result": result}
        Path(a.json_out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if a.group == "verify-all":
        return 0 if result["passed"] == result["total"] else 1
    return 0
