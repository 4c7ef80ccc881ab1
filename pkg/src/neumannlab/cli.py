"""Command line front end: ``neumannlab <command> [options]``.

Every command prints a report as CSV (default) or as a JSON envelope
``{command, config, rows, derived_checks}``.  Output depends only on the
arguments, seeds included.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from typing import Sequence

from . import __version__
from .errors import (
    EnumerationRefused,
    NeumannLabError,
    ParseError,
    SequenceExhausted,
    WindowTooSmall,
)

__all__ = ["ExperimentConfig", "build_parser", "parse_config", "run", "main"]


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    seq: str = "5,7,9,..."
    subgroup: str = "t"
    probes: tuple[str, ...] = ()
    word: str = ""
    gen: str = "s"
    i: int = 1
    i_min: int = 1
    i_max: int = 1
    mode: str = "auto"
    alpha: str = "0.3;0.7"
    s_basis: str = ""
    windows: tuple[int, ...] = (50,)
    samples: int = 10000
    test: str = "invariance"
    conjugators: tuple[str, ...] = ()
    k: int = 1
    depth: int = 2
    epsilon: float = 0.05
    probe_depth: int = 3
    seed: int | None = None
    format: str = "csv"
    cap: int = 10**6
    out: str | None = None

    _FLAGS = {
        "element": ("seq", "word"),
        "order": ("seq", "i", "subgroup"),
        "folner": ("seq", "i_min", "i_max", "gen", "mode"),
        "weiss": ("seq", "subgroup", "probes", "i_min", "i_max", "mode", "samples"),
        "vershik": ("alpha", "s_basis", "windows", "samples", "test", "probes", "conjugators", "k"),
        "defect": ("seq", "depth", "epsilon", "probe_depth"),
    }

    def to_argv(self) -> list[str]:
        """Arguments that parse back to this exact config."""
        argv = [self.command]
        for name in self._FLAGS[self.command] + ("seed", "format", "cap", "out"):
            val = getattr(self, name)
            if val is None:
                continue
            flag = "--" + {"subgroup": "H"}.get(name, name.replace("_", "-"))
            if name in ("probes", "conjugators"):
                argv += [flag, ";".join(val)]
            elif name == "windows":
                argv += ["--window", ",".join(map(str, val))]
            else:
                argv += [flag, repr(val) if isinstance(val, float) else str(val)]
        return argv


# ---------------------------------------------------------------------------
# parsing

def _split(text: str, sep: str = ";") -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(sep) if p.strip())


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in _split(text, ","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--out", help="write the report to this file instead of standard output")
    g.add_argument("--format", choices=("csv", "json"), default="csv", help="report format (default csv)")
    g.add_argument("--seed", type=int, help="RNG seed; required by weiss, vershik and defect")
    g.add_argument("--cap", type=int, default=10**6, help="largest set the tools may enumerate (default 10^6)")

    p = argparse.ArgumentParser(prog="neumannlab", description="Experiments on the Neumann groups G(P).")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def seq_arg(sp, default="5,7,9,..."):
        sp.add_argument("--seq", default=default, help=f"odd sequence, e.g. 5,7,9 or 5,7,... or arith:start=5,step=2 (default {default})")

    sp = sub.add_parser("element", parents=[common], help="normal form, coordinates and tail of a word")
    seq_arg(sp)
    sp.add_argument("--word", required=True, help='word in t, s with exponents, e.g. "s^-2 t s^2"')

    sp = sub.add_parser("order", parents=[common], help="order of L_i or of a subgroup H")
    seq_arg(sp)
    sp.add_argument("--i", type=int, default=1, help="index of L_i (default 1)")
    sp.add_argument("--H", dest="subgroup", default=None, help='comma-separated generator words; omit for L_i')

    sp = sub.add_parser("folner", parents=[common], help="Foelner boundary ratios |gF_i symdiff F_i|/|F_i|")
    seq_arg(sp)
    sp.add_argument("--i-min", type=int, default=1)
    sp.add_argument("--i-max", type=int, default=1)
    sp.add_argument("--gen", default="s", help="group element as a word (default s)")
    sp.add_argument("--mode", choices=("auto", "closed", "structured", "enumerate"), default="auto")

    sp = sub.add_parser("weiss", parents=[common], help="the statistic p_i(g) for probes g and subgroup H")
    seq_arg(sp)
    sp.add_argument("--H", dest="subgroup", default="t", help='comma-separated generator words (default "t")')
    sp.add_argument("--probes", required=True, type=_split, help='semicolon-separated words, e.g. "t;s^-1 t s;s"')
    sp.add_argument("--i-min", type=int, default=1)
    sp.add_argument("--i-max", type=int, default=1)
    sp.add_argument("--mode", choices=("auto", "exact", "mc"), default="auto")
    sp.add_argument("--samples", type=int, default=10**5, help="Monte Carlo budget per (probe, i)")

    sp = sub.add_parser("vershik", parents=[common], help="random block subgroups from Bernoulli colorings")
    sp.add_argument("--alpha", default="0.3;0.7", help='"alpha_0;alpha_1,...", tail non-increasing')
    sp.add_argument("--s-basis", default="", help='bit strings like "11,01", or "ker", "full"; empty for {0}')
    sp.add_argument("--window", dest="windows", type=_ints, default=(50,),
                    help="window radius M; the shift test accepts a list such as 5,10,20,50")
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--test", choices=("invariance", "degenerate", "shift"), default="invariance")
    sp.add_argument("--probes", type=_split, default=("(-1,0,1)",), help='semicolon-separated cycle notation')
    sp.add_argument("--conjugators", type=_split, default=("(0,7)",), help='semicolon-separated cycle notation')
    sp.add_argument("--k", type=int, default=1, help="shift exponent for the shift test")

    sp = sub.add_parser("defect", parents=[common], help="defect and distance of perturbed quotient maps")
    seq_arg(sp, "5,7")
    sp.add_argument("--depth", type=int, default=2, help="number of windows in the quotient")
    sp.add_argument("--epsilon", type=float, default=0.05)
    sp.add_argument("--probe-depth", type=int, default=3, help="maximal probe word length")
    return p


_STOCHASTIC = {"weiss", "vershik", "defect"}


def parse_config(argv: Sequence[str]) -> ExperimentConfig:
    parser = build_parser()
    ns = parser.parse_args(list(argv))
    if ns.command in _STOCHASTIC and ns.seed is None:
        parser.error(f"{ns.command} requires --seed")
    names = {f.name for f in fields(ExperimentConfig)}
    kw = {k: v for k, v in vars(ns).items() if k in names}
    if kw.get("subgroup", "") is None:
        kw["subgroup"] = ""
    return ExperimentConfig(**kw)


# ---------------------------------------------------------------------------
# running

def _frac(x) -> str:
    return f"{x.numerator}/{x.denominator}" if isinstance(x, Fraction) and x.denominator != 1 else str(x)


def _param(name: str, fn, *args):
    try:
        return fn(*args)
    except NeumannLabError as exc:
        raise type(exc)(f"{name}: {exc}") from exc
    except ValueError as exc:
        raise ParseError(f"{name}: {exc}") from exc


def _seq(cfg):
    from .neumann import OddSequence
    return _param("--seq", OddSequence.parse, cfg.seq)


def _element(cfg):
    from .neumann import evaluate_word, tail
    from .permutation import WindowPerm
    seq = _seq(cfg)
    g = _param("--word", evaluate_word, seq, cfg.word)
    rows = []
    for j in range(1, g.m + 2):
        r = seq.r(j)
        rows.append({"word": cfg.word, "j": j, "radius": r,
                     "coordinate": str(WindowPerm(r, g.coord(j)).to_finsupp())})
    t = tail(g)
    checks = {"sigma_exp": g.sigma_exp, "m": g.m, "tail": str(t.alt_part), "tail_shift": t.shift_exp,
              "in_N": g.sigma_exp == 0, "in_U": g.sigma_exp == 0 and t.alt_part.is_identity()}
    return rows, checks


def _order(cfg):
    from .lattice import L, L_order_formula, parse_subgroup
    seq = _seq(cfg)
    if cfg.subgroup:
        H = _param("--H", parse_subgroup, seq, cfg.subgroup)
        return [{"subgroup": cfg.subgroup, "bound": H.bound, "order": H.order()}], {}
    o = L(seq, cfg.i).order()
    f = L_order_formula(seq, cfg.i)
    return [{"i": cfg.i, "order": o}], {"product_formula": f, "equals_formula": o == f}


def _folner(cfg):
    from .neumann import evaluate_word
    from .weiss import folner_boundary_ratio
    seq = _seq(cfg)
    g = _param("--gen", evaluate_word, seq, cfg.gen)
    rows, ok = [], True
    for i in range(cfg.i_min, cfg.i_max + 1):
        val = folner_boundary_ratio(seq, i, g, mode=cfg.mode, cap=cfg.cap)
        rows.append({"i": i, "n_i": seq.n(i), "gen": cfg.gen, "mode": cfg.mode, "ratio": _frac(val)})
        if cfg.gen.strip() == "s":
            ok &= val == Fraction(2, 2 * seq.r(i) - 1)
        elif cfg.gen.strip() == "t":
            ok &= val == 0
    checks = {"closed_form_agrees": ok} if cfg.gen.strip() in ("s", "t") else {}
    return rows, checks


def _weiss(cfg):
    from .lattice import parse_subgroup
    from .weiss import Estimate, weiss_report
    seq = _seq(cfg)
    H = _param("--H", parse_subgroup, seq, cfg.subgroup)
    reports = weiss_report(seq, H, cfg.probes, range(cfg.i_min, cfg.i_max + 1), cfg.samples, cfg.seed,
                           mode=cfg.mode, cap=cfg.cap)
    rows = []
    for rep in reports:
        for row in rep.rows:
            v = row.value
            if isinstance(v, Estimate):
                num, den = repr(v.mean), f"[{v.low!r},{v.high!r}]"
            else:
                num, den = str(v.numerator), str(v.denominator)
            rows.append({"probe": rep.probe, "i": row.i, "n_i": row.n_i, "mode": row.mode,
                         "value_num": num, "value_den_or_ci": den, "samples": row.samples, "seed": cfg.seed})
    checks = {rep.probe: {"non_increasing": rep.non_increasing, "dominated_by_1_minus_q": rep.dominated_by_q,
                          "expected_limit": rep.expected_limit} for rep in reports}
    return rows, checks


def _vershik(cfg):
    from .permutation import parse_cycles
    from .vershik import (
        ProbVector,
        SignSubgroup,
        degenerate_test,
        invariance_test,
        shift_structure_probability,
    )
    alpha = _param("--alpha", ProbVector.parse, cfg.alpha)
    S = _param("--s-basis", SignSubgroup.parse, cfg.s_basis, alpha.colors)
    if cfg.test == "shift":
        rows = []
        for M in cfg.windows:
            est = _param("--alpha", shift_structure_probability, alpha, cfg.k, M, cfg.samples, cfg.seed)
            rows.append({"k": cfg.k, "window": M, "samples": cfg.samples, "estimate": repr(est)})
        vals = [float(r["estimate"]) for r in rows]
        return rows, {"non_increasing_in_window": all(b <= a for a, b in zip(vals, vals[1:]))}
    if len(cfg.windows) != 1:
        raise ParseError("--window: this test takes a single radius")
    M = cfg.windows[0]
    if cfg.test == "degenerate":
        rep = degenerate_test(alpha, S, M, cfg.samples, cfg.seed)
        return [asdict(rep)], {"zero_mismatches": rep.mismatches == 0}
    probes = [_param("--probes", parse_cycles, p) for p in cfg.probes]
    conj = [_param("--conjugators", parse_cycles, p) for p in cfg.conjugators]
    res = invariance_test(alpha, S, probes, conj, M, cfg.samples, cfg.seed)
    rows = [asdict(r) for r in res]
    return rows, {"pairs": len(rows), "passing_at_0.01": sum(r.p_value >= 0.01 for r in res)}


def _defect(cfg):
    from .almosthom import defect, distance, perturb, probe_words, quotient_rep, word_pairs
    from .neumann import format_word
    seq = _seq(cfg)
    words = probe_words(cfg.probe_depth)
    f = _param("--seq", quotient_rep, seq, cfg.depth, words)
    g = perturb(f, cfg.epsilon, cfg.seed)
    n = f.degree
    rows = []
    for u, v in word_pairs(words, cfg.probe_depth):
        d = defect(g, [(u, v)])
        rows.append({"pair": f"{format_word(u)} | {format_word(v)}", "d_n": _frac(d)})
    gen_words = [w for w in words if len(w) == 1]
    gdist = distance(g, f, gen_words)
    dist_all = distance(g, f, words)
    gen_pairs = [(u, v) for u in gen_words for v in gen_words]
    gdef = defect(g, gen_pairs)
    total = defect(g, word_pairs(words, cfg.probe_depth))
    checks = {
        "degree": n,
        "genuine_defect": _frac(defect(f, word_pairs(words, cfg.probe_depth))),
        "generator_distance": _frac(gdist),
        "generator_distance_le_2eps_plus_2_over_n": float(gdist) <= 2 * cfg.epsilon + 2 / n,
        "generator_pair_defect": _frac(gdef),
        "max_defect": _frac(total),
        "max_defect_le_3_distance": total <= 3 * dist_all,
    }
    return rows, checks


_COMMANDS = {"element": _element, "order": _order, "folner": _folner, "weiss": _weiss,
             "vershik": _vershik, "defect": _defect}

_PARAM_OF = {SequenceExhausted: "--seq", EnumerationRefused: "--cap", WindowTooSmall: "--window"}


def _render(cfg: ExperimentConfig, rows: list[dict], checks: dict) -> str:
    if cfg.format == "json":
        env = {"command": cfg.command, "config": {k: v for k, v in asdict(cfg).items()},
               "rows": rows, "derived_checks": checks}
        return json.dumps(env, indent=2, sort_keys=True, default=str) + "\n"
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def run(cfg: ExperimentConfig) -> tuple[int, str]:
    """Execute a config; returns (exit status, report text or error message)."""
    try:
        rows, checks = _COMMANDS[cfg.command](cfg)
    except NeumannLabError as exc:
        name = next((p for t, p in _PARAM_OF.items() if isinstance(exc, t)), None)
        msg = str(exc)
        if name and not msg.startswith("--"):
            msg = f"{name}: {msg}"
        return exc.exit_code, f"error: {msg}\n"
    return 0, _render(cfg, rows, checks)


def main(argv: Sequence[str] | None = None) -> int:
    cfg = parse_config(sys.argv[1:] if argv is None else argv)
    status, text = run(cfg)
    if status:
        sys.stderr.write(text)
        return status
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
