"""Scenario execution behind the command-line commands.

Each command turns a `Scenario` into a list of report rows (dicts keyed by
`COLUMNS`) plus a dict of wall-clock timings. Rows contain only
deterministic numbers; timings are kept apart so the CSV is reproducible.
"""

import csv
import io
import time

import numpy as np

from .bidisk import BidiskScenario, approximate_bidisk, approximate_bidisk_entire
from .errors import ConfigError
from .runge import (A_REFERENCE, apply_E, apply_L, check_factor_margins, default_probe_circles,
                    delta_bracket, error_budget_L, holomorphy_residual, plan, plan_base, plan_E,
                    sup_error_E, sup_error_L, sup_norm_E)

COLUMNS = [
    "scenario", "command", "kind", "eps", "N", "n_hull",
    "sup_error", "error_witness", "error_budget", "budget_ok", "holomorphy_residual",
    "sup_norm", "k", "M", "g_sup", "C", "d", "A_reference", "frak_d", "frak_e", "lam",
    "log_delta_chain", "log_delta_eps", "log_delta_lower", "log_delta_upper", "bracket_ok",
    "sup_margin", "inf_margin", "margins_ok", "r", "R", "d1", "log_inf_b", "degenerate",
    "pitch", "density", "chain_density", "eval_density", "fitted_slope", "norm_slope",
]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, complex):
        return repr(v)
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in COLUMNS])
    return buf.getvalue()


def fitted_slope(eps, values):
    """Least-squares slope of log(value) against log(eps) (None for fewer than two points)."""
    if len(eps) < 2:
        return None
    return float(np.polyfit(np.log(eps), np.log(values), 1)[0])


def _row(sc, command, eps, **kw):
    cfg = sc.config
    row = {"scenario": sc.name, "command": command, "kind": sc.kind, "eps": eps,
           "pitch": cfg.pitch, "density": cfg.density, "A_reference": A_REFERENCE}
    if sc.kind in ("bidisk", "bidisk_entire"):
        row["eval_density"] = sc.eval_density
    row.update(kw)
    return row


def _base_fields(b):
    return {"k": b.k, "M": b.M, "g_sup": b.g_sup, "frak_d": b.frak_d, "frak_e": b.frak_e,
            "lam": b.lam, "log_delta_chain": b.log_delta_chain,
            "chain_density": b.config.chain_density}


def _bracket_fields(p):
    br = delta_bracket(p)
    return {"log_delta_eps": br.log_measured, "log_delta_lower": br.log_lower,
            "log_delta_upper": br.log_upper, "bracket_ok": br.ok}


def _hull_fields(ep):
    return {"n_hull": ep.n, "r": ep.r, "R": ep.R, "d1": ep.d1, "k": ep.k, "M": ep.M,
            "g_sup": ep.g_sup, "C": ep.C0, "chain_density": ep.config.chain_density}


class _Clock:
    def __init__(self):
        self.t = {}

    def __call__(self, key, fn, *a, **kw):
        t0 = time.perf_counter()
        out = fn(*a, **kw)
        self.t[key] = self.t.get(key, 0.0) + time.perf_counter() - t0
        return out


def _one_dim(sc):
    if sc.kind not in ("disk", "hull"):
        raise ConfigError(f"scenario kind {sc.kind!r} needs the 'bidisk' command")


def run_plan(sc, clock):
    _one_dim(sc)
    rows = []
    if sc.kind == "hull":
        for e in sc.eps:
            ep = clock(f"plan_E eps={e:g}", plan_E, sc.K, sc.U, sc.hulls, e, sc.config)
            rows.append(_row(sc, "plan", e, **_hull_fields(ep)))
        return rows
    base = clock("plan_base", plan_base, sc.K, sc.U, sc.config)
    for e in sc.eps:
        p = clock(f"plan eps={e:g}", plan, sc.K, sc.U, e, sc.config, base)
        fm = clock(f"margins eps={e:g}", check_factor_margins, p)
        rows.append(_row(sc, "plan", e, N=p.N, C=p.C, d=p.d, sup_margin=fm.sup_margin,
                         inf_margin=fm.inf_margin, margins_ok=fm.ok,
                         **_base_fields(base), **_bracket_fields(p)))
    return rows


def run_approx(sc, clock):
    _one_dim(sc)
    rows = []
    cfg = sc.config
    if sc.kind == "hull":
        for e in sc.eps:
            ep = clock(f"plan_E eps={e:g}", plan_E, sc.K, sc.U, sc.hulls, e, cfg)
            res = apply_E(ep, sc.function)
            err, wit = clock(f"error eps={e:g}", sup_error_E, res)
            sn = clock(f"sup_norm eps={e:g}", sup_norm_E, res)
            circles = default_probe_circles(ep.pair, sc.K, cfg.pitch, cfg.density)
            hr = clock(f"holomorphy eps={e:g}", holomorphy_residual, res, circles)
            rows.append(_row(sc, "approx", e, sup_error=err, error_witness=wit,
                             holomorphy_residual=max(hr), sup_norm=sn, **_hull_fields(ep)))
        return rows
    base = clock("plan_base", plan_base, sc.K, sc.U, cfg)
    circles = default_probe_circles(base.pair, sc.K, cfg.pitch, cfg.density)
    for e in sc.eps:
        p = clock(f"plan eps={e:g}", plan, sc.K, sc.U, e, cfg, base)
        res, _ = apply_L(p, sc.function)
        err, wit = clock(f"error eps={e:g}", sup_error_L, res)
        budget, _ = clock(f"budget eps={e:g}", error_budget_L, res)
        hr = clock(f"holomorphy eps={e:g}", holomorphy_residual, res.holomorphic_part, circles)
        rows.append(_row(sc, "approx", e, N=p.N, C=p.C, d=p.d, sup_error=err, error_witness=wit,
                         error_budget=budget, budget_ok=err <= budget,
                         holomorphy_residual=max(hr), **_base_fields(base),
                         **_bracket_fields(p)))
    return rows


def run_study(sc, clock):
    rows = run_approx(sc, clock)
    eps = [r["eps"] for r in rows]
    slope = fitted_slope(eps, [r["sup_error"] for r in rows])
    norm = None
    if sc.kind == "hull":
        # growth exponent of the sup-norm in 1/eps, to compare with d1
        s = fitted_slope(eps, [r["sup_norm"] for r in rows])
        norm = None if s is None else -s
    for r in rows:
        r["command"] = "study"
        r["fitted_slope"] = slope
        r["norm_slope"] = norm
    return rows


def run_bidisk(sc, clock):
    if sc.kind not in ("bidisk", "bidisk_entire"):
        raise ConfigError(f"the 'bidisk' command needs a bidisk scenario, got kind {sc.kind!r}")
    cfg = sc.config
    rows = []
    base1 = base2 = None
    if sc.kind == "bidisk":
        base1 = clock("plan_base z1", plan_base, sc.K, sc.U, cfg)
        same = sc.K == sc.K2 and sc.U == sc.U2
        base2 = base1 if same else clock("plan_base z2", plan_base, sc.K2, sc.U2, cfg)
    for e in sc.eps:
        s = BidiskScenario(sc.K, sc.K2, sc.U, sc.U2, sc.function, e, sc.m, cfg, sc.eval_density)
        if sc.kind == "bidisk":
            res = clock(f"plans eps={e:g}", approximate_bidisk, s, base1, base2)
        else:
            res = clock(f"plans eps={e:g}", approximate_bidisk_entire, s, sc.hulls, sc.hulls2)
        err, wit = clock(f"error eps={e:g}", res.sup_error)
        hr = clock(f"holomorphy eps={e:g}", res.holomorphy_residual)
        row = _row(sc, "bidisk", e, sup_error=err, error_witness=f"{wit[0]!r};{wit[1]!r}",
                   holomorphy_residual=max(hr), degenerate=res.degenerate)
        if sc.kind == "bidisk":
            row.update(N=res.op1.N, log_inf_b=res.log_inf_b(), k=base1.k, M=base1.M,
                       frak_e=base1.frak_e, chain_density=cfg.chain_density)
        else:
            row.update(n_hull=res.op1.n, r=res.op1.r, R=res.op1.R, d1=res.op1.d1)
        rows.append(row)
    slope = fitted_slope([r["eps"] for r in rows], [r["sup_error"] for r in rows])
    for r in rows:
        r["fitted_slope"] = slope
    return rows


COMMANDS = {"plan": run_plan, "approx": run_approx, "study": run_study, "bidisk": run_bidisk}
