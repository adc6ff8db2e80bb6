"""Command-line front end: ``blowuplab {profile,field,verify,norms,region,blowup}``.

Parameters come from built-in defaults, then an INI-style ``--config`` file
(``[common]`` plus one section per command), then command-line flags.
Exit codes: 0 pass, 1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis, field, region
from .io import write_csv, write_json
from .profile import BumpSpec, build_profile, ode_residual

log = logging.getLogger("blowuplab")


class UsageError(Exception):
    pass


def _floats(text):
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).replace(" ", "").split(",") if x]


def _bool(text):
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _qvalue(text):
    return math.inf if str(text).strip().lower() in ("inf", "infinity") else float(text)


BUMP = {
    "kind": (str, "standard_mollifier", "bump kind: standard_mollifier | scaled_polynomial"),
    "amplitude": (float, 1.0, "bump amplitude (0 needs --allow-degenerate)"),
    "exponent": (int, 4, "polynomial bump exponent"),
    "allow_degenerate": (_bool, False, "accept the zero bump"),
}
CONFIG = {"T": (float, 0.5, "blow-up time, 0 < T <= 1/2"),
          "alpha": (float, 0.5, "weight exponent in [0, 3)")}

PARAMS = {
    "profile": BUMP | {
        "r_max": (float, 3.0, "tabulation range"),
        "n_points": (int, 1024, "tabulation points"),
    },
    "field": BUMP | CONFIG | {
        "n_r": (int, 32, "radial samples on [0, 1]"),
        "n_x3": (int, 1, "axial samples on [0, 1]"),
        "n_t": (int, 8, "time samples on [0, t_max]"),
        "t_max": (float, None, "last sample time (default T - 1e-3)"),
        "theta": (float, 0.0, "azimuth of the sample plane"),
    },
    "verify": BUMP | CONFIG | {
        "pde_grid": (_floats, [128, 128], "base (n_r, n_t) of the residual study"),
        "levels": (int, 4, "refinement levels"),
        "drop_radial_term": (_bool, False, "debug: omit the (1/r) d_r term"),
    },
    "norms": BUMP | CONFIG | {
        "p": (_floats, [1.0, 2.0], "spatial exponents"),
        "window": (_floats, [1e-6, 1e-2], "T - t window"),
        "n_times": (int, 12, "samples in the window"),
    },
    "region": {
        "q": (_qvalue, 10.0, "time exponent (inf allowed)"),
        "p": (float, 1.0, "space exponent"),
        "k_order": (int, 1, "blow-up order"),
        "alpha": (float, None, "fixed alpha for the sweep (default: any in [k-1, k))"),
        "q_bounds": (_floats, [1.0, 10.0], "sweep range in q"),
        "p_bounds": (_floats, [1.0, 3.0], "sweep range in p"),
        "resolution": (int, 101, "sweep points per axis"),
    },
    "blowup": BUMP | CONFIG | {
        "window": (_floats, [1e-6, 1e-2], "T - t window"),
        "n_times": (int, 16, "samples in the window"),
    },
}


def _resolve(command, args):
    cfgfile = configparser.ConfigParser()
    cfgfile.optionxform = str
    if args.config:
        if not Path(args.config).is_file():
            raise UsageError(f"config file not found: {args.config}")
        try:
            cfgfile.read(args.config, encoding="utf-8")
        except configparser.Error as exc:
            raise UsageError(f"bad config file: {exc}") from None
    known = PARAMS[command]
    values = {k: spec[1] for k, spec in known.items()}
    for section in ("common", command):
        if cfgfile.has_section(section):
            for key, raw in cfgfile.items(section):
                if key in ("tol", "out", "jobs"):
                    continue
                if key not in known:
                    if section == command:
                        raise UsageError(f"unknown key {key!r} in [{section}]")
                    continue
                try:
                    values[key] = known[key][0](raw)
                except ValueError as exc:
                    raise UsageError(f"[{section}] {key}: {exc}") from None
    for key in known:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    common = {}
    for key, conv, default in (("tol", float, 1e-10), ("jobs", int, os.cpu_count() or 1)):
        v = getattr(args, key)
        if v is None and cfgfile.has_option("common", key):
            v = conv(cfgfile.get("common", key))
        common[key] = default if v is None else v
    out = os.environ.get("BLOWUPLAB_OUT") or args.out
    if out is None and cfgfile.has_option("common", "out"):
        out = cfgfile.get("common", "out")
    common["out"] = Path(out or "blowuplab_out")
    if not common["tol"] > 0:
        raise UsageError("--tol must be positive")
    if common["jobs"] < 1:
        raise UsageError("--jobs must be >= 1")
    return values, common


def _bump(v):
    try:
        spec = BumpSpec(kind=v["kind"], amplitude=v["amplitude"], exponent=v["exponent"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if spec.degenerate and not v["allow_degenerate"]:
        raise UsageError("zero amplitude is degenerate; pass --allow-degenerate")
    return spec


def _config(v, tol):
    spec = _bump(v)
    try:
        return field.make_config(T=v["T"], alpha=v["alpha"], bump=spec, tol=tol,
                                 allow_degenerate=v["allow_degenerate"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _window(w):
    if len(w) != 2 or not 0 < w[0] < w[1]:
        raise UsageError("window needs two increasing positive values")
    if math.log10(w[1] / w[0]) < 3 - 1e-9:
        raise UsageError("window must span at least three decades of T - t")
    return (w[0], w[1])


# ---------------------------------------------------------------------------

def cmd_profile(v, common):
    tol = common["tol"]
    spec = _bump(v)
    try:
        prof = build_profile(spec, r_max=v["r_max"], n_points=v["n_points"], tol=tol,
                             allow_degenerate=v["allow_degenerate"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    r = prof.r_grid[prof.r_grid >= 1e-3]
    res = np.abs(ode_residual(prof, r))
    far = prof.r_grid[prof.r_grid >= 1.0]
    far_err = float(np.max(np.abs(prof.evaluate(far) + prof.beta / far)))
    bound = 100 * tol
    verdict = float(res.max()) <= bound and far_err <= tol
    out = common["out"]
    prof.to_csv(out / "profile.csv")
    write_json(out / "profile_report.json", {
        "suite": "profile_ode",
        "params": {"kind": spec.kind, "amplitude": spec.amplitude, "exponent": spec.exponent,
                   "r_max": v["r_max"], "n_points": v["n_points"], "tol": tol},
        "thresholds": {"ode_residual_max": bound, "far_field_max": tol},
        "measurements": [{"ode_residual_max": float(res.max()),
                          "ode_residual_rms": float(np.sqrt(np.mean(res**2))),
                          "far_field_max": far_err, "beta": prof.beta, "g0": prof.g0}],
        "verdict": "pass" if verdict else "fail",
    })
    return verdict


def cmd_field(v, common):
    cfg = _config(v, common["tol"])
    t_max = cfg.T - 1e-3 if v["t_max"] is None else v["t_max"]
    if t_max >= cfg.T:
        raise UsageError("t_max must be strictly less than T")
    if min(v["n_r"], v["n_x3"], v["n_t"]) < 1:
        raise UsageError("grid sizes must be positive")
    r = np.linspace(0.0, 1.0, v["n_r"]) if v["n_r"] > 1 else np.array([0.0])
    x3 = np.linspace(0.0, 1.0, v["n_x3"]) if v["n_x3"] > 1 else np.array([0.0])
    ts = np.linspace(0.0, t_max, v["n_t"]) if v["n_t"] > 1 else np.array([0.0])
    th = v["theta"]
    rows = []
    for t in ts:
        vt = np.asarray(field.v_theta(cfg, r, t))
        h1 = np.asarray(field.forcing_h1(cfg, r, t))
        h = np.asarray(field.forcing_h(cfg, r, t))
        pres = field.pressure_profile(cfg, r, t, common["tol"]) if r[0] == 0 else None
        for i, ri in enumerate(r):
            p_i = pres[i] if pres is not None else field.pressure(cfg, ri, t)
            for z in x3:
                rows.append((ri, z, t, -math.sin(th) * vt[i] + 0.0, math.cos(th) * vt[i] + 0.0, 0.0,
                             vt[i], h1[i], p_i, h[i]))
    write_csv(common["out"] / "field.csv",
              ["r", "x3", "t", "v1", "v2", "v3", "v_theta", "h1", "P", "h"], rows)
    return True


def _suite(name, params, tol, drop):
    cfg = _config(params, tol)
    if name == "verify_pde":
        grid = tuple(int(x) for x in params["pde_grid"])
        return analysis.verify_pde(cfg, grid, levels=params["levels"], drop_first_order=drop)
    if name == "verify_bounds":
        return analysis.verify_bounds(cfg)
    if name == "energy":
        return analysis.energy_report(cfg)
    if name == "blowup":
        return analysis.blowup_report(cfg)
    if name == "stokes":
        return analysis.stokes_check(cfg)
    if name == "boundary":
        return analysis.boundary_check(cfg)
    raise KeyError(name)


SUITES = ("verify_pde", "verify_bounds", "energy", "blowup", "stokes", "boundary")


def cmd_verify(v, common):
    _config(v, common["tol"])
    grid = v["pde_grid"]
    if len(grid) != 2 or min(grid) < 4 or v["levels"] < 3:
        raise UsageError("pde_grid needs two sizes >= 4 and levels >= 3")
    args = [(name, v, common["tol"], v["drop_radial_term"]) for name in SUITES]
    if common["jobs"] > 1:
        with ProcessPoolExecutor(max_workers=min(common["jobs"], len(SUITES))) as pool:
            reports = list(pool.map(_suite, *zip(*args)))
    else:
        reports = [_suite(*a) for a in args]
    out = common["out"]
    summary = []
    for name, rep in zip(SUITES, reports):
        write_json(out / f"{name}.json", rep.to_dict())
        summary.append({"suite": name, "verdict": "pass" if rep.verdict else "fail"})
        log.info("%-14s %s", name, "pass" if rep.verdict else "FAIL")
    ok = all(r.verdict for r in reports)
    write_json(out / "summary.json", {"suites": summary, "verdict": "pass" if ok else "fail"})
    return ok


def _series_csv(path, series, T):
    write_csv(path, ["t", "T_minus_t", "value"],
              [(t, T - t, val) for t, val in zip(series.times, series.values)])


def cmd_norms(v, common):
    cfg = _config(v, common["tol"])
    window = _window(v["window"])
    if v["n_times"] < 8:
        raise UsageError("n_times must be at least 8")
    if any(p < 1 for p in v["p"]):
        raise UsageError("p values must be >= 1")
    out = common["out"]
    entries = []
    ok = True
    for p in v["p"]:
        scal, s_series = analysis.scaling_report(cfg, p, window, v["n_times"])
        _series_csv(out / f"weighted_h_p{p:g}.csv", s_series, cfg.T)
        entry = {"p": p, "weighted_h": scal.to_dict()}
        ok = ok and scal.verdict
        if 1 + p * cfg.alpha - p > -1 or cfg.alpha == 0:
            lem, l_series = analysis.lemma_report(cfg, p, window, v["n_times"])
            _series_csv(out / f"h1_p{p:g}.csv", l_series, cfg.T)
            entry["h1"] = lem.to_dict()
            ok = ok and lem.verdict
        else:
            entry["h1"] = {"verdict": "not_integrable"}
        times = cfg.T - np.geomspace(window[1], window[0], v["n_times"])
        vt = analysis.norm_series(cfg, "phi_tilde", times, p)
        _series_csv(out / f"phi_tilde_p{p:g}.csv", vt, cfg.T)
        pred = analysis.predicted_vtilde_exponent(p, cfg.alpha)
        entry["phi_tilde"] = {
            "fit": analysis.fit_power(vt, cfg.T)._asdict() if np.all(vt.values > 0) else None,
            "predicted_growth": pred.exponent, "logarithmic": pred.logarithmic,
        }
        entries.append(entry)
    write_json(out / "norms_report.json", {
        "suite": "norms", "params": {"T": cfg.T, "alpha": cfg.alpha, "window": list(window)},
        "measurements": entries, "verdict": "pass" if ok else "fail"})
    return ok


def cmd_region(v, common):
    q, p, k = v["q"], v["p"], v["k_order"]
    if k not in (1, 2, 3) or q < 1 or p < 1:
        raise UsageError("need q >= 1, p >= 1, k_order in 1..3")
    alpha = v["alpha"]
    if alpha is not None and region.blowup_order(alpha) != k:
        raise UsageError("alpha is not in [k-1, k)")
    if len(v["q_bounds"]) != 2 or len(v["p_bounds"]) != 2:
        raise UsageError("bounds need two values")
    sw = region.sweep(tuple(v["q_bounds"]), tuple(v["p_bounds"]), v["resolution"],
                      alpha=alpha, k_order=None if alpha is not None else k)
    out = common["out"]
    write_csv(out / "region.csv", ["q", "p", "admissible"], sw.rows())
    write_csv(out / "frontier.csv", ["q", "p"], sw.frontier)
    diag = region.sup_diagonal(1)
    window = region.alpha_window(q, p, k)
    payload = {
        "query": {"q": q, "p": p, "k_order": k, "alpha": alpha},
        "sup_p": {"value": region.sup_p(q, k).value, "open": True},
        "sup_p_q1": {"value": region.sup_p(1.0).value, "open": True},
        "sup_diagonal": {"value": diag.value, "open": diag.open,
                         "golden_ratio": region.GOLDEN},
        "diagonal_criticality": region.criticality(diag.value, diag.value),
        "alpha_window": None if window is None else {
            "lo": window.lo, "hi": window.hi, "lo_open": window.lo_open,
            "hi_open": window.hi_open},
        "criticality": region.criticality(q, p),
    }
    ok = abs(diag.value - region.GOLDEN) <= 1e-6
    if k in (1, 2):
        inf = region.criticality_infimum(k)
        payload["infimum"] = inf.to_dict()
        payload["gap"] = inf.value - 2.0
        ok = ok and inf.oracle_agreement <= 1e-4 and inf.value > 2.0
    write_json(out / "region.json", payload)
    return ok


def cmd_blowup(v, common):
    cfg = _config(v, common["tol"])
    window = _window(v["window"])
    if v["n_times"] < 8:
        raise UsageError("n_times must be at least 8")
    rep = analysis.blowup_report(cfg, window, v["n_times"])
    meas = rep.measurements[0]
    write_csv(common["out"] / "blowup_series.csv", ["t", "T_minus_t", "value"],
              [(m["t"], m["T_minus_t"], m["value"]) for m in meas["sup_series"]])
    write_json(common["out"] / "blowup.json", rep.to_dict())
    return rep.verdict


COMMANDS = {"profile": cmd_profile, "field": cmd_field, "verify": cmd_verify,
            "norms": cmd_norms, "region": cmd_region, "blowup": cmd_blowup}


def _add_flag(sub, key, spec):
    conv, _, help_text = spec
    flag = "--" + key.replace("_", "-")
    if conv is _bool:
        sub.add_argument(flag, dest=key, action="store_const", const=True, default=None,
                         help=help_text)
    else:
        sub.add_argument(flag, dest=key, type=conv, default=None, help=help_text)


def build_parser():
    parser = argparse.ArgumentParser(prog="blowuplab", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)
    for name, params in PARAMS.items():
        sub = subs.add_parser(name, help=COMMANDS[name].__name__)
        sub.add_argument("--config", help="INI file with [common] and per-command sections")
        sub.add_argument("--out", help="output directory (BLOWUPLAB_OUT overrides)")
        sub.add_argument("--tol", type=float, help="absolute quadrature tolerance")
        sub.add_argument("--seedless", action="store_true",
                         help="reserved; every computation is deterministic")
        sub.add_argument("--jobs", type=int, help="worker processes (default: all cores)")
        sub.add_argument("-v", "--verbose", action="store_true")
        for key, spec in params.items():
            _add_flag(sub, key, spec)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s")
    try:
        values, common = _resolve(args.command, args)
        ok = COMMANDS[args.command](values, common)
    except UsageError as exc:
        print(f"blowuplab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
