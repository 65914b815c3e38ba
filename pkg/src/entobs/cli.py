"""``entobs`` command-line front end.

Exit codes: 0 success, 1 verification failure, 2 invalid input or config,
3 I/O failure.
"""

import argparse
import io
import json
import math
import sys

import numpy as np

from . import report as report_mod
from . import verify as verify_mod
from .entanglement import Variant, family_negativity, negativity_oracle
from .errors import EntobsError
from .evolution import DEFAULT_SEED, FIGURES, _MIXED_MEMBERS, calibrate_time_scale, compute_surface, \
    default_grids
from .spin import FORM_PARAMS, PARAM_ALIASES
from .states import (FAMILY_WEIGHTS, FamilyParams, MixedInitialState, PureInitialState, build_family,
                     mixed_initial, pure_initial, validate_density_matrix)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3
SURFACE_HEADER = "theta,time,T,Sz,S2,s11,s12,N_oracle,N_printed,N_corrected"


class InputError(Exception):
    """Bad state file, config file or option value (exit 2)."""


# -- JSON helpers ---------------------------------------------------------------


def _line_of(text: str, key: str) -> int:
    pos = text.find(f'"{key}"')
    return text.count("\n", 0, pos) + 1 if pos >= 0 else 1


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        return json.loads(text), text
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc


def _check_keys(obj, allowed, required, where, path, text):
    if not isinstance(obj, dict):
        raise InputError(f"{path}:{_line_of(text, where)}: '{where}' must be an object")
    for key in obj:
        if key not in allowed:
            raise InputError(f"{path}:{_line_of(text, key)}: unknown key '{key}' in '{where}'")
    for key in required:
        if key not in obj:
            raise InputError(f"{path}:{_line_of(text, where)}: '{where}' is missing '{key}'")


def _number(obj, key, path, text):
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise InputError(f"{path}:{_line_of(text, key)}: '{key}' must be a finite number")
    return float(val)


def parse_state(path: str):
    """Read a StateSpec file into ``(label, DensityMatrix, FamilyParams | None)``."""
    spec, text = _load_json(path)
    if not isinstance(spec, dict):
        raise InputError(f"{path}:1: state spec must be a JSON object")
    variants = [k for k in spec if k in ("family", "pure", "mixed", "raw")]
    for key in spec:
        if key not in ("family", "pure", "mixed", "raw"):
            raise InputError(f"{path}:{_line_of(text, key)}: unknown key '{key}'")
    if len(variants) != 1:
        raise InputError(f"{path}:1: exactly one of family/pure/mixed/raw is required, got {len(variants)}")
    kind = variants[0]
    body = spec[kind]
    line = _line_of(text, kind)
    try:
        if kind == "family":
            fid = body.get("id") if isinstance(body, dict) else None
            if fid not in FAMILY_WEIGHTS:
                raise InputError(f"{path}:{line}: family 'id' must be an integer 1..6")
            weights = FAMILY_WEIGHTS[fid]
            _check_keys(body, {"id", "v", "alpha", *weights}, {"v", *weights}, kind, path, text)
            vals = {k: _number(body, k, path, text) for k in body if k != "id"}
            p = FamilyParams(fid, **vals)
            return f"family {fid}", build_family(p), p
        if kind == "pure":
            _check_keys(body, {"kind", "theta", "alpha"}, {"kind", "theta"}, kind, path, text)
            alpha = _number(body, "alpha", path, text) if "alpha" in body else None
            st = PureInitialState(body["kind"], _number(body, "theta", path, text), alpha)
            return f"pure {st.kind.value}", pure_initial(st), None
        if kind == "mixed":
            _check_keys(body, {"kind", "theta"}, {"kind", "theta"}, kind, path, text)
            st = MixedInitialState(body["kind"], _number(body, "theta", path, text))
            return f"mixed {st.kind}", mixed_initial(st), None
        entries = body
        if not isinstance(entries, list) or len(entries) != 16 or not all(
                isinstance(e, list) and len(e) == 2 and all(
                    isinstance(x, (int, float)) and not isinstance(x, bool) for x in e) for e in entries):
            raise InputError(f"{path}:{line}: 'raw' must list 16 [re, im] pairs, row-major")
        m = np.array([complex(re, im) for re, im in entries]).reshape(4, 4)
        return "raw", validate_density_matrix(m), None
    except InputError:
        raise
    except (EntobsError, ValueError, TypeError) as exc:
        raise InputError(f"{path}:{line}: invalid {kind} state: {exc}") from exc


CONFIG_KEYS = {
    "surface": {"figure", "theta_steps", "time_steps", "t_max", "member", "params", "out"},
    "verify": {"suite", "trials", "seed", "tol", "theta_steps", "time_steps"},
    "report": {"seed", "samples", "out"},
}


def load_config(path: str, command: str) -> dict:
    """RunConfig file: a flat JSON object whose keys mirror the command's options."""
    cfg, text = _load_json(path)
    if not isinstance(cfg, dict):
        raise InputError(f"{path}:1: config must be a JSON object")
    _check_keys(cfg, CONFIG_KEYS[command] | {"command"}, (), "config", path, text)
    if cfg.get("command", command) != command:
        raise InputError(f"{path}:{_line_of(text, 'command')}: config is for '{cfg['command']}'")
    cfg.pop("command", None)
    return cfg


def _merge(args, command: str) -> dict:
    cfg = load_config(args.config, command) if args.config else {}
    for key in CONFIG_KEYS[command]:
        val = getattr(args, key, None)
        if val is None:
            continue
        if key == "params" and isinstance(cfg.get("params"), dict):
            cfg["params"] = {**cfg["params"], **val}
        else:
            cfg[key] = val
    return cfg


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise InputError(f"--param expects k=v, got {item!r}")
        try:
            out[PARAM_ALIASES.get(key.strip(), key.strip())] = float(val)
        except ValueError as exc:
            raise InputError(f"--param {key}: {val!r} is not a number") from exc
    return out


def _positive_int(cfg, key, default, minimum):
    val = cfg.get(key, default)
    if isinstance(val, bool) or not isinstance(val, int) or val < minimum:
        raise InputError(f"{key.replace('_', '-')} must be an integer >= {minimum}, got {val!r}")
    return val


def _positive_float(cfg, key, default):
    val = cfg.get(key, default)
    if val is None:
        return None
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not val > 0 or not math.isfinite(val):
        raise InputError(f"{key.replace('_', '-')} must be a positive number, got {val!r}")
    return float(val)


def _write(path: str, text: str) -> None:
    try:
        if path == "-":
            sys.stdout.write(text)
            return
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"{path}: cannot write ({exc.strerror})") from exc


# -- commands -------------------------------------------------------------------


def cmd_negativity(args) -> int:
    label, rho, params = parse_state(args.state)
    oracle = negativity_oracle(rho)
    print(f"state: {label}")
    print(f"oracle_negativity: {oracle:.17g}")
    if params is not None:
        printed = family_negativity(params, Variant.AS_PRINTED)
        corrected = family_negativity(params, Variant.CORRECTED)
        print(f"printed_negativity: {printed:.17g}")
        print(f"corrected_negativity: {corrected:.17g}")
        print(f"printed_deviation: {abs(printed - oracle):.17g}")
    return EXIT_OK


def surface_csv(figure_id: int, theta_steps: int = 101, time_steps: int = 101, params: dict | None = None,
                member: int | None = None, t_max: float = np.pi) -> str:
    """CSV text for one figure surface; the ``surface`` command writes exactly this."""
    kappa = calibrate_time_scale(figure_id, params, member)
    thetas, times = default_grids(figure_id, kappa, theta_steps, time_steps, t_max)
    surf = compute_surface(figure_id, thetas, times, params, member, kappa)
    cols = [surf.sz, surf.s2, surf.s11, surf.s12, surf.n_oracle, surf.n_printed, surf.n_corrected]
    T = surf.T
    buf = io.StringIO()
    buf.write(SURFACE_HEADER + "\n")
    for i, th in enumerate(surf.thetas):
        for j, t in enumerate(surf.times):
            vals = [th, t, T[j]] + [c[i, j] for c in cols]
            buf.write(",".join(format(float(v), ".17g") for v in vals) + "\n")
    return buf.getvalue()


def cmd_surface(args) -> int:
    cfg = _merge(args, "surface")
    fid = cfg.get("figure")
    if fid not in FIGURES:
        raise InputError(f"figure must be 1..8, got {fid!r}")
    theta_steps = _positive_int(cfg, "theta_steps", 101, 2)
    time_steps = _positive_int(cfg, "time_steps", 101, 2)
    t_max = _positive_float(cfg, "t_max", np.pi)
    member = cfg.get("member")
    if member is not None and member not in _MIXED_MEMBERS.get(fid, ()):
        raise InputError(f"figure {fid} has no member {member!r}")
    params = cfg.get("params") or {}
    if not isinstance(params, dict):
        raise InputError("params must be an object of name -> number")
    allowed = set(FORM_PARAMS[FIGURES[fid].form])
    for key, val in params.items():
        if key not in allowed:
            raise InputError(f"figure {fid} ({FIGURES[fid].form.value}) takes {sorted(allowed)}, not {key!r}")
        if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
            raise InputError(f"parameter {key} must be a finite number")
    if "out" not in cfg:
        raise InputError("surface needs --out")
    text = surface_csv(fid, theta_steps, time_steps, params, member, t_max)
    _write(cfg["out"], text)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _merge(args, "verify")
    suite = cfg.get("suite", "all")
    if suite not in verify_mod.SUITES:
        raise InputError(f"unknown suite {suite!r}; choose from {', '.join(verify_mod.SUITES)}")
    trials = _positive_int(cfg, "trials", 0, 0) or None
    seed = _positive_int(cfg, "seed", DEFAULT_SEED, 0)
    tol = _positive_float(cfg, "tol", None)
    reports = verify_mod.run_suite(suite, trials, seed, tol, _positive_int(cfg, "theta_steps", 101, 2),
                                   _positive_int(cfg, "time_steps", 101, 2))
    print(f"suite: {suite}  seed: {seed}")
    print(verify_mod.format_table(reports))
    failed = [r for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} claims passed")
    return EXIT_OK if not failed else EXIT_FAIL


def cmd_report(args) -> int:
    cfg = _merge(args, "report")
    seed = _positive_int(cfg, "seed", DEFAULT_SEED, 0)
    samples = _positive_int(cfg, "samples", 50, 1)
    rows, summary = report_mod.build_report(seed, samples)
    if "out" in cfg:
        _write(cfg["out"], report_mod.render_csv(rows))
    print(report_mod.render_summary(summary))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entobs", description="Two-qubit negativity from spin observables.")
    sub = p.add_subparsers(dest="command", required=True)

    neg = sub.add_parser("negativity", help="negativity of a state given as JSON")
    neg.add_argument("--state", required=True, help="StateSpec JSON file")
    neg.set_defaults(func=cmd_negativity)

    srf = sub.add_parser("surface", help="write a figure surface as CSV")
    srf.add_argument("--config", help="RunConfig JSON file")
    srf.add_argument("--figure", type=int)
    srf.add_argument("--theta-steps", dest="theta_steps", type=int)
    srf.add_argument("--time-steps", dest="time_steps", type=int)
    srf.add_argument("--t-max", dest="t_max", type=float, help="largest scaled time T (default pi)")
    srf.add_argument("--member", type=int, help="mixed figures: which initial mixture (3/4 or 5/6)")
    srf.add_argument("--param", action="append", metavar="K=V", help="Hamiltonian parameter override")
    srf.add_argument("--out", help="output CSV path ('-' for stdout)")
    srf.set_defaults(func=cmd_surface)

    ver = sub.add_parser("verify", help="run verification suites")
    ver.add_argument("--config", help="RunConfig JSON file")
    ver.add_argument("--suite", choices=verify_mod.SUITES)
    ver.add_argument("--trials", type=int)
    ver.add_argument("--seed", type=int)
    ver.add_argument("--tol", type=float)
    ver.add_argument("--theta-steps", dest="theta_steps", type=int)
    ver.add_argument("--time-steps", dest="time_steps", type=int)
    ver.set_defaults(func=cmd_verify)

    rep = sub.add_parser("report", help="discrepancy report")
    rep.add_argument("--config", help="RunConfig JSON file")
    rep.add_argument("--out", help="CSV path for the per-point records")
    rep.add_argument("--seed", type=int)
    rep.add_argument("--samples", type=int)
    rep.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    if getattr(args, "param", None) is not None:
        try:
            args.params = _parse_params(args.param)
        except InputError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (EntobsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
