"""``prevadim`` command-line interface.

Every artifact embeds the resolved experiment spec: a ``# spec: {...}`` header
line in CSV files, a ``"spec"`` key in JSON reports. The spec carries the full
argument vector, so ``prevadim <spec.argv>`` reproduces the payload.

Exit status: 0 success / pass, 1 verification failure, 2 usage or config error.
"""

import argparse
import csv
import json
import math
import os
import re
import sys

import numpy as np

from . import __version__
from .errors import ConfigError, ConstructionError, PrevadimError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------- config

def _scalar(text):
    text = text.strip()
    try:
        return json.loads(text)
    except ValueError:
        pass
    if "," in text:
        return [_scalar(t) for t in text.split(",") if t.strip()]
    return text


def parse_config_text(text):
    """JSON object, or key=value pairs (one per line or comma/semicolon separated)."""
    text = text.strip()
    if text.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError("config", f"invalid JSON: {e}") from None
    out = {}
    for line in re.split(r"[;\n]|,(?=\s*[A-Za-z_]\w*\s*=)", text):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("config", f"expected key=value, got {line!r}")
        k, v = line.split("=", 1)
        out[k.strip()] = _scalar(v)
    return out


def load_config(arg, default):
    """CantorConfig from a file path, inline text, or the command's default."""
    from .cantor import CantorConfig
    if arg is None:
        return default
    if os.path.exists(arg):
        with open(arg) as fh:
            data = parse_config_text(fh.read())
    elif "=" in arg or arg.lstrip().startswith("{"):
        data = parse_config_text(arg)
    else:
        raise ConfigError("config", f"no such file: {arg}")
    if not isinstance(data, dict):
        raise ConfigError("config", "must be an object of fields")
    if isinstance(data.get("branching"), list) and data.get("max_depth") is None:
        data["max_depth"] = len(data["branching"])
    # partial configs override the command's default construction
    data.setdefault("max_depth", default.max_depth)
    return CantorConfig.from_dict(data)


def _tower_default():
    from .cantor import CantorConfig
    return CantorConfig.tower(2)


def _energy_default():
    from .cantor import CantorConfig
    from .lemmas import ENERGY_DEPTH
    return CantorConfig.tower(ENERGY_DEPTH)


# ---------------------------------------------------------------- output

def _spec(args, config=None, **params):
    d = {"command": args.command, "version": __version__, "seed": args.seed,
         "partitions": args.partitions, "argv": args.argv}
    if config is not None:
        d["config"] = config.to_dict()
    d.update(params)
    return d


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not JSON serialisable: {type(o)}")


def write_json(path, payload):
    text = json.dumps(payload, indent=2, default=_json_default, sort_keys=False)
    if path in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def write_csv(path, spec, header, rows):
    fh = sys.stdout if path in (None, "-") else open(path, "w", newline="")
    try:
        fh.write("# spec: " + json.dumps(spec, default=_json_default) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(v) for v in r])
    finally:
        if fh is not sys.stdout:
            fh.close()


def read_spec(path):
    """The embedded spec of a CSV or JSON artifact."""
    with open(path) as fh:
        first = fh.readline()
        if first.startswith("# spec: "):
            return json.loads(first[len("# spec: "):])
        fh.seek(0)
        return json.load(fh)["spec"]


def _rng(args, *key):
    from .labeling import make_rng
    return make_rng(args.seed, *key)


# ---------------------------------------------------------------- commands

def cmd_construct(args):
    from .cantor import build_levels
    cfg = load_config(args.config, _tower_default())
    lv = build_levels(cfg)
    spec = _spec(args, cfg)
    if args.report:
        write_csv(args.out, spec, ["k", "m_k", "c_k", "L_k"], lv.table())
    else:
        write_json(args.out, {"spec": spec, "levels": [
            {"k": k, "m_k": m, "c_k": c, "L_k": L} for k, m, c, L in lv.table()],
            "tv_bound": lv.tv_bound(), "tower_exact": cfg.is_tower_exact})
    return EXIT_OK


def _witness_for(args, cfg, dim=1):
    from .cantor import build_levels
    from .witness import witness
    return witness(build_levels(cfg), args.seed, dim=dim)


def cmd_sample_fn(args):
    from .functions import parse_fn_spec
    cfg = load_config(args.config, _tower_default())
    if args.surface:
        n = args.surface
        w2 = _witness_for(args, cfg, dim=2)
        f = parse_fn_spec(args.fn or "zero", 2, w2)
        g = w2 + f if f is not w2 else w2
        t = np.linspace(0.0, 1.0, n)
        h = g.on_grid(n)
        rows = ((t[i], t[j], h[i, j]) for i in range(n) for j in range(n))
        spec = _spec(args, cfg, surface=n, fn=args.fn or "zero")
        write_csv(args.out, spec, ["x", "y", "value"], rows)
        return EXIT_OK
    n = args.grid
    w = _witness_for(args, cfg)
    g = parse_fn_spec(args.fn, 1, w) if args.fn else w
    x = np.linspace(0.0, 1.0, n)
    spec = _spec(args, cfg, grid=n, fn=args.fn or "phi")
    write_csv(args.out, spec, ["x", "phi" if args.fn is None else "value"], zip(x, g(x)))
    return EXIT_OK


def cmd_boxdim(args):
    from .boxcount import box_dimension, clamped_window, parse_scales, witness_dimension
    from .cantor import build_levels
    from .functions import parse_fn_spec
    cfg = load_config(args.config, _tower_default())
    w = _witness_for(args, cfg, dim=args.dim)
    g = parse_fn_spec(args.input, args.dim, w)
    if args.scales == "auto":
        if g is w and args.dim == 1:
            fit = witness_dimension(w, exact=not args.sampled, samples_per_column=args.spc)
        else:
            scales, note = clamped_window(build_levels(cfg))
            fit = box_dimension(g, scales, args.spc, (min(scales), max(scales)), note)
    else:
        scales = parse_scales(args.scales)
        fit = box_dimension(g, scales, args.spc, (min(scales), max(scales)), "user scales")
    spec = _spec(args, cfg, input=args.input, scales=args.scales, spc=args.spc, dim=args.dim,
                 slope=fit.slope, r2=fit.r2, window=fit.window, window_note=fit.window_note)
    write_csv(args.out, spec, ["delta", "count", "log_inv_delta", "log_count"], fit.rows())
    print(f"slope {fit.slope:.6f}  r2 {fit.r2:.6f}  ({len(fit.scales)} scales)", file=sys.stderr)
    return EXIT_OK


def cmd_energy(args):
    from .cantor import build_levels, sample_nu
    from .energy import energy_mc, graph_energy, uniform_sampler
    from .functions import parse_fn_spec
    rng = _rng(args, 1)
    cfg = None
    if args.measure == "uniform":
        est = energy_mc(uniform_sampler, args.s, args.pairs, rng, args.partitions, seed=args.seed)
    elif args.measure == "nu":
        cfg = load_config(args.config, _energy_default())
        lv = build_levels(cfg)
        est = energy_mc(lambda r, m: sample_nu(lv, r, m), args.s, args.pairs, rng,
                        args.partitions, seed=args.seed)
    else:
        cfg = load_config(args.config, _energy_default())
        w = _witness_for(args, cfg)
        f = parse_fn_spec(args.fn, 1, w)
        eps = 1.0 - args.s / 2.0
        est = graph_energy(w, f, eps, args.pairs, rng, args.partitions, seed=args.seed)
    payload = est.to_dict()
    payload["diverging"] = est.diverging
    payload["spec"] = _spec(args, cfg, s=args.s, pairs=args.pairs, measure=args.measure,
                            fn=args.fn if args.measure == "graph" else None)
    write_json(args.out, payload)
    return EXIT_OK


def _report_exit(rep, args, cfg=None, **params):
    from .lemmas import FAIL
    payload = rep.to_dict()
    payload["spec"] = _spec(args, cfg, **params)
    write_json(args.out, payload)
    print(f"{rep.lemma}: {rep.status} ({len(rep.rows)} rows)", file=sys.stderr)
    return EXIT_FAIL if rep.status == FAIL else EXIT_OK


def cmd_expected_energy(args):
    from .cantor import build_levels
    from .functions import parse_fn_spec
    from .lemmas import expected_energy_experiment
    cfg = load_config(args.config, _energy_default())
    f = parse_fn_spec(args.fn, 1)
    rep = expected_energy_experiment(f, args.eps, args.labelings, args.pairs, _rng(args, 2),
                                     build_levels(cfg), args.nu_pairs, args.partitions)
    return _report_exit(rep, args, cfg, eps=args.eps, labelings=args.labelings,
                        pairs=args.pairs, fn=args.fn)


def cmd_horizon(args):
    from .functions import parse_fn_spec
    from .horizon import SurfaceGrid, horizon
    cfg = load_config(args.config, _tower_default())
    w2 = _witness_for(args, cfg, dim=2)
    g = parse_fn_spec(args.surface, 2, w2)
    grid = SurfaceGrid.sample(g, args.n, args.seed)
    spec = _spec(args, cfg, surface=args.surface, n=args.n)
    write_csv(args.out, spec, ["x", "H"], zip(grid.x, horizon(grid)))
    return EXIT_OK


def cmd_horizon_check(args):
    from .functions import parse_fn_spec
    from .horizon import verify_horizon_shift
    cfg = load_config(args.config, _tower_default())
    w = _witness_for(args, cfg)
    f = parse_fn_spec(args.surface, 2)
    dev = verify_horizon_shift(f, w, args.n)
    ok = dev <= args.tol
    write_json(args.out, {"deviation": dev, "tolerance": args.tol, "pass": ok,
                          "spec": _spec(args, cfg, surface=args.surface, n=args.n)})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args):
    from .cantor import build_levels
    from .functions import parse_fn_spec
    from . import lemmas
    rng = _rng(args, 3)
    if args.lemma == "real-integral":
        if args.p is not None:
            rep = lemmas.verify_real_integral(args.p, args.q, args.r, args.eps or 0.1)
        else:
            rep = lemmas.verify_real_integral_grid()
        return _report_exit(rep, args)
    if args.lemma == "nxy":
        cfg = load_config(args.config, _tower_default())
        rep = lemmas.verify_nxy_bound(build_levels(cfg), args.pairs or 10 ** 6, rng)
        return _report_exit(rep, args, cfg, pairs=args.pairs or 10 ** 6)
    if args.lemma == "increment":
        cfg = load_config(args.config, _energy_default())
        lv = build_levels(cfg)
        fns = [parse_fn_spec(s.strip(), 1) for s in args.fn.split(";")]
        eps = [args.eps] if args.eps else [0.1, 0.2]
        count = args.pairs or 20
        r_pairs, r_lab = rng.spawn(2)
        pairs = lemmas.default_pair_set(lv, count, r_pairs, tuple(range(min(3, lv.depth))))
        rep = lemmas.verify_increment_set(lv, pairs, fns, eps, args.labelings or 10 ** 5, r_lab)
        return _report_exit(rep, args, cfg, pairs=count, fn=args.fn, eps=eps,
                            labelings=args.labelings or 10 ** 5)
    if args.lemma == "fubini":
        cfg = load_config(args.config, _energy_default())
        f = parse_fn_spec(args.fn.split(";")[0], 1)
        rep = lemmas.verify_fubini(build_levels(cfg), f, args.eps or 0.2, args.pairs or 16,
                                   args.labelings or 20000, rng)
        return _report_exit(rep, args, cfg, eps=args.eps or 0.2)
    # expected-energy
    cfg = load_config(args.config, _energy_default())
    f = parse_fn_spec(args.fn.split(";")[0], 1)
    rep = lemmas.expected_energy_experiment(f, args.eps or 0.25, args.labelings or 200,
                                            args.pairs or 10 ** 5, rng, build_levels(cfg),
                                            partitions=args.partitions)
    return _report_exit(rep, args, cfg, eps=args.eps or 0.25, fn=args.fn)


# ---------------------------------------------------------------- parser

def _pos_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _real(text):
    v = float(text)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite, got {text}")
    return v


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON or key=value config file, or inline key=value text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--partitions", type=_pos_int, default=1)
    common.add_argument("--out", help="output file (default stdout)")

    p = _Parser(prog="prevadim", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"prevadim {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("construct", parents=[common], help="level table of the Cantor construction")
    s.add_argument("--report", action="store_true", help="emit the (k, m_k, c_k, L_k) CSV")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("sample-fn", parents=[common], help="sample phi_omega (or a surface)")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--grid", type=_pos_int)
    g.add_argument("--surface", type=_pos_int, help="n x n surface phi_2 + f")
    s.add_argument("--fn", help="fn-spec (curve: replaces phi; surface: the f added to phi_2)")
    s.set_defaults(func=cmd_sample_fn)

    s = sub.add_parser("boxdim", parents=[common], help="box-counting dimension fit")
    s.add_argument("--input", required=True, help="fn-spec, e.g. weierstrass or phi")
    s.add_argument("--scales", default="auto", help="'2^-4..2^-14', a list, or 'auto' (clamped window)")
    s.add_argument("--spc", type=_pos_int, default=32, help="samples per column")
    s.add_argument("--dim", type=int, choices=(1, 2), default=1)
    s.add_argument("--sampled", action="store_true", help="sample phi instead of exact counts")
    s.set_defaults(func=cmd_boxdim)

    s = sub.add_parser("energy", parents=[common], help="Monte Carlo s-energy")
    s.add_argument("--s", type=_real, required=True)
    s.add_argument("--pairs", type=_pos_int, default=10 ** 5)
    s.add_argument("--measure", choices=("uniform", "nu", "graph"), default="uniform")
    s.add_argument("--fn", default="zero", help="f for the graph measure")
    s.set_defaults(func=cmd_energy)

    s = sub.add_parser("expected-energy", parents=[common], help="E_omega graph energy vs bound")
    s.add_argument("--eps", type=_real, default=0.25)
    s.add_argument("--labelings", type=_pos_int, default=200)
    s.add_argument("--pairs", type=_pos_int, default=10 ** 5)
    s.add_argument("--nu-pairs", type=_pos_int, default=None)
    s.add_argument("--fn", default="zero")
    s.set_defaults(func=cmd_expected_energy)

    s = sub.add_parser("horizon", parents=[common], help="horizon of a gridded surface")
    s.add_argument("--surface", required=True, help="fn-spec on [0,1]^2 (phi = surface witness)")
    s.add_argument("--n", type=_pos_int, default=256)
    s.set_defaults(func=cmd_horizon)

    s = sub.add_parser("horizon-check", parents=[common], help="shift identity deviation")
    s.add_argument("--surface", default="sinxy", help="f on [0,1]^2")
    s.add_argument("--n", type=_pos_int, default=256)
    s.add_argument("--tol", type=_real, default=1e-12)
    s.set_defaults(func=cmd_horizon_check)

    s = sub.add_parser("verify", parents=[common], help="numerical lemma checks")
    s.add_argument("--lemma", required=True,
                   choices=("real-integral", "nxy", "increment", "expected-energy", "fubini"))
    s.add_argument("--eps", type=_real)
    s.add_argument("--p", type=_real)
    s.add_argument("--q", type=_real, default=1.0)
    s.add_argument("--r", type=_real, default=0.0)
    s.add_argument("--pairs", type=_pos_int)
    s.add_argument("--labelings", type=_pos_int)
    s.add_argument("--fn", default="zero", help="fn-spec; several separated by ';'")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    args.argv = argv
    try:
        return args.func(args)
    except ConstructionError as e:
        print(f"infeasible construction: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except PrevadimError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
