"""Batch command-line front end with deterministic seeding.

Every command echoes its seed into the output; identical (subcommand,
params, seed) produce byte-identical JSON.  Exit codes: 0 on success, 2 on
a validation problem (bad flags or bad values), 1 on an internal error.
The default seed comes from the COSETLAB_SEED environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import cprf, games, gf2, glx, prf, qsim, sde, toksig
from .gf2 import BitVector


@dataclass
class RunConfig:
    subcommand: str
    params: dict
    seed: int
    output: str | None
    format: str


def _default_seed() -> int:
    return int(os.environ.get("COSETLAB_SEED", "0"))


def _round_floats(obj, digits: int = 12):
    """12 significant digits for every float, recursively."""
    if isinstance(obj, float):
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, Fraction):
        return float(f"{float(obj):.{digits}g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, digits) for v in obj]
    return obj


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, (list, tuple)):
            out[key] = json.dumps(_round_floats(v))
        else:
            out[key] = _round_floats(v)
    return out


def emit(result: dict, fmt: str = "json", out: str | None = None) -> None:
    """Serialize with stable field ordering; floats at 12 significant digits."""
    result = _round_floats(result)
    if fmt == "json":
        text = json.dumps(result, indent=2) + "\n"
    elif fmt == "csv":
        flat = _flatten(result)
        header = ",".join(flat.keys())
        row = ",".join("" if v is None else str(v) for v in flat.values())
        text = header + "\n" + row + "\n"
    elif fmt == "text":
        flat = _flatten(result)
        text = "".join(f"{k}: {v}\n" for k, v in flat.items())
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _warn_waived(waived, report=None) -> None:
    if not waived:
        return
    print(f"note: toy mode waives constraints: {', '.join(waived)}", file=sys.stderr)
    if report is not None:
        for c in report.constraints:
            status = "ok" if c["satisfied"] else "WAIVED"
            print(
                f"  [{status}] {c['name']}: {c['requirement']} ({c['lhs']} vs {c['rhs']})",
                file=sys.stderr,
            )


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def _basis_arg(text: str, n: int | None = None) -> gf2.Subspace:
    rows = [BitVector.from_string(r) for r in text.split(",") if r.strip()]
    return gf2.rref(rows, n=n)


# -- per-subcommand handlers -----------------------------------------------------

def _cmd_gf2(args) -> dict:
    if args.op == "sample":
        a = gf2.sample_subspace(args.n, args.d, args.seed)
        return {
            "op": "gf2 sample",
            "n": args.n,
            "d": args.d,
            "basis": [str(b) for b in a.basis],
            "seed": args.seed,
        }
    if args.op == "canon":
        a = _basis_arg(args.basis)
        s = BitVector.from_string(args.s)
        rep = gf2.canonical_rep(a, s)
        return {
            "op": "gf2 canon",
            "basis": [str(b) for b in a.basis],
            "s": str(s),
            "canonical": str(rep),
            "seed": args.seed,
        }
    a = _basis_arg(args.basis)
    c = gf2.complement(a)
    return {
        "op": "gf2 complement",
        "basis": [str(b) for b in a.basis],
        "complement": [str(b) for b in c.basis],
        "seed": args.seed,
    }


def _cmd_qsim(args) -> dict:
    a = _basis_arg(args.basis)
    s = BitVector.from_string(args.s)
    sp = BitVector.from_string(args.sp)
    state = qsim.prepare_coset_state(a, s, sp)
    out = {
        "op": "qsim coset",
        "n": a.n,
        "dim": a.dim,
        "support": int((abs(state.amps) > 1e-12).sum()),
        "seed": args.seed,
    }
    if args.dump:
        with open(args.dump, "w") as fh:
            qsim.dump_amplitudes(state, fh)
        out["dump"] = args.dump
    if args.shots:
        rng = gf2._as_rng(args.seed)
        outcomes = [str(qsim.measure_all(state, rng).outcome) for _ in range(args.shots)]
        out["outcomes"] = outcomes
    return out


def _cmd_toksig(args) -> dict:
    if args.op == "keygen":
        sk, pk = toksig.keygen(args.n, args.seed)
        _write(args.sk_out, toksig.sk_to_json(sk))
        _write(args.pk_out, toksig.pk_to_json(pk))
        return {
            "op": "toksig keygen",
            "n": args.n,
            "sk_file": args.sk_out,
            "pk_file": args.pk_out,
            "seed": args.seed,
        }
    if args.op == "sign":
        sk = toksig.sk_from_json(_read(args.sk))
        token = toksig.token_gen(sk)
        m, sig = toksig.sign(args.m, token, args.seed)
        return {"op": "toksig sign", "m": m, "sig": sig.hex, "n": sk.n, "seed": args.seed}
    if args.op == "verify":
        pk = toksig.pk_from_json(_read(args.pk))
        sig = BitVector.from_hex(pk.n, args.sig)
        ok = toksig.verify(pk, args.m, sig)
        return {"op": "toksig verify", "m": args.m, "sig": args.sig, "accepted": bool(ok), "seed": args.seed}
    sk = toksig.sk_from_json(_read(args.sk))
    pk = toksig.public_key(sk)
    token = toksig.token_gen(sk)
    ok, post = toksig.revoke(pk, token, args.seed)
    fresh = toksig.token_gen(sk)
    return {
        "op": "toksig revoke",
        "accepted": bool(ok),
        "post_fidelity": qsim.fidelity(post.state, fresh.state),
        "seed": args.seed,
    }


def _cmd_prf(args) -> dict:
    if args.op == "eval":
        key = prf.ggm_keygen(args.in_len, args.out_len, args.lam, args.seed)
        x = BitVector.from_string(args.x)
        y = prf.ggm_eval(key, x)
        return {"op": "prf eval", "x": args.x, "y": str(y), "lambda": args.lam, "seed": args.seed}
    if args.op == "puncture":
        key = prf.ggm_keygen(args.in_len, args.out_len, args.lam, args.seed)
        points = [BitVector.from_string(p) for p in args.points.split(",")]
        pkey = prf.puncture(key, points)
        _write(args.key_out, prf.punctured_key_to_json(pkey))
        return {
            "op": "prf puncture",
            "points": args.points.split(","),
            "copath_size": len(pkey.copath),
            "key_file": args.key_out,
            "seed": args.seed,
        }
    if args.op == "peval":
        pkey = prf.punctured_key_from_json(_read(args.key))
        x = BitVector.from_string(args.x)
        try:
            y = prf.punctured_eval(pkey, x)
            return {"op": "prf peval", "x": args.x, "y": str(y), "punctured": False, "seed": args.seed}
        except prf.PuncturedPointError:
            return {"op": "prf peval", "x": args.x, "y": None, "punctured": True, "seed": args.seed}
    report = prf.params_check(args.l0, args.l1, args.l2, args.lam, args.m_len)
    _warn_waived(report.violations)
    return {"op": "prf check", "seed": args.seed, **report.to_dict()}


def _cmd_sde(args) -> dict:
    if args.op == "setup":
        sk, pk = sde.setup(args.n, args.kappa, args.seed)
        _write(args.sk_out, sde.sk_to_json(sk))
        return {
            "op": "sde setup",
            "n": args.n,
            "kappa": args.kappa,
            "sk_file": args.sk_out,
            "seed": args.seed,
        }
    if args.op == "qkeygen":
        sk = sde.sk_from_json(_read(args.sk))
        qkey = sde.qkeygen(sk)
        return {
            "op": "sde qkeygen",
            "registers": qkey.kappa,
            "qubits_per_register": sk.n,
            "seed": args.seed,
        }
    if args.op == "enc":
        sk = sde.sk_from_json(_read(args.sk))
        pk = sde.public_key(sk)
        m = BitVector.from_string(args.m)
        if args.cc:
            ct = sde.encrypt_cc(sk, pk, m, args.seed)
            _write(args.ct_out, sde.ciphertext_to_json(ct))
        else:
            ct = sde.encrypt(pk, m, args.seed)
            _write(args.ct_out, sde.ciphertext_to_json(ct, reveal_payload=True))
        return {
            "op": "sde enc",
            "form": "cc" if args.cc else "io-stub",
            "r": str(ct.r),
            "ct_file": args.ct_out,
            "seed": args.seed,
        }
    sk = sde.sk_from_json(_read(args.sk))
    pk = sde.public_key(sk)
    ct = sde.ciphertext_from_json(_read(args.ct), pk=pk)
    qkey = sde.qkeygen(sk)
    m = sde.decrypt(qkey, ct, args.seed)
    return {
        "op": "sde dec",
        "message": None if m is None else str(m),
        "seed": args.seed,
    }


def _cprf_params(args) -> cprf.CpParams:
    if args.preset == "toy":
        return cprf.TOY_PARAMS
    return cprf.CpParams(
        l0=args.l0, l1=args.l1, l2=args.l2, lam=args.lam, m_len=args.m_len, toy=args.toy
    )


def _cmd_cprf(args) -> dict:
    if args.op == "check":
        params = _cprf_params(args)
        _warn_waived(params.waived, params.report)
        return {"op": "cprf check", "toy": params.toy, "seed": args.seed, **params.report.to_dict()}
    if args.op == "keygen":
        params = _cprf_params(args)
        _warn_waived(params.waived, params.report)
        k1 = cprf.setup_f1(params, args.seed)
        _, view = cprf.cp_qkeygen(k1, params, args.seed + 1)
        _write(args.view_out, cprf.view_to_json(view))
        return {
            "op": "cprf keygen",
            "n": params.n,
            "registers": params.l0,
            "waived_constraints": params.waived,
            "view_file": args.view_out,
            "seed": args.seed,
        }
    view = cprf.view_from_json(_read(args.view))
    _warn_waived(view.params.waived, view.params.report)
    if args.op == "eval":
        key = cprf.key_from_view(view)
        x = BitVector.from_string(args.x)
        y = cprf.cp_eval(key, x, args.seed)
        return {
            "op": "cprf eval",
            "x": args.x,
            "y": None if y is None else str(y),
            "trigger": cprf.is_trigger(x, view.k2, view.k3),
            "waived_constraints": view.params.waived,
            "seed": args.seed,
        }
    x0 = BitVector.from_string(args.x0)
    y = BitVector.from_string(args.y)
    trig = cprf.gen_trigger(x0, y, view.k2, view.k3, view.cosets, view.params)
    return {
        "op": "cprf trigger",
        "x": trig.x.hex,
        "x_bits": str(trig.x),
        "planted_y": str(y),
        "is_trigger": cprf.is_trigger(trig.x, view.k2, view.k3),
        "waived_constraints": view.params.waived,
        "seed": args.seed,
    }


def _cmd_game(args) -> dict:
    common = {"trials": args.trials, "seed": args.seed}
    if args.game == "direct-product":
        kwargs = dict(n=args.n, strategy=args.strategy, mode=args.mode, **common)
    elif args.game == "monogamy":
        kwargs = dict(n=args.n, strategy=args.strategy, comp=args.comp, **common)
    elif args.game == "strong-monogamy":
        kwargs = dict(n=args.n, strategy=args.strategy, comp=args.comp, **common)
    elif args.game == "anti-piracy":
        if args.kind in ("cpa", "random", "strong-ti"):
            scheme = games.SdeGameParams(n=args.n, kappa=args.kappa, m_len=args.m_len)
        else:
            scheme = _cprf_params(args)
            _warn_waived(scheme.waived, scheme.report)
        kwargs = dict(
            kind=args.kind, scheme_params=scheme, strategy=args.strategy, gamma=args.gamma, **common
        )
    elif args.game == "hidden-trigger":
        params = _cprf_params(args)
        _warn_waived(params.waived, params.report)
        kwargs = dict(params=params, strategy=args.strategy, **common)
    else:
        raise ValueError(f"unknown game {args.game!r}")
    result = games.run_parallel(args.game, args.jobs, **kwargs)
    return result.to_dict()


def _cmd_bound(args) -> dict:
    if args.op == "monogamy":
        if args.sweep:
            values = {
                str(n): float(games.monogamy_bound(n)) for n in range(2, args.n + 1, 2)
            }
            return {"op": "bound monogamy", "sweep": values, "seed": args.seed}
        value = games.monogamy_bound(args.n)
        return {
            "op": "bound monogamy",
            "n": args.n,
            "value": float(value),
            "exact": f"{value.numerator}/{value.denominator}",
            "seed": args.seed,
        }
    report = games.overlap_check(args.n, mode=args.mode, max_pairs=args.pairs, seed=args.seed)
    return {"op": "bound overlap", "seed": args.seed, **report}


def _cmd_glx(args) -> dict:
    x = BitVector.random(args.n, args.seed)
    pred = glx.build_ip_predictor(x, noise=args.flip_fraction, seed=args.seed + 1)
    estimate = glx.success_estimate(pred, aux=None, reps=args.reps, seed=args.seed + 2)
    return {
        "op": "glx demo",
        "n": args.n,
        "flip_fraction": args.flip_fraction,
        "bias": pred.bias,
        "quadratic_floor": 4 * pred.bias**2,
        "exact_success": glx.exact_success(pred),
        "estimate": estimate,
        "reps": args.reps,
        "planted_x": str(x),
        "seed": args.seed,
    }


def _cmd_report(args) -> dict:
    from . import report

    return report.generate(args.out_dir, seed=args.seed, quick=args.quick)


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cosetlab",
        description="Workbench for hidden coset states: schemes, games, bounds.",
    )
    parser.add_argument("--config", help="JSON file of default flag values (flags win)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=_default_seed())
        p.add_argument("--format", choices=("json", "csv", "text"), default="json")
        p.add_argument("--out", default=None, help="write output here instead of stdout")

    p = sub.add_parser("gf2", help="subspace and coset algebra")
    p.add_argument("op", choices=("sample", "canon", "complement"))
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--basis", help="comma-separated 0/1 rows")
    p.add_argument("--s", help="offset vector as a 0/1 string")
    add_common(p)
    p.set_defaults(handler=_cmd_gf2)

    p = sub.add_parser("qsim", help="coset-state preparation and measurement")
    p.add_argument("--basis", required=True)
    p.add_argument("--s", required=True)
    p.add_argument("--sp", required=True)
    p.add_argument("--dump", help="write amplitudes as CSV to this file")
    p.add_argument("--shots", type=int, default=0)
    add_common(p)
    p.set_defaults(handler=_cmd_qsim)

    p = sub.add_parser("toksig", help="tokenized signatures")
    p.add_argument("op", choices=("keygen", "sign", "verify", "revoke"))
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--m", type=int, choices=(0, 1), default=0)
    p.add_argument("--sk", help="secret key JSON file")
    p.add_argument("--pk", help="public key JSON file")
    p.add_argument("--sig", help="hex-encoded signature")
    p.add_argument("--sk-out", default="toksig_sk.json")
    p.add_argument("--pk-out", default="toksig_pk.json")
    add_common(p)
    p.set_defaults(handler=_cmd_toksig)

    p = sub.add_parser("prf", help="puncturable PRF family")
    p.add_argument("op", choices=("eval", "puncture", "peval", "check"))
    p.add_argument("--in-len", type=int, default=8)
    p.add_argument("--out-len", type=int, default=8)
    p.add_argument("--lam", type=int, default=16)
    p.add_argument("--x", help="input as a 0/1 string")
    p.add_argument("--points", help="comma-separated inputs to puncture")
    p.add_argument("--key", help="punctured key JSON file")
    p.add_argument("--key-out", default="punctured_key.json")
    p.add_argument("--l0", type=int, default=2)
    p.add_argument("--l1", type=int, default=16)
    p.add_argument("--l2", type=int, default=10)
    p.add_argument("--m-len", type=int, default=2)
    add_common(p)
    p.set_defaults(handler=_cmd_prf)

    p = sub.add_parser("sde", help="single-decryptor encryption")
    p.add_argument("op", choices=("setup", "qkeygen", "enc", "dec"))
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--kappa", type=int, default=3)
    p.add_argument("--m", help="message bits")
    p.add_argument("--sk", help="secret key JSON file")
    p.add_argument("--ct", help="ciphertext JSON file")
    p.add_argument("--cc", action="store_true", help="emit the compute-and-compare form")
    p.add_argument("--sk-out", default="sde_sk.json")
    p.add_argument("--ct-out", default="sde_ct.json")
    add_common(p)
    p.set_defaults(handler=_cmd_sde)

    p = sub.add_parser("cprf", help="copy-protected PRF")
    p.add_argument("op", choices=("keygen", "eval", "trigger", "check"))
    p.add_argument("--preset", choices=("toy", "custom"), default="toy")
    p.add_argument("--l0", type=int, default=2)
    p.add_argument("--l1", type=int, default=16)
    p.add_argument("--l2", type=int, default=10)
    p.add_argument("--lam", type=int, default=4)
    p.add_argument("--m-len", type=int, default=2)
    p.add_argument("--toy", action="store_true")
    p.add_argument("--view", help="challenger view JSON file")
    p.add_argument("--view-out", default="cprf_view.json")
    p.add_argument("--x", help="evaluation input bits")
    p.add_argument("--x0", help="trigger prefix bits")
    p.add_argument("--y", help="planted output bits")
    add_common(p)
    p.set_defaults(handler=_cmd_cprf)

    p = sub.add_parser("game", help="security games")
    p.add_argument("op", choices=("run",))
    p.add_argument(
        "--game",
        required=True,
        choices=("direct-product", "monogamy", "strong-monogamy", "anti-piracy", "hidden-trigger"),
    )
    p.add_argument("--strategy", required=True)
    p.add_argument("--kind", choices=games.ANTI_PIRACY_KINDS, default="cpa")
    p.add_argument("--mode", choices=("it", "comp"), default="it")
    p.add_argument("--comp", action="store_true")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--kappa", type=int, default=2)
    p.add_argument("--m-len", type=int, default=2)
    p.add_argument("--gamma", type=float, default=0.4)
    p.add_argument("--preset", choices=("toy", "custom"), default="toy")
    p.add_argument("--l0", type=int, default=2)
    p.add_argument("--l1", type=int, default=16)
    p.add_argument("--l2", type=int, default=10)
    p.add_argument("--lam", type=int, default=4)
    p.add_argument("--toy", action="store_true")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", dest="json_out", help="also write the JSON result here")
    add_common(p)
    p.set_defaults(handler=_cmd_game)

    p = sub.add_parser("bound", help="analytic bounds")
    p.add_argument("op", choices=("monogamy", "overlap"))
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--sweep", action="store_true")
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--pairs", type=int, default=None)
    add_common(p)
    p.set_defaults(handler=_cmd_bound)

    p = sub.add_parser("glx", help="inner-product extraction demo")
    p.add_argument("op", nargs="?", choices=("demo",), default="demo")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--flip-fraction", type=float, default=0.125)
    p.add_argument("--reps", type=int, default=1000)
    add_common(p)
    p.set_defaults(handler=_cmd_glx)

    p = sub.add_parser("report", help="figures and CSV summaries")
    p.add_argument("--out-dir", default="reports")
    p.add_argument("--quick", action="store_true", help="smaller trial counts")
    add_common(p)
    p.set_defaults(handler=_cmd_report)

    return parser


def dispatch(argv) -> int:
    parser = build_parser()
    # config file: same keys as flags, flags win
    if "--config" in argv:
        idx = argv.index("--config")
        try:
            with open(argv[idx + 1]) as fh:
                defaults = json.load(fh)
        except (IndexError, OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 2
        parser.set_defaults(**{k.replace("-", "_"): v for k, v in defaults.items()})
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.handler(args)
    except (ValueError, KeyError, FileNotFoundError, prf.ParamConstraintError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - internal failure path
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    try:
        emit(result, fmt=getattr(args, "format", "json"), out=getattr(args, "out", None))
        json_out = getattr(args, "json_out", None)
        if json_out:
            emit(result, fmt="json", out=json_out)
    except OSError as exc:
        print(f"error writing output: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
