"""Command-line front end: experiments, machine-readable artifacts, acceptance runs.

Every subcommand emits one artifact — JSON by default, CSV for the tabular
``classes`` and ``sweep`` outputs — validated against a schema shipped in
``localcayley/schemas/`` before it leaves the process. Artifacts embed a
manifest (command, parameters, version, payload checksum) and are
byte-identical across runs with the same manifest; wall-clock time goes to
stderr only, so it can never perturb an artifact. When ``--outdir`` is given,
CSV artifacts are accompanied by a rendered PNG figure of the same data.

Exit codes: 0 success, 1 unexpected failure, 2 usage/parameter errors,
3 size-cap exceedances (machine-readable reason on stderr), 4 falsified
mathematical invariants (always an implementation bug).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .acceptance import run_all
from .cayley_graphs import CayleyGraph, cycles_through_vertex, total_cycle_count
from .configurations import (
    congruence_class_count,
    degenerate_span_count,
    fingerprint_hash,
)
from .constructions import (
    BadSetCertificate,
    build_bad_set,
    independent_set_no_good_tuples,
    translate_union,
)
from .energy import (
    EXHAUSTIVE_K,
    MAX_EXHAUSTIVE_TUPLES,
    additive_energy,
    classify_tuples,
    doubling,
    good_energy_count,
)
from .errors import (
    InvariantViolation,
    LocalCayleyError,
    NumericalDrift,
    SizeCapExceeded,
)
from .field_algebra import (
    PointSet,
    build_field,
    decode_vector,
    pointset_from_text,
    pointset_to_text,
    read_pointset,
    sphere,
)
from .spectral import MultiSet, fourier_spectrum, mixing_check

HISTOGRAM_BINS = 32

PARAM_NAMES = (
    "p", "r", "d", "k", "j", "n", "m", "seed", "cap", "set", "out",
    "outdir", "threads", "trials", "samples", "mode", "config", "profile",
    "load",
)


# ---------------------------------------------------------------------------
# artifact plumbing


def _parameters(args) -> dict:
    return {name: getattr(args, name) for name in PARAM_NAMES
            if getattr(args, name, None) is not None}


def _checksum(payload: str) -> str:
    return hashlib.sha256(payload.encode()).hexdigest()


def _schema(command: str) -> dict:
    path = resources.files("localcayley") / "schemas" / f"{command}.schema.json"
    return json.loads(path.read_text())


def _emit(args, command: str, text: str, suffix: str) -> None:
    sys.stdout.write(text)
    if args.outdir:
        outdir = Path(args.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / f"{command}.{suffix}").write_text(text)


def emit_json(args, command: str, result: dict) -> None:
    payload = json.dumps(result, sort_keys=True, separators=(",", ":"))
    artifact = {
        "manifest": {
            "command": command,
            "parameters": _parameters(args),
            "version": __version__,
            "checksum": _checksum(payload),
        },
        "result": result,
    }
    jsonschema.validate(artifact, _schema(command))
    _emit(args, command, json.dumps(artifact, sort_keys=True, indent=2) + "\n", "json")


def emit_csv(args, command: str, columns: list, rows: list) -> None:
    schema = _schema(command)
    if columns != schema["x-csv-columns"]:
        raise InvariantViolation(f"{command} CSV columns diverge from the schema")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    body = buf.getvalue()
    manifest = {
        "command": command,
        "parameters": _parameters(args),
        "version": __version__,
        "checksum": _checksum(body),
    }
    text = "# manifest: " + json.dumps(manifest, sort_keys=True,
                                       separators=(",", ":")) + "\n" + body
    _emit(args, command, text, "csv")


def _render_figure(args, command: str, draw) -> None:
    """Render a PNG beside a CSV artifact when an output directory exists."""
    if not args.outdir:
        return
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    draw(ax)
    fig.tight_layout()
    path = Path(args.outdir) / f"{command}.png"
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    print(f"figure: {path}", file=sys.stderr)


def resolve_set(args) -> PointSet:
    if getattr(args, "set", None):
        return read_pointset(args.set, args.cap)
    if args.p is None:
        raise LocalCayleyError("either --set or --p is required")
    ctx = build_field(args.p, args.r)
    return sphere(ctx, args.d, args.j, cap=args.cap)


def _point_text(ctx, d: int, index: int) -> str:
    return " ".join(str(c) for c in decode_vector(ctx, d, index))


# ---------------------------------------------------------------------------
# subcommands


def cmd_spectrum(args) -> int:
    ps = resolve_set(args)
    spec = fourier_spectrum(ps, args.cap)
    mags = np.abs(spec.values[1:])
    top = spec.mu if spec.mu > 0 else 1.0
    hist, _ = np.histogram(mags, bins=HISTOGRAM_BINS, range=(0.0, top))
    emit_json(args, "spectrum", {
        "q": ps.ctx.q,
        "d": ps.d,
        "size": len(ps),
        "mu": spec.mu,
        "argmax_m": spec.argmax_m,
        "histogram": hist.tolist(),
        "bin_width": top / HISTOGRAM_BINS,
    })
    return 0


def cmd_energy(args) -> int:
    ps = resolve_set(args)
    k = args.k
    t_k = additive_energy(ps, k, args.cap)
    mode = args.mode
    if mode == "auto":
        exhaustible = k in EXHAUSTIVE_K and len(ps) ** k <= MAX_EXHAUSTIVE_TUPLES
        mode = "exhaustive" if exhaustible else "sample"
    result = {
        "q": ps.ctx.q, "d": ps.d, "k": k, "size": len(ps), "T_k": t_k,
        "K": float(doubling(ps).ratio), "seed": args.seed, "mode": mode,
        "stderr": None, "T_dep": None, "T_0": None, "T_bad": None,
        "T_star": None,
    }
    if mode == "exhaustive":
        cls = classify_tuples(ps, k, args.j)
        result.update({
            "T_k_good": cls.t_good, "T_dep": cls.t_dep, "T_0": cls.t_zero,
            "T_bad": cls.t_bad, "T_star": cls.t_star,
        })
        if cls.t_k != t_k:
            raise InvariantViolation(
                f"classification total {cls.t_k} != convolution energy {t_k}"
            )
    else:
        est = good_energy_count(ps, k, mode="sample", samples=args.samples,
                                seed=args.seed or 0)
        result.update({"T_k_good": est.estimate, "stderr": est.stderr,
                       "seed": est.seed})
    emit_json(args, "energy", result)
    return 0


def cmd_cycles(args) -> int:
    ps = resolve_set(args)
    g = CayleyGraph(ps)
    k = args.k
    length = 2 * k
    counts = total_cycle_count(g, length)
    rng = np.random.default_rng(args.seed or 0)
    sample_vertices = sorted(int(v) for v in rng.choice(g.n, size=min(10, g.n),
                                                        replace=False))
    sample = [[v, cycles_through_vertex(g, v, length)] for v in sample_vertices]
    good = good_energy_count(ps, k, mode="exhaustive").value
    emit_json(args, "cycles", {
        "q": ps.ctx.q, "d": ps.d, "k": k, "size": len(ps),
        "rooted_directed_total": counts.rooted_total,
        "unrooted_total": counts.unrooted_total,
        "per_vertex_sample": sample,
        "T_k_good": good,
        "cycle_bound_holds": all(c >= good for _, c in sample),
    })
    return 0


def cmd_classes(args) -> int:
    ps = resolve_set(args)
    classes = congruence_class_count(ps, args.k, args.j)
    ctx = ps.ctx
    items = []
    for fp, mult, points in classes.sorted_items():
        rep = ";".join(_point_text(ctx, ps.d, v) for v in points)
        items.append((fingerprint_hash(fp), mult, rep))
    if args.out == "json":
        emit_json(args, "classes", {
            "q": ctx.q, "d": ps.d, "k": args.k, "size": len(ps),
            "count": classes.count, "total": classes.total,
            "unordered_count": classes.unordered_count,
            "classes": [{"fingerprint": h, "multiplicity": m, "representative": rep}
                        for h, m, rep in items],
        })
        return 0
    emit_csv(args, "classes", ["fingerprint", "multiplicity", "representative"],
             items)

    def draw(ax):
        mults = sorted((m for _, m, _ in items), reverse=True)
        ax.bar(range(1, len(mults) + 1), mults, color="#36629e")
        ax.set_xlabel("congruence class (by decreasing multiplicity)")
        ax.set_ylabel("multiplicity")
        ax.set_title(f"class multiplicities: q={ctx.q}, d={ps.d}, k={args.k}")

    _render_figure(args, "classes", draw)
    return 0


def cmd_mixing(args) -> int:
    ps = resolve_set(args)
    rng = np.random.default_rng(args.seed or 0)
    n = ps.space_size
    holds_all = True
    max_ratio = 0.0
    worst = None
    for _ in range(args.trials):
        u_set = MultiSet.from_draws(rng.integers(0, n, size=int(rng.integers(1, 41))))
        w_set = MultiSet.from_draws(rng.integers(0, n, size=int(rng.integers(1, 41))))
        rep = mixing_check(ps, u_set, w_set, args.cap)
        holds_all = holds_all and rep.holds
        ratio = float(rep.deviation) / rep.bound if rep.bound > 0 else 0.0
        if worst is None or ratio > max_ratio:
            max_ratio = max(max_ratio, ratio)
            worst = {"edges": rep.edges, "main_term": float(rep.main_term),
                     "deviation": float(rep.deviation), "bound": rep.bound}
    emit_json(args, "mixing", {
        "q": ps.ctx.q, "d": ps.d, "size": len(ps), "trials": args.trials,
        "seed": args.seed, "holds_all": holds_all, "max_ratio": max_ratio,
        "worst": worst,
    })
    return 0


def _badset_result(cert: BadSetCertificate) -> dict:
    ctx = cert.ctx
    return {
        "p": ctx.p, "r": ctx.r, "d": cert.d, "q": ctx.q,
        "size": len(cert.connection), "h_size": len(cert.translate_set),
        "epsilon": f"{cert.epsilon.numerator}/{cert.epsilon.denominator}",
        "mu": cert.mu, "bound": cert.bound,
        "mixing_lower": (f"{cert.mixing_lower.numerator}/"
                         f"{cert.mixing_lower.denominator}"),
        "edges_hh": cert.edges_hh, "holds": cert.holds,
        "subspace": list(cert.subspace),
        "connection": pointset_to_text(cert.connection),
    }


def _badset_from_result(result: dict) -> BadSetCertificate:
    connection = pointset_from_text(result["connection"])
    ctx = connection.ctx
    num, den = (int(x) for x in result["epsilon"].split("/"))
    lnum, lden = (int(x) for x in result["mixing_lower"].split("/"))
    return BadSetCertificate(
        ctx=ctx, d=result["d"], subspace=tuple(result["subspace"]),
        translate_set=translate_union(ctx, result["d"]),
        connection=connection, epsilon=Fraction(num, den),
        mu=result["mu"], bound=result["bound"],
        mixing_lower=Fraction(lnum, lden), edges_hh=result["edges_hh"],
        holds=result["holds"],
    )


def cmd_badset(args) -> int:
    if args.load:
        artifact = json.loads(Path(args.load).read_text())
        jsonschema.validate(artifact, _schema("badset"))
        cert = _badset_from_result(artifact["result"])
        cert.verify()  # InvariantViolation -> exit 4
        emit_json(args, "badset", _badset_result(cert))
        return 0
    if args.p is None or args.m is None:
        raise LocalCayleyError("badset needs --p, --r, --d and --m (or --load)")
    cert = build_bad_set(args.p, args.r, args.d, args.m, seed=args.seed,
                         cap=args.cap)
    emit_json(args, "badset", _badset_result(cert))
    return 0


def cmd_indepset(args) -> int:
    if args.p is None:
        raise LocalCayleyError("indepset needs --p")
    ctx = build_field(args.p, args.r)
    rep = independent_set_no_good_tuples(ctx, args.d, args.k, seed=args.seed,
                                         radius=args.j, cap=args.cap)
    emit_json(args, "indepset", {
        "q": ctx.q, "d": args.d, "k": args.k, "radius": args.j,
        "sphere_size": rep.sphere_size, "size": len(rep.connection),
        "pairs_removed": rep.pairs_removed, "threshold": rep.threshold,
        "ratio": rep.ratio, "certified_good_count": rep.certified_good_count,
        "connection": pointset_to_text(rep.connection),
    })
    return 0


def cmd_degenerate_span(args) -> int:
    if args.p is None:
        raise LocalCayleyError("degenerate-span needs --p")
    ctx = build_field(args.p, args.r)
    s = sphere(ctx, args.d, args.j, cap=args.cap)
    count = degenerate_span_count(ctx, args.d, args.n, radius=args.j,
                                  cap=args.cap)
    constant = count * ctx.q ** (args.n * (args.n - 1)) / len(s) ** (2 * args.n - 1)
    emit_json(args, "degenerate-span", {
        "q": ctx.q, "d": args.d, "n": args.n, "radius": args.j,
        "sphere_size": len(s), "count": count, "constant": constant,
    })
    return 0


def _parse_sweep_config(path: str) -> dict:
    """Parse the key-value sweep format: `qs = 5,7`, `ds = 2,3`, `ks = 2`."""
    config = {"qs": [5, 7, 11, 13], "ds": [2, 3], "ks": [2, 3], "radius": 1}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise LocalCayleyError(f"{path}:{lineno}: expected key = value")
        key, _, value = (part.strip() for part in line.partition("="))
        if key in ("qs", "ds", "ks"):
            config[key] = [int(v) for v in value.split(",") if v.strip()]
        elif key == "radius":
            config[key] = int(value)
        else:
            raise LocalCayleyError(f"{path}:{lineno}: unknown sweep key {key!r}")
    return config


def cmd_sweep(args) -> int:
    config = _parse_sweep_config(args.config)
    rows = []
    for q in config["qs"]:
        ctx = build_field(q)
        for d in config["ds"]:
            s = sphere(ctx, d, config["radius"], cap=args.cap)
            for k in config["ks"]:
                t_k = additive_energy(s, k, args.cap)
                main = len(s) ** (2 * k - 1) / q
                rows.append((q, d, k, len(s), t_k, main,
                             float(Fraction(t_k * q, len(s) ** (2 * k - 1)))))
    if args.out == "json":
        emit_json(args, "sweep", {"rows": [
            {"q": q, "d": d, "k": k, "sphere_size": n, "t_k": t,
             "main_term": m, "ratio": r} for q, d, k, n, t, m, r in rows
        ]})
        return 0
    emit_csv(args, "sweep",
             ["q", "d", "k", "sphere_size", "t_k", "main_term", "ratio"], rows)

    def draw(ax):
        for d in config["ds"]:
            for k in config["ks"]:
                pts = [(q, r) for q, dd, kk, _, _, _, r in rows
                       if dd == d and kk == k]
                if pts:
                    ax.plot([q for q, _ in pts], [r for _, r in pts],
                            marker="o", label=f"d={d}, k={k}")
        ax.axhline(1.0, color="gray", linestyle="--", linewidth=1)
        ax.set_xlabel("q")
        ax.set_ylabel("T_k q / |S|^(2k-1)")
        ax.set_title("energy ratio against the main term")
        ax.legend()

    _render_figure(args, "sweep", draw)
    return 0


def cmd_verify(args) -> int:
    if args.profile != "desk":
        raise LocalCayleyError(f"unknown profile {args.profile!r}")
    results = run_all()
    for res in results:
        print(res.line)
    all_passed = all(r.passed for r in results)
    if args.outdir:
        payload = {
            "all_passed": all_passed,
            "criteria": [{"number": r.number, "slug": r.slug,
                          "passed": r.passed, "elapsed": r.elapsed,
                          "budget": r.budget, "detail": r.detail}
                         for r in results],
        }
        artifact = {
            "manifest": {
                "command": "verify",
                "parameters": _parameters(args),
                "version": __version__,
                "checksum": _checksum(json.dumps(payload, sort_keys=True,
                                                 separators=(",", ":"))),
            },
            "result": payload,
        }
        jsonschema.validate(artifact, _schema("verify"))
        outdir = Path(args.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "verify.json").write_text(
            json.dumps(artifact, sort_keys=True, indent=2) + "\n")
    return 0 if all_passed else 1


# ---------------------------------------------------------------------------
# parser and dispatch


def _add_common(sp, out_default="json", out_choices=("json",)):
    sp.add_argument("--p", type=int, help="field characteristic (prime)")
    sp.add_argument("--r", type=int, default=1, help="extension degree")
    sp.add_argument("--d", type=int, default=2, help="ambient dimension")
    sp.add_argument("--k", type=int, default=2, help="energy order")
    sp.add_argument("--j", type=int, default=1, help="sphere radius")
    sp.add_argument("--seed", type=int, help="seed for randomized paths")
    sp.add_argument("--cap", type=int, help="index-space size cap override")
    sp.add_argument("--set", help="point-set file replacing the default sphere")
    sp.add_argument("--out", choices=list(out_choices), default=out_default,
                    help="artifact format")
    sp.add_argument("--outdir", help="directory for artifact files")
    sp.add_argument("--threads", type=int,
                    help="advisory worker count (numerics parallelize internally)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="localcayley",
        description="Exact desk-scale computations on Cayley graphs over F_q^d.",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="eigenvalues of a connection set")
    _add_common(sp)
    sp.set_defaults(handler=cmd_spectrum)

    sp = sub.add_parser("energy", help="additive energy and its classification")
    _add_common(sp)
    sp.add_argument("--mode", choices=["auto", "exhaustive", "sample"],
                    default="auto")
    sp.add_argument("--samples", type=int, default=100_000,
                    help="sample count for the estimated good-tuple count")
    sp.set_defaults(handler=cmd_energy)

    sp = sub.add_parser("cycles", help="distinct-vertex cycle counts")
    _add_common(sp)
    sp.set_defaults(handler=cmd_cycles)

    sp = sub.add_parser("classes", help="congruence classes of star tuples")
    _add_common(sp, out_default="csv", out_choices=("csv", "json"))
    sp.set_defaults(handler=cmd_classes)

    sp = sub.add_parser("mixing", help="pseudo-random mixing spot checks")
    _add_common(sp)
    sp.add_argument("--trials", type=int, default=100)
    sp.set_defaults(handler=cmd_mixing)

    sp = sub.add_parser("badset", help="certified large-eigenvalue construction")
    _add_common(sp)
    sp.add_argument("--m", type=int, help="target connection-set size")
    sp.add_argument("--load", help="re-verify a stored certificate JSON")
    sp.set_defaults(handler=cmd_badset)

    sp = sub.add_parser("indepset", help="sphere subset with zero good tuples")
    _add_common(sp)
    sp.set_defaults(handler=cmd_indepset)

    sp = sub.add_parser("degenerate-span", help="degenerate sphere-tuple count")
    _add_common(sp)
    sp.add_argument("--n", type=int, default=2, help="tuple arity minus one")
    sp.set_defaults(handler=cmd_degenerate_span)

    sp = sub.add_parser("sweep", help="grid of energy ratios from a config file")
    _add_common(sp, out_default="csv", out_choices=("csv", "json"))
    sp.add_argument("--config", required=True, help="key-value sweep grid file")
    sp.set_defaults(handler=cmd_sweep)

    sp = sub.add_parser("verify", help="run the acceptance suite")
    _add_common(sp)
    sp.add_argument("--profile", default="desk")
    sp.set_defaults(handler=cmd_verify)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        return args.handler(args)
    except SizeCapExceeded as exc:
        print(json.dumps({"error": "cap-exceeded", "message": str(exc),
                          "required": exc.required, "cap": exc.cap}),
              file=sys.stderr)
        return 3
    except (InvariantViolation, NumericalDrift) as exc:
        print(json.dumps({"error": "invariant-falsified", "message": str(exc)}),
              file=sys.stderr)
        return 4
    except LocalCayleyError as exc:
        print(json.dumps({"error": "usage", "message": str(exc)}),
              file=sys.stderr)
        return 2
    except (OSError, ValueError, json.JSONDecodeError,
            jsonschema.ValidationError) as exc:
        print(json.dumps({"error": "failure", "message": str(exc)}),
              file=sys.stderr)
        return 1
    finally:
        print(f"wall time: {time.perf_counter() - start:.3f}s", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
