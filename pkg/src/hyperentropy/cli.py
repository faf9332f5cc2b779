"""Command-line entry point: ``hyperentropy <subcommand> ...``.

Exit codes: 0 success, 1 usage error / invalid input / failed validation,
2 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__, _kernels
from . import blowup, core, entropy, hypergraphon, interdef, rado, sampler
from .errors import HyperentropyError, ResourceLimit


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise HyperentropyError(f"cannot read {path}: {exc}") from None


def _load_w(path: str) -> hypergraphon.StepHypergraphon:
    try:
        return hypergraphon.StepHypergraphon.from_json(_load_json(path))
    except (KeyError, TypeError) as exc:
        raise HyperentropyError(f"malformed hypergraphon file {path}: {exc!r}") from None


def cmd_sample(args) -> int:
    W = _load_w(args.hypergraphon).require_coherent()
    M = sampler.sample(W, args.n, args.seed)
    _emit(_dump(M.to_json()), args.out)
    return 0


def cmd_entropy(args) -> int:
    W = _load_w(args.hypergraphon).require_coherent()
    lo = args.n if args.n_min is None else args.n_min
    if args.method == "exact" and lo == args.n and not args.csv:
        print(repr(entropy.exact_entropy(W, args.n, args.budget)))
        return 0
    if args.method == "mc" and args.seed is None:
        raise HyperentropyError("--seed is required with --method mc")
    if args.method == "mc" and lo == args.n and not args.csv:
        est = entropy.mc_entropy(W, args.n, args.samples, args.seed)
        print(f"{est.estimate!r} {est.stderr!r}")
        return 0
    curve = entropy.entropy_curve(
        W, args.n, args.method, n_min=lo, samples=args.samples, seed=args.seed or 0, budget=args.budget
    )
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "h_bits", "method", "stderr"])
    writer.writerows(curve.to_csv_rows())
    _emit(buf.getvalue(), args.csv)
    return 0


def cmd_uniform_entropy(args) -> int:
    print(entropy.uniform_nr_entropy(entropy.parse_profile(args.profile), args.n))
    return 0


def cmd_rado(args) -> int:
    R = rado.RadoHypergraph(args.k, explicit_gens=args.gens)
    _emit(_dump(R.to_json()), args.out)
    return 0


def _read_gamma(path: str) -> dict[int, Fraction]:
    table = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            try:
                table[int(row["n"])] = Fraction(row["gamma"].strip())
            except (KeyError, ValueError) as exc:
                raise HyperentropyError(f"bad gamma row {row}: {exc!r}") from None
    return table


def cmd_blowup_schedule(args) -> int:
    gamma = _read_gamma(args.gamma) if args.gamma else {}
    sched = blowup.build_schedule(gamma, args.k, args.rmax, args.tail)
    _emit(_dump(sched.to_json()), args.out)
    return 0


def cmd_blowup_sample(args) -> int:
    sched = blowup.BlowupSchedule.from_json(_load_json(args.sched))
    R = rado.RadoHypergraph(sched.k)
    M = blowup.sample_blowup(sched.k, sched, R, args.n, args.seed)
    _emit(_dump(M.to_json()), args.out)
    return 0


def cmd_interdef(args) -> int:
    M = core.structure_from_json(_load_json(args.input))
    if args.kind == "functions":
        N = interdef.restore_functions(M) if args.inverse else interdef.eliminate_functions(M)
    else:
        N = interdef.restore_redundancy(M) if args.inverse else interdef.eliminate_redundancy(M)
    _emit(_dump(N.to_json()), args.out)
    return 0


def cmd_validate(args) -> int:
    W = _load_w(args.hypergraphon)
    bad = W.validate()
    if not bad:
        print("ok")
        return 0
    for sigma, cells in bad:
        print(f"violation sigma={list(sigma)} cells={list(cells)}")
    return 1


EXAMPLES = {
    "er": lambda k: hypergraphon.make_er(k=k),
    "full": hypergraphon.make_full,
    "empty": hypergraphon.make_empty,
    "half-half": hypergraphon.make_half_half,
    "triangle": lambda k: hypergraphon.make_triangle(),
}


def cmd_example(args) -> int:
    W = EXAMPLES[args.name](args.k)
    _emit(_dump(W.to_json()), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hyperentropy", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"hyperentropy {__version__}")
    p.add_argument("--threads", type=int, default=0, help="numba worker threads (0 = default)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sample", help="draw G(n, W) for a step hypergraphon")
    s.add_argument("--hypergraphon", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_sample)

    s = sub.add_parser("entropy", help="entropy h(n) of G(n, W), exact or Monte Carlo")
    s.add_argument("--hypergraphon", required=True)
    s.add_argument("--n", type=int, required=True, help="largest n (or the only n)")
    s.add_argument("--n-min", type=int, help="emit a curve from this n up to --n")
    s.add_argument("--method", choices=["exact", "mc"], default="exact")
    s.add_argument("--samples", type=int, default=10**5)
    s.add_argument("--seed", type=int)
    s.add_argument("--budget", type=int, default=entropy.DEFAULT_BUDGET)
    s.add_argument("--csv", help="write n,h_bits,method,stderr rows here")
    s.set_defaults(fn=cmd_entropy)

    s = sub.add_parser("uniform-entropy", help="entropy of the uniform non-redundant measure")
    s.add_argument("--profile", required=True, help="arity:count pairs, e.g. 2:1,1:2")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(fn=cmd_uniform_entropy)

    s = sub.add_parser("rado", help="list explicit generations of the Rado k-hypergraph")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--gens", type=int)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_rado)

    s = sub.add_parser("blowup-schedule", help="round lengths and generation masses from a gamma table")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--gamma", help="CSV with columns n,gamma")
    s.add_argument("--rmax", type=int, required=True)
    s.add_argument("--tail", choices=blowup.TAIL_RULES, default="zero")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_blowup_schedule)

    s = sub.add_parser("blowup-sample", help="sample the Rado blow-up on [n]")
    s.add_argument("--sched", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_blowup_sample)

    s = sub.add_parser("interdef", help="apply a quantifier-free interdefinition to a structure")
    s.add_argument("--kind", choices=["functions", "redundancy"], required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out")
    s.add_argument("--inverse", action="store_true")
    s.set_defaults(fn=cmd_interdef)

    s = sub.add_parser("validate", help="check Sym(k) coherence of a hypergraphon file")
    s.add_argument("--hypergraphon", required=True)
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("example", help="write a named example hypergraphon as JSON")
    s.add_argument("--name", choices=sorted(EXAMPLES), required=True)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_example)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 0:
        print("hyperentropy: error: --threads must be >= 0", file=sys.stderr)
        return 1
    if args.threads:
        _kernels.set_threads(args.threads)
    try:
        return args.fn(args)
    except ResourceLimit as exc:
        print(f"hyperentropy: resource limit: {exc}", file=sys.stderr)
        return 2
    except (HyperentropyError, ValueError) as exc:
        print(f"hyperentropy: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
