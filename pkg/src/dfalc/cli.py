"""Command-line entry point: ``dfalc <command> ...``.

Exit status is 0 on success, 1 on a usage error, 2 on bad input and 3 when
training hits a non-finite value.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .crisp import crisp_eval_axiom, crispify, success_rate
from .errors import DFALCError, NonFiniteGradient
from .experiments import run_cqa, run_mask_revision
from .grounding import Grounding, fuzzy_success_rate
from .losses import hierarchical_loss
from .normalize import normalize, seed_fresh_assertions
from .parser import parse_ontology, render_axiom, render_concept, render_ontology
from .syntax import Ontology
from .synthetic import MaskSpec, SyntheticSpec, gen_synthetic
from .train import TrainConfig, train

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _UsageError(Exception):
    pass


def _read_ontology(path):
    with open(path, encoding="utf-8") as fh:
        return parse_ontology(fh.read())


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _train_config(args) -> TrainConfig:
    return TrainConfig(
        loss_kind=args.loss,
        learning_rate=args.lr,
        patience=args.patience,
        max_epochs=args.max_epochs,
        alpha_prime=args.alpha_prime,
        tnorm=args.tnorm,
        seed=args.seed,
    )


def _add_train_args(p):
    p.add_argument("--loss", choices=("hierarchical", "rule"), default="hierarchical")
    p.add_argument("--lr", type=float, default=2e-4)
    p.add_argument("--patience", type=int, default=10)
    p.add_argument("--max-epochs", type=int, default=20000)
    p.add_argument("--alpha-prime", type=float, default=0.8)
    p.add_argument("--tnorm", choices=("product", "godel"), default="product")
    p.add_argument("--seed", type=int, default=0)


def cmd_normalize(args) -> int:
    o = _read_ontology(args.inp)
    nt = normalize(o)
    out = Ontology(nt.as_ontology().tbox, o.abox, nt.extended_signature)
    defs = [f"# define {n} := ({render_concept(d)})" for n, d in nt.fresh_defs.items()]
    _write_text(args.out, render_ontology(out, defs))
    return EXIT_OK


def cmd_ground(args) -> int:
    o = _read_ontology(args.ontology)
    init = Grounding.load(args.init) if args.init else Grounding.from_abox(o)
    nt = normalize(o)
    revised, hist = train(seed_fresh_assertions(nt, init), nt, _train_config(args))
    if not args.keep_fresh:
        revised = revised.reindex(init.signature)
    if args.log:
        hist.write_csv(args.log)
    _write_text(args.out, revised.dumps() + "\n")
    print(f"{hist.stop_reason} after {len(hist)} epochs, best loss {hist.best[-1]!r}", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    o = _read_ontology(args.ontology)
    g = Grounding.load(args.grounding)
    ci = crispify(g, args.crisp_alpha)
    nt = normalize(o)
    loss, _ = hierarchical_loss(seed_fresh_assertions(nt, g), nt)
    report = {
        "crisp_alpha": args.crisp_alpha,
        "success_rate": success_rate(ci, o.tbox, "unknown-satisfies"),
        "success_rate_strict": success_rate(ci, o.tbox, "unknown-fails"),
        "fuzzy_success_rate": fuzzy_success_rate(g, o.tbox),
        "hierarchical_loss": loss,
        "axioms": [
            {"axiom": render_axiom(ax), "verdict": crisp_eval_axiom(ci, ax).name} for ax in o.tbox
        ],
    }
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return EXIT_OK


def _synthetic_spec(args) -> SyntheticSpec:
    return SyntheticSpec(
        args.individuals, args.concepts, args.roles, args.axioms, density=args.density, seed=args.data_seed
    )


def _add_synthetic_args(p, seed_flag):
    p.add_argument("--individuals", type=int, default=12)
    p.add_argument("--concepts", type=int, default=6)
    p.add_argument("--roles", type=int, default=1)
    p.add_argument("--axioms", type=int, default=15)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument(seed_flag, dest="data_seed", type=int, default=0)


def cmd_gen_synthetic(args) -> int:
    o, ideal = gen_synthetic(_synthetic_spec(args))
    _write_text(args.out_ontology, render_ontology(o))
    ideal.save(args.out_ideal)
    return EXIT_OK


def cmd_experiment(args) -> int:
    if (args.ontology is None) != (args.ideal is None):
        raise _UsageError("--ontology and --ideal must be given together")
    if args.ontology:
        o, ideal = _read_ontology(args.ontology), Grounding.load(args.ideal)
    else:
        o, ideal = gen_synthetic(_synthetic_spec(args))
    m = MaskSpec(args.mask_rate, (args.unknown_lo, args.unknown_hi), args.seed, args.concepts_only)
    t = _train_config(args)
    if args.kind == "mask-revision":
        report = run_mask_revision(o, ideal, m, t)
    else:
        report = run_cqa(o, ideal, m, t, n_queries=args.queries, threshold=args.threshold)
    if args.report:
        report.save(args.report)
    else:
        sys.stdout.write(report.to_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dfalc", description="Normalize ALC ontologies and revise fuzzy groundings.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("normalize", help="rewrite a TBox into normal forms")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_normalize)

    s = sub.add_parser("ground", help="revise a grounding by gradient descent")
    s.add_argument("--ontology", required=True)
    s.add_argument("--init", help="initial grounding JSON (default: the ontology's ABox)")
    _add_train_args(s)
    s.add_argument("--out", default="-")
    s.add_argument("--log", help="write the per-epoch CSV log here")
    s.add_argument("--keep-fresh", action="store_true", help="keep introduced names in the output")
    s.set_defaults(func=cmd_ground)

    s = sub.add_parser("eval", help="score a grounding against a TBox")
    s.add_argument("--ontology", required=True)
    s.add_argument("--grounding", required=True)
    s.add_argument("--crisp-alpha", type=float, default=0.5)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("gen-synthetic", help="sample a synthetic ontology and its ideal grounding")
    _add_synthetic_args(s, "--seed")
    s.add_argument("--out-ontology", required=True)
    s.add_argument("--out-ideal", required=True)
    s.set_defaults(func=cmd_gen_synthetic)

    s = sub.add_parser("experiment", help="masked revision or query answering")
    s.add_argument("kind", choices=("mask-revision", "cqa"))
    s.add_argument("--mask-rate", type=float, required=True)
    s.add_argument("--unknown-lo", type=float, default=0.2)
    s.add_argument("--unknown-hi", type=float, default=0.8)
    s.add_argument("--concepts-only", action="store_true", help="mask concept entries only")
    s.add_argument("--ontology", help="ontology file (default: generate a synthetic one)")
    s.add_argument("--ideal", help="ideal grounding JSON matching --ontology")
    _add_synthetic_args(s, "--data-seed")
    _add_train_args(s)
    s.add_argument("--queries", type=int, default=20)
    s.add_argument("--threshold", type=float, default=0.8)
    s.add_argument("--report", help="write the JSON report here (default: stdout)")
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"dfalc: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (NonFiniteGradient, FloatingPointError) as e:
        print(f"dfalc: numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DFALCError, OSError, ValueError, KeyError) as e:
        print(f"dfalc: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
