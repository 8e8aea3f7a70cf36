import argparse
import json
import logging
import sys
import traceback
from pathlib import Path
from typing import Any, Callable, NamedTuple, Optional, Sequence

import jsonschema
import numpy as np
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from .abelgrp import (FiniteMatrixGroup, abelian_type, omega_index_check,
                      p_prime_order_check, verbal_w_index)
from .core import (Check, InternalInvariantViolation, PgrlError, Settings,
                   ShapeError, all_ok, check, logger)
from .formats import (dumps, parse_form_file, parse_matrix_file, validate,
                      write_json, write_record)
from .isotropy import (is_totally_isotropic, max_isotropic_dim,
                       random_form_search)
from .matalg import generate_algebra, is_commutative
from .nilring import (GroupElement, NilRingElement, VectorForm, commutator,
                      group_order, group_pow, homocyclic_isotropy_check,
                      quotient_type_check, random_element)
from .progress import enumeration_progress
from .verifier import (BuildReport, bound_table,
                       build_d16_power_evidence, build_example_semidirect,
                       build_jordan_family, build_pattern_group,
                       build_sylow_frattini, instance_checks, plain,
                       sanity_suite)
from .zeroideal import (certificate_from_json, certificate_to_json,
                        extract_zero_ideal, verify_certificate)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

MAX_SEED = 2**64 - 1


class Outcome(NamedTuple):
    """
    What a subcommand produces: its JSON payload, whether every mathematical
    check passed, and the schema the payload conforms to.
    """

    payload: dict[str, Any]
    ok: bool
    schema: str


def _seed(value: str) -> int:
    seed = int(value)
    if not 0 <= seed <= MAX_SEED:
        raise argparse.ArgumentTypeError(f"seed should lie in [0, 2^64), got {seed}")
    return seed


def _positive(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {number}")
    return number


def _non_negative(value: str) -> int:
    number = int(value)
    if number < 0:
        raise argparse.ArgumentTypeError(f"expected a non negative integer, got {number}")
    return number


def _console() -> Console:
    return Console()


def _show(title: str, rows: Sequence[tuple[str, Any]]) -> None:
    table = Table(title=f"[bold]{escape(title)}[/bold]")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", style="green", justify="right")
    for name, value in rows:
        table.add_row(escape(name), escape(str(plain(value))))
    _console().print(table)


def _show_checks(title: str, checks: Sequence[Check]) -> None:
    table = Table(title=f"[bold]{escape(title)}[/bold]")
    table.add_column("Check", style="cyan")
    table.add_column("Expected", style="magenta", justify="right")
    table.add_column("Measured", style="blue", justify="right")
    table.add_column("Ok", justify="center")
    for c in checks:
        mark = "[green]✓[/green]" if c["ok"] else "[red]✗[/red]"
        table.add_row(
            escape(c["name"]),
            escape(str(plain(c["expected"]))),
            escape(str(plain(c["measured"]))),
            mark,
        )
    _console().print(table)


def _load_group(path: Path, p: Optional[int] = None) -> FiniteMatrixGroup:
    gens = parse_matrix_file(path)
    group = FiniteMatrixGroup(gens)
    if p is not None and p != group.p:
        raise ShapeError(f"--p {p} does not match the modulus {group.p} of {path}")
    return group


def _enumerate(group: FiniteMatrixGroup, progress: bool) -> None:
    with enumeration_progress(group, enabled=progress):
        group.elements()


def zero_ideal_command(args: argparse.Namespace) -> Outcome:
    if args.verify is not None:
        payload = json.loads(Path(args.verify).read_text())
        alg, cert = certificate_from_json(payload)
        verified = verify_certificate(alg, cert)
        result = {
            "verified": verified,
            "n": alg.n,
            "p": alg.p,
            "dim_A": alg.dim,
            "k": cert.k,
            "codim": cert.final_codim,
        }
        _show("Certificate verification", list(result.items()))
        return Outcome(result, verified, "zero_ideal_verify")
    if args.gens is None:
        raise ShapeError("zero-ideal needs --gens FILE or --verify FILE")
    gens = parse_matrix_file(args.gens)
    alg = generate_algebra(gens, include_identity=args.unital)
    _, cert = extract_zero_ideal(alg)
    payload = certificate_to_json(alg, cert)
    ok = all(payload["checks"].values()) and verify_certificate(alg, cert)
    _show(
        "Zero ideal",
        [
            ("n", alg.n),
            ("p", alg.p),
            ("dim A", alg.dim),
            ("k = dim ker A", cert.k),
            ("steps", len(cert.steps)),
            ("dim B", payload["dim_B"]),
            ("codim(B, A)", cert.final_codim),
        ]
        + [(f"check {name}", value) for name, value in payload["checks"].items()],
    )
    return Outcome(payload, ok, "zero_ideal")


def closure_command(args: argparse.Namespace) -> Outcome:
    gens = parse_matrix_file(args.gens)
    alg = generate_algebra(gens, include_identity=args.unital)
    payload = {
        "n": alg.n,
        "p": alg.p,
        "dim": alg.dim,
        "unital": alg.unital,
        "commutative": is_commutative(alg),
        "basis": [m.tolist() for m in alg.basis],
    }
    _show("Generated algebra", [(k, v) for k, v in payload.items() if k != "basis"])
    return Outcome(payload, True, "closure")


def omega_index_command(args: argparse.Namespace) -> Outcome:
    group = _load_group(args.gens, args.p)
    _enumerate(group, args.progress)
    index, ok = omega_index_check(group)
    kind = abelian_type(group)
    p_prime = p_prime_order_check(group)
    payload = {
        "order": group.order,
        "type": kind.as_dict(),
        "index": index,
        "bound": group.p**group.n,
        "ok": ok and p_prime["ok"],
        "p_prime_order": p_prime["measured"],
        "p_prime_bound": p_prime["expected"],
    }
    _show(
        "|A : Omega_1(O_p(A))|",
        [("order", group.order), ("type", str(kind)), ("index", index),
         ("bound p^n", payload["bound"]), ("|A_p'|", p_prime["measured"]),
         ("ok", payload["ok"])],
    )
    return Outcome(payload, payload["ok"], "omega_index")


def abelian_type_command(args: argparse.Namespace) -> Outcome:
    group = _load_group(args.gens)
    _enumerate(group, args.progress)
    kind = abelian_type(group)
    payload = {
        "order": group.order,
        "type": kind.as_dict(),
        "invariants": kind.cyclic_factors(),
        "ok": kind.order == group.order,
    }
    _show("Abelian type", [("order", group.order), ("type", str(kind))])
    return Outcome(payload, payload["ok"], "abelian_type")


def verbal_index_command(args: argparse.Namespace) -> Outcome:
    group = _load_group(args.gens)
    _enumerate(group, args.progress)
    group.require_p_group()
    index = verbal_w_index(group)
    payload = {"order": group.order, "p": group.p, "index": index, "ok": True}
    _show("|P : w(P)|, w = x^(p^2) [y, z]", [("order", group.order), ("index", index)])
    return Outcome(payload, True, "verbal_index")


def _commutator_checks(form: VectorForm) -> list[Check]:
    checks = []
    for i in range(form.n):
        for j in range(i + 1, form.n):
            g = GroupElement(NilRingElement.basis_a(form, i))
            h = GroupElement(NilRingElement.basis_a(form, j))
            expected = GroupElement(NilRingElement.from_b(form, form.mats[:, i, j]))
            measured = commutator(g, h, form)
            checks.append(
                check(
                    f"[1+e{i}, 1+e{j}] = 1 + phi(e{i}, e{j})",
                    expected.s.b.tolist(),
                    measured.s.b.tolist(),
                    ok=measured == expected,
                )
            )
    return checks


def _exponent_check(form: VectorForm, seed: int, samples: int) -> Check:
    # 1 + pS has exponent p^(r-1)
    rng = np.random.default_rng(seed)
    p, r = form.p, form.r
    failures = 0
    for _ in range(samples):
        s = random_element(form, rng).s
        g = GroupElement(NilRingElement((p * s.a) % form.modulus, (p * s.b) % form.modulus))
        if not group_pow(g, p ** (r - 1), form).is_identity():
            failures += 1
    return check(f"(1 + p s)^(p^{r - 1}) = 1 on {samples} samples", 0, failures)


def build_group_command(args: argparse.Namespace) -> Outcome:
    form = parse_form_file(args.form)
    seed = args.seed if args.seed is not None else Settings.seed
    selected = {args.check} if args.check != "all" else {"commutators", "exponent", "quotient"}
    checks: list[Check] = []
    if "commutators" in selected:
        checks += _commutator_checks(form)
    if "exponent" in selected:
        checks.append(_exponent_check(form, seed, args.samples))
    if "quotient" in selected:
        checks.append(
            check("G/N homocyclic of rank n, exponent p^r", True, quotient_type_check(form))
        )
    if "homocyclic" in selected:
        checks.append(homocyclic_isotropy_check(form))
    payload = {
        "p": form.p,
        "r": form.r,
        "n": form.n,
        "k": form.k,
        "order": group_order(form),
        "seed": seed,
        "checks": checks,
        "ok": all_ok(checks),
    }
    _show_checks(f"Group of {form} (order {group_order(form)})", checks)
    return Outcome(payload, payload["ok"], "build_group")


def isotropy_command(args: argparse.Namespace) -> Outcome:
    if args.max_dim != (args.form is not None):
        raise ShapeError("--form and --max-dim go together")
    if args.max_dim:
        form = parse_form_file(args.form)
        dim, witness = max_isotropic_dim(form)
        payload = {
            "n": form.n,
            "k": form.k,
            "p": form.p,
            "max_isotropic_dim": dim,
            "witness": witness.basis.tolist(),
            "ok": is_totally_isotropic(form, witness),
        }
        _show("Maximal totally isotropic subspace", [("n", form.n), ("k", form.k), ("dim", dim)])
        return Outcome(payload, payload["ok"], "isotropy_form")
    missing = [name for name in ("n", "k", "p") if getattr(args, name) is None]
    if missing:
        raise ShapeError(f"isotropy needs --form FILE or --{', --'.join(missing)}")
    seed = args.seed if args.seed is not None else Settings.seed
    trials = args.trials if args.trials is not None else Settings.trials
    processes = args.processes if args.processes is not None else Settings.processes
    report = random_form_search(
        args.n, args.k, args.p, trials, seed, processes=processes, exhaustive=args.exhaustive
    )
    ok = not args.exhaustive or report["brute_force_agreements"] == trials
    payload = dict(report)
    payload["ok"] = ok
    _show(
        "Random form search",
        [
            ("n, k, p", f"{args.n}, {args.k}, {args.p}"),
            ("trials", trials),
            ("seed", seed),
            ("success", report["success"]),
            ("best max isotropic dim", report["best_max_isotropic_dim"]),
            ("histogram", report["histogram"]),
        ],
    )
    return Outcome(payload, ok, "isotropy")


def _single_case(args: argparse.Namespace) -> tuple[str, BuildReport]:
    builders: dict[str, Callable[[], BuildReport]] = {
        "semidirect": lambda: build_example_semidirect(args.m, args.p),
        "pattern": lambda: build_pattern_group(args.n, args.p),
        "sylow-frattini": lambda: build_sylow_frattini(args.n, args.p),
        "jordan": lambda: build_jordan_family(args.k, args.p),
        "d16": build_d16_power_evidence,
    }
    report = builders[args.family]()
    report.checks.extend(instance_checks(report))
    suffix = "_".join(f"{k}{v}" for k, v in report.params.items())
    return (f"{report.name}_{suffix}" if suffix else report.name), report


def verify_command(args: argparse.Namespace) -> Outcome:
    if args.family == "all":
        processes = args.processes if args.processes is not None else Settings.processes
        suite = sanity_suite(processes=processes)
        cases = suite["cases"]
    else:
        name, report = _single_case(args)
        record = report.record()
        record["case"] = name
        cases = [record]
    if args.record is not None:
        for record in cases:
            write_record(Path(args.record) / f"{record['case']}.toml", record)
    for record in cases:
        _show_checks(f"{record['case']}", record["checks"])
    ok = all(record["ok"] for record in cases)
    return Outcome({"ok": ok, "cases": cases}, ok, "verify")


def bounds_command(args: argparse.Namespace) -> Outcome:
    table = bound_table(args.k, args.n)
    payload = {key: plain(value) for key, value in table.items()}
    _show(f"Bounds at k={args.k}" + (f", n={args.n}" if args.n is not None else ""),
          list(payload.items()))
    return Outcome(payload, True, "bounds")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", type=Path, default=None, help="Write the JSON report to this file")
    common.add_argument("-v", "--verbose", action="store_true", help="Enable verbose output")
    common.add_argument("--config", type=Path, default=None, help="TOML configuration file")

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=_seed, default=None, help="64 bit unsigned seed")

    watched = argparse.ArgumentParser(add_help=False)
    watched.add_argument("--progress", action="store_true", help="Display an enumeration progress bar")

    parser = argparse.ArgumentParser(
        prog="pgrl", description="p-groups, matrix algebras and alternating forms over finite fields"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("zero-ideal", parents=[common], help="Extract a square-zero ideal")
    sub.add_argument("--gens", type=Path, help="Matrix file of generators")
    sub.add_argument("--unital", action="store_true", help="Adjoin the identity")
    sub.add_argument("--verify", type=Path, default=None, help="Re-check a certificate JSON file")
    sub.set_defaults(handler=zero_ideal_command)

    sub = commands.add_parser("closure", parents=[common], help="Algebra generated by matrices")
    sub.add_argument("--gens", type=Path, required=True, help="Matrix file of generators")
    sub.add_argument("--unital", action="store_true", help="Adjoin the identity")
    sub.set_defaults(handler=closure_command)

    sub = commands.add_parser(
        "omega-index", parents=[common, watched], help="|A : Omega_1(O_p(A))| of an abelian group"
    )
    sub.add_argument("--gens", type=Path, required=True, help="Matrix file of generators")
    sub.add_argument("--p", type=int, default=None, help="Expected prime")
    sub.set_defaults(handler=omega_index_command)

    sub = commands.add_parser(
        "abelian-type", parents=[common, watched], help="Invariant factors of an abelian group"
    )
    sub.add_argument("--gens", type=Path, required=True, help="Matrix file of generators")
    sub.set_defaults(handler=abelian_type_command)

    sub = commands.add_parser(
        "verbal-index", parents=[common, watched], help="|P : w(P)| for w = x^(p^2) [y, z]"
    )
    sub.add_argument("--gens", type=Path, required=True, help="Matrix file of generators")
    sub.set_defaults(handler=verbal_index_command)

    sub = commands.add_parser(
        "build-group", parents=[common, seeded], help="Check the group built from a form"
    )
    sub.add_argument("--form", type=Path, required=True, help="Form file")
    sub.add_argument(
        "--check",
        choices=["all", "commutators", "exponent", "quotient", "homocyclic"],
        default="all",
    )
    sub.add_argument("--samples", type=_positive, default=1000, help="Samples of the exponent check")
    sub.set_defaults(handler=build_group_command)

    sub = commands.add_parser(
        "isotropy", parents=[common, seeded], help="Totally isotropic subspaces of forms"
    )
    sub.add_argument("--form", type=Path, default=None, help="Form file (requires --max-dim)")
    sub.add_argument("--max-dim", action="store_true", help="Maximal isotropic dimension of --form (requires --form)")
    sub.add_argument("--n", type=_positive, default=None)
    sub.add_argument("--k", type=_positive, default=None)
    sub.add_argument("--p", type=int, default=None)
    sub.add_argument("--trials", type=_non_negative, default=None)
    sub.add_argument("--processes", type=_positive, default=None)
    sub.add_argument("--exhaustive", action="store_true", help="Re-check every trial by brute force")
    sub.set_defaults(handler=isotropy_command)

    sub = commands.add_parser("verify", parents=[common], help="Build example groups and check them")
    sub.add_argument(
        "family", choices=["semidirect", "pattern", "sylow-frattini", "jordan", "d16", "all"]
    )
    sub.add_argument("--m", type=_positive, default=1)
    sub.add_argument("--n", type=_positive, default=4)
    sub.add_argument("--k", type=_positive, default=1)
    sub.add_argument("--p", type=int, default=2)
    sub.add_argument("--processes", type=_positive, default=None)
    sub.add_argument("--record", type=Path, default=None, help="Directory of TOML expectation records")
    sub.set_defaults(handler=verify_command)

    sub = commands.add_parser("bounds", parents=[common], help="Evaluate the rank bounds")
    sub.add_argument("--k", type=_positive, required=True)
    sub.add_argument("--n", type=_positive, default=None)
    sub.set_defaults(handler=bounds_command)

    return parser


def _configure_logging(verbose: bool) -> None:
    if verbose:
        logging.basicConfig(
            level=logging.DEBUG,
            format="%(asctime)s - %(levelname)s - %(message)s",
        )
        logger.setLevel(logging.DEBUG)
        logger.disabled = False
    else:
        logger.disabled = True


def _error(e: BaseException) -> None:
    sys.stderr.write(f"Error: {str(e)}\n")
    sys.stderr.write(f"Traceback:\n{traceback.format_exc()}")


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand and return its exit code: 0 when every check passed,
    1 when a mathematical check failed, 2 on usage, parse or input errors.

    Args:
        argv (Optional[Sequence[str]]): The arguments, without the program name;
          defaults to sys.argv[1:].

    Returns:
        int: The exit code.
    """
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    _configure_logging(args.verbose)
    if args.command == "zero-ideal" and args.gens is not None and args.verify is not None:
        parser.print_usage(sys.stderr)
        sys.stderr.write("Error: --gens and --verify are exclusive\n")
        return EXIT_USAGE

    try:
        Settings.load(args.config)
        outcome: Outcome = args.handler(args)
        validate(outcome.payload, outcome.schema)
    except (InternalInvariantViolation, jsonschema.ValidationError) as e:
        _error(e)
        return EXIT_CHECK_FAILED
    except (PgrlError, OSError, ValueError) as e:
        _error(e)
        return EXIT_USAGE

    if args.json is not None:
        write_json(args.json, outcome.payload)
        logger.debug(f"report written to {args.json}")
    if not outcome.ok:
        sys.stderr.write(f"Failed checks:\n{dumps(outcome.payload)}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))

