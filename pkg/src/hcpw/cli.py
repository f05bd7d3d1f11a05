"""Command-line interface.

Every subcommand prints one JSON report to stdout.  Exit codes: 0 on
success, 1 on a domain failure (failed verification, failed attack,
inconsistent inputs), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from hcpw import bundles, profile, rehearsal
from hcpw.accounts import AccountRecord, create_account, verify
from hcpw.instances import PlantedInstance
from hcpw.params import SchemeParams
from hcpw.scheme import SecretMapping, gen_mapping, respond


def _print(report: dict) -> None:
    print(json.dumps(report, indent=2, default=str))


def _params_from_args(args, n: int | None = None) -> SchemeParams:
    return SchemeParams(d=args.d, k1=args.k1, k2=args.k2,
                        n=args.n if n is None else n, t=args.t)


def cmd_gen_mapping(args) -> int:
    params = _params_from_args(args)
    mapping = gen_mapping(params, args.seed)
    mapping.save(args.out)
    _print({"out": args.out, "n": params.n, "d": params.d, "seed": args.seed})
    return 0


def cmd_gen_challenges(args) -> int:
    params = _params_from_args(args)
    bundle, mapping = bundles.publish(params, m=args.pairs, seed=args.seed)
    bundle.save(args.out)
    report = {"out": args.out, "pairs": args.pairs,
              "password_challenges": bundles.PASSWORD_CHALLENGE_COUNT}
    if args.mapping:
        stored = SecretMapping.load(args.mapping, params=params)
        record = create_account(stored, args.account_label, args.seed,
                                algorithm=args.hash)
        if args.account_out:
            record.save(args.account_out)
            report["account_out"] = args.account_out
        report["account_label"] = args.account_label
    _print(report)
    return 0


def cmd_respond(args) -> int:
    bundle = bundles.ChallengeBundle.load(args.challenge)
    mapping = SecretMapping.load(args.mapping, params=bundle.params)
    if not 0 <= args.index < len(bundle.password_challenges):
        _print({"error": f"challenge index {args.index} out of range"})
        return 1
    digits = respond(mapping, bundle.password_challenges[args.index])
    _print({"index": args.index, "response": digits})
    return 0


def cmd_verify(args) -> int:
    record = AccountRecord.load(args.account)
    try:
        ok = verify(record, args.digits)
    except ValueError as exc:
        _print({"error": str(exc)})
        return 1
    _print({"account_id": record.account_id, "ok": ok})
    return 0 if ok else 1


def cmd_analyze(args) -> int:
    report = profile.analyze(d=args.d, k1=args.k1, k2=args.k2,
                             budget=args.budget,
                             force_structured=args.structured_only)
    if args.csv:
        from hcpw import reportfig

        reportfig.write_csv(args.csv, ["quantity", "value"],
                            [["r", report["r"]], ["g", report["g"]],
                             ["s", report["s"]], ["method", report["method"]]])
        report["csv"] = args.csv
    _print(report)
    return 0


def _instance_from_bundle(path: str, sealed: str | None,
                          needs_mapping: bool = False) -> PlantedInstance:
    bundle = bundles.ChallengeBundle.load(path)
    mapping = None
    if sealed is not None:
        mapping = SecretMapping.load(sealed, params=bundle.params)
    elif needs_mapping:
        raise ValueError(
            "this attack simulates oracle access to the hidden mapping; "
            "supply --sealed")
    return PlantedInstance(params=bundle.params, mapping=mapping,
                           clauses=bundle.pair_clauses,
                           responses=bundle.pair_responses,
                           holdout=bundle.password_challenges)


def cmd_attack(args) -> int:
    from hcpw import attacks

    instance = _instance_from_bundle(args.bundle, args.sealed,
                                     needs_mapping=args.kind in ("spectral", "labels"))
    if args.kind == "gauss":
        report = attacks.gaussian_attack(instance, max_guesses=args.max_guesses)
    elif args.kind == "partial":
        report = attacks.partial_guess_attack(instance, guess_size=args.guess_size,
                                              seed_or_rng=args.seed,
                                              max_assignments=args.max_guesses)
    elif args.kind == "csp":
        report = attacks.csp_attack(instance, time_budget=args.time_budget)
    elif args.kind == "spectral":
        multiplier = (attacks.spectral.DEFAULT_BUDGET_MULTIPLIER
                      if args.budget_multiplier is None else args.budget_multiplier)
        report = attacks.spectral_attack(instance, seed_or_rng=args.seed,
                                         sample_budget=args.sample_budget,
                                         budget_multiplier=multiplier,
                                         delta=args.delta)
    elif args.kind == "labels":
        labeler = attacks.labels.noisy_labeler(instance, accuracy=args.label_accuracy,
                                               seed_or_rng=args.seed)
        rec = attacks.recover_from_labels(instance.params, labeler,
                                          seed_or_rng=args.seed + 1,
                                          restarts=args.restarts)
        consistent = instance.consistency_fraction(rec.sigma)
        out = {
            "attack": "labels",
            "success": bool(consistent == 1.0),
            "sigma": "".join(str(v) for v in rec.sigma) if instance.params.d <= 10 else rec.sigma.tolist(),
            "validation_score": rec.score,
            "pair_consistency": consistent,
            "stats": rec.stats,
        }
        _print(out)
        return 0 if out["success"] else 1

    out = {
        "attack": args.kind,
        "success": bool(report.success),
        "sigma": (None if report.sigma is None
                  else "".join(str(v) for v in report.sigma) if instance.params.d <= 10
                  else report.sigma.tolist()),
        "pairs_checked": getattr(report, "pairs_checked", instance.m),
        "elapsed": round(report.elapsed, 3),
        "stats": _jsonable(report.stats),
    }
    if hasattr(report, "nodes"):
        out["nodes"] = report.nodes
        out["timed_out"] = report.timed_out
    if args.figure:
        from hcpw import reportfig

        flat = {k: v for k, v in out["stats"].items() if isinstance(v, (int, float))}
        flat["elapsed"] = out["elapsed"]
        reportfig.save_attack_diagnostics(flat, args.figure,
                                          title=f"{args.kind} attack diagnostics")
        out["figure"] = args.figure
    _print(out)
    return 0 if out["success"] else 1


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def cmd_usability(args) -> int:
    profiles = rehearsal.build_profiles()
    if args.profile not in profiles:
        _print({"error": f"unknown profile {args.profile!r}",
                "known": sorted(profiles)})
        return 1
    params = SchemeParams(d=args.d, k1=args.k1, k2=args.k2, n=args.n, t=args.t)
    report = rehearsal.table_report(params, profiles[args.profile],
                                    draws=args.draws, seed=args.seed,
                                    deal_variables=not args.independent_clauses)
    if args.figure:
        from hcpw import reportfig

        reportfig.save_cue_rate_histogram(
            report["per_cue_histogram"], args.figure,
            title=f"{args.profile}, n={args.n}")
        report["figure"] = args.figure
    if args.csv:
        from hcpw import reportfig

        hist = report["per_cue_histogram"]
        rows = [[hist["rate_bin_edges"][i], hist["rate_bin_edges"][i + 1], c]
                for i, c in enumerate(hist["counts"])]
        reportfig.write_csv(args.csv, ["rate_low", "rate_high", "cues"], rows)
        report["csv"] = args.csv
    _print(report)
    return 0


def cmd_publish(args) -> int:
    params = _params_from_args(args)
    bundle, mapping = bundles.publish(params, m=args.pairs, seed=args.seed)
    bundle.save(args.out)
    mapping.save(args.sealed_out)
    _print({"out": args.out, "sealed_out": args.sealed_out, "pairs": bundle.m,
            "password_challenges": len(bundle.password_challenges),
            "seed_commitment": bundle.seed_commitment})
    return 0


def cmd_grade(args) -> int:
    bundle = bundles.ChallengeBundle.load(args.bundle)
    mapping = SecretMapping.load(args.sealed, params=bundle.params)
    submission = json.loads(Path(args.submission).read_text(encoding="utf-8"))
    try:
        results = bundles.grade(bundle, mapping, submission)
    except ValueError as exc:
        _print({"error": str(exc)})
        return 1
    _print({"results": results, "wins": sum(r["win"] for r in results)})
    return 0 if any(r["win"] for r in results) else 1


def cmd_serve(args) -> int:
    from hcpw.service import serve

    serve(args.port, data_dir=args.data_dir)
    return 0


def _add_scheme_args(sp, include_n: bool = True) -> None:
    sp.add_argument("--d", type=int, default=10)
    sp.add_argument("--k1", type=int, default=2)
    sp.add_argument("--k2", type=int, default=2)
    if include_n:
        sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--t", type=int, default=10)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hcpw", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen-mapping", help="draw and store a secret mapping")
    _add_scheme_args(sp)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_gen_mapping)

    sp = sub.add_parser("gen-challenges", help="generate challenge files (and optionally an account record)")
    _add_scheme_args(sp)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--pairs", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.add_argument("--mapping", help="mapping file for account-record creation")
    sp.add_argument("--account-label", default="account-0")
    sp.add_argument("--account-out")
    sp.add_argument("--hash", default="scrypt", choices=["scrypt", "sha256"])
    sp.set_defaults(fn=cmd_gen_challenges)

    sp = sub.add_parser("respond", help="compute the response to a stored password challenge")
    sp.add_argument("--mapping", required=True)
    sp.add_argument("--challenge", required=True)
    sp.add_argument("--index", type=int, default=0)
    sp.set_defaults(fn=cmd_respond)

    sp = sub.add_parser("verify", help="check a response against an account record")
    sp.add_argument("--account", required=True)
    sp.add_argument("--digits", required=True)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("analyze", help="security parameters of the response function")
    sp.add_argument("--d", type=int, default=10)
    sp.add_argument("--k1", type=int, default=2)
    sp.add_argument("--k2", type=int, default=2)
    sp.add_argument("--budget", type=int, default=10**7)
    sp.add_argument("--structured-only", action="store_true")
    sp.add_argument("--csv")
    sp.set_defaults(fn=cmd_analyze)

    sp = sub.add_parser("attack", help="run an attack against a published bundle")
    sp.add_argument("kind", choices=["gauss", "partial", "csp", "spectral", "labels"])
    sp.add_argument("--bundle", required=True)
    sp.add_argument("--sealed",
                    help="sealed mapping file; required for spectral (the oracle "
                         "samples against it) and labels (the labeler needs it)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-guesses", type=int)
    sp.add_argument("--guess-size", type=int, default=0)
    sp.add_argument("--time-budget", type=float, default=300.0)
    sp.add_argument("--sample-budget", type=int)
    sp.add_argument("--budget-multiplier", type=float,
                    default=None)
    sp.add_argument("--delta", type=float, default=0.0)
    sp.add_argument("--label-accuracy", type=float, default=0.4)
    sp.add_argument("--restarts", type=int, default=2000)
    sp.add_argument("--figure")
    sp.set_defaults(fn=cmd_attack)

    sp = sub.add_parser("usability", help="expected extra rehearsals for a visitation profile")
    sp.add_argument("--profile", required=True)
    _add_scheme_args(sp)
    sp.add_argument("--draws", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--independent-clauses", action="store_true",
                    help="draw clauses independently instead of dealing variables")
    sp.add_argument("--figure")
    sp.add_argument("--csv")
    sp.set_defaults(fn=cmd_usability)

    sp = sub.add_parser("publish", help="generate a public bundle and sealed mapping")
    _add_scheme_args(sp)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--pairs", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--sealed-out", required=True)
    sp.set_defaults(fn=cmd_publish)

    sp = sub.add_parser("grade", help="grade submissions against a sealed mapping")
    sp.add_argument("--bundle", required=True)
    sp.add_argument("--sealed", required=True)
    sp.add_argument("--submission", required=True,
                    help="JSON file {challenge_index: digit_string}")
    sp.set_defaults(fn=cmd_grade)

    sp = sub.add_parser("serve", help="run the local training/authentication service")
    sp.add_argument("--port", type=int, default=8765)
    sp.add_argument("--data-dir")
    sp.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        _print({"error": str(exc)})
        return 1


if __name__ == "__main__":
    sys.exit(main())
