"""Command-line harness.

    eprqss run --groups 500 --attack intercept-resend --threshold 0.07
    eprqss sweep-phi --points 9 --groups 2000 --p-check 1 --out curve.csv
    eprqss verify-table

Settings come from an optional ``key=value`` file (``--config``) and are
overridden by flags. Exit codes: 0 secure, 1 bad configuration, 2 aborted as
insecure, 3 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import adversary, analysis
from .protocol import ConfigError, Session, SessionConfig
from .protocol.config import parse_kind, parse_threshold

EXIT_OK, EXIT_CONFIG, EXIT_ABORTED, EXIT_VERIFY = 0, 1, 2, 3

CONFIG_KEYS = {
    "seed": "seed",
    "groups": "groups",
    "p_check": "p_check",
    "decoy_fraction": "decoy_fraction",
    "threshold": "threshold",
    "noise": "noise",
    "attack": "attack",
    "perm_alphabet": "perm_alphabet",
    "kind": "kind",
    "format": "format",
    "out": "out",
    "trials": "trials",
    "points": "points",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    if value is None:
        return ""
    return value


def _json_value(value):
    if isinstance(value, float):
        return float(format(value, ".12g")) if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def render_csv(rows) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: fmt(v) for k, v in row.items()})
    return buf.getvalue()


def render_json(obj) -> str:
    return json.dumps(_json_value(obj), indent=2, sort_keys=True) + "\n"


def read_config_file(path) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: cannot parse {line!r}")
            out[key] = value.strip()
    return out


def _common(p):
    p.add_argument("--config", help="key=value settings file")
    p.add_argument("--seed", type=int)
    p.add_argument("--groups", type=int, help="number of four-pair groups")
    p.add_argument("--p-check", type=float, dest="p_check")
    p.add_argument("--decoy-fraction", type=float, dest="decoy_fraction")
    p.add_argument("--threshold", help="abort threshold or preset name")
    p.add_argument("--noise", type=float, help="depolarizing probability per channel traversal")
    p.add_argument("--attack", help="none, intercept-resend[:B|C|BC], fake-signal[:B|C|BC], "
                                    "bell-guess[:per-pair], individual[:phi]")
    p.add_argument("--perm-alphabet", type=int, dest="perm_alphabet", choices=(1, 4, 24))
    p.add_argument("--kind", help="prepare every pair in this Bell state (psi-, psi+, phi-, phi+)")
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.add_argument("--format", choices=("csv", "json"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eprqss", description="EPR-pair quantum secret sharing simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, helptext in (
        ("run", "run one session and write its report and transcript"),
        ("attack", "run seeded trials of one attack and tabulate error rates"),
        ("efficiency", "run one session and report efficiency figures"),
        ("sweep-phi", "individual-attack curve: error rate, eigenvalues, information"),
        ("verify-table", "check the dense-coding key relation on all 64 cases"),
    ):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        if name == "attack":
            p.add_argument("--trials", type=int)
        if name == "sweep-phi":
            p.add_argument("--points", type=int, help="grid size on [0, pi/4]")
    return parser


def resolve(args) -> dict:
    """Merge the config file and flags into plain settings."""
    settings = {
        "seed": 0, "groups": 100, "p_check": 0.1, "decoy_fraction": 0.0, "threshold": "0",
        "noise": 0.0, "attack": "none", "perm_alphabet": 4, "kind": None,
        "format": "json" if args.command == "run" else "csv", "out": None,
        "trials": 1, "points": 33,
    }
    if args.config:
        settings.update(read_config_file(args.config))
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    try:
        for key in ("seed", "groups", "perm_alphabet", "trials", "points"):
            settings[key] = int(settings[key])
        for key in ("p_check", "decoy_fraction", "noise"):
            settings[key] = float(settings[key])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    settings["threshold"] = parse_threshold(settings["threshold"])
    if settings["format"] not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {settings['format']!r}")
    if settings["trials"] < 1 or settings["points"] < 2:
        raise ConfigError("trials must be >= 1 and points >= 2")
    return settings


def session_config(s: dict, seed=None) -> SessionConfig:
    return SessionConfig(
        n_groups=s["groups"],
        p_check=s["p_check"],
        decoy_fraction=s["decoy_fraction"],
        epsilon_threshold=s["threshold"],
        noise=s["noise"],
        seed=s["seed"] if seed is None else seed,
        perm_alphabet=s["perm_alphabet"],
        fixed_kind=parse_kind(s["kind"]) if s["kind"] else None,
    )


def strategy(s: dict):
    try:
        return adversary.make_strategy(s["attack"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def emit(text: str, out):
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _efficiency_dict(report):
    eff = analysis.efficiency_metrics(report)
    return None if eff is None else dict(eff.__dict__)


def cmd_run(s: dict) -> int:
    cfg = session_config(s)
    session = Session(cfg, strategy(s))
    report = session.run()
    record = report.to_dict()
    if s["format"] == "json":
        emit(render_json({"command": "run", "config": cfg.to_dict(), "report": record,
                          "efficiency": _efficiency_dict(report)}), s["out"])
    else:
        emit(render_csv([record]), s["out"])
    if s["out"]:
        session.transcript.write(s["out"] + ".transcript.jsonl")
    return EXIT_ABORTED if report.aborted else EXIT_OK


def cmd_attack(s: dict) -> int:
    rows = []
    any_abort = False
    for t in range(s["trials"]):
        cfg = session_config(s, seed=s["seed"] + t)
        strat = strategy(s)
        report = Session(cfg, strat).run()
        any_abort |= report.aborted
        row = {
            "trial": t,
            "seed": cfg.seed,
            "attack": strat.label,
            "check_kept": report.check_kept,
            "check_error_rate": report.check_error_rate,
            "check_kept_z": report.check_kept_z,
            "check_error_rate_z": report.check_errors_z / report.check_kept_z if report.check_kept_z else None,
            "decoy_kept": report.decoy_kept,
            "decoy_error_rate": report.decoy_error_rate,
            "key_pairs": report.pairs_used,
            "key_error_rate": report.key_error_rate,
            "aborted": report.aborted,
        }
        if isinstance(strat, adversary.BellGuess):
            row["guess_correct_fraction"] = strat.correct_guesses / max(strat.groups_attacked, 1)
        if isinstance(strat, adversary.Individual):
            row["epsilon_analytic"] = analysis.error_rate(strat.phi)
        rows.append(row)
    if s["format"] == "json":
        emit(render_json({"command": "attack", "rows": rows}), s["out"])
    else:
        emit(render_csv(rows), s["out"])
    return EXIT_ABORTED if any_abort else EXIT_OK


def cmd_efficiency(s: dict) -> int:
    cfg = session_config(s)
    report = Session(cfg, strategy(s)).run()
    row = {
        "seed": cfg.seed,
        "p_check": cfg.p_check,
        "decoy_fraction": cfg.decoy_fraction,
        "perm_alphabet": cfg.perm_alphabet,
        "pairs_total": report.pairs_total,
        "pairs_used": report.pairs_used,
        "key_bits": len(report.shared_key_alice),
        "classical_bits": report.classical_bits_exchanged,
        "aborted": report.aborted,
    }
    eff = _efficiency_dict(report) or {
        "intrinsic_efficiency": None, "bits_per_pair": None,
        "classical_bits_per_key_bit": None, "disclosure_bits_per_key_bit": None,
    }
    row.update(eff)
    if s["format"] == "json":
        emit(render_json({"command": "efficiency", "row": row}), s["out"])
    else:
        emit(render_csv([row]), s["out"])
    return EXIT_ABORTED if report.aborted else EXIT_OK


def cmd_sweep_phi(s: dict) -> int:
    cfg = session_config(s)
    rows = []
    for point, report in analysis.attack_sweep(analysis.default_phi_grid(s["points"]), cfg):
        lam = point.eigenvalues
        rows.append({
            "phi": point.phi,
            "epsilon_analytic": point.epsilon,
            "epsilon_empirical": report.check_errors_z / report.check_kept_z if report.check_kept_z else None,
            "z_checks": report.check_kept_z,
            "lambda_0": lam[0], "lambda_1": lam[1], "lambda_2": lam[2], "lambda_3": lam[3],
            "i_b_eigen": point.i_b,
            "i_b_printed_formula": point.i_b_printed,
        })
    if s["format"] == "json":
        emit(render_json({"command": "sweep-phi", "config": cfg.to_dict(), "rows": rows}), s["out"])
    else:
        emit(render_csv(rows), s["out"])
    return EXIT_OK


def cmd_verify_table(s: dict) -> int:
    rows = analysis.dense_coding_table()
    if s["format"] == "json":
        emit(render_json({"command": "verify-table", "rows": rows}), s["out"])
    else:
        emit(render_csv(rows), s["out"])
    bad = [r for r in rows if not r["ok"]]
    print(f"dense-coding table: {len(rows) - len(bad)}/{len(rows)} pass", file=sys.stderr)
    for r in bad:
        print(f"counterexample: {r}", file=sys.stderr)
    return EXIT_VERIFY if bad else EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "attack": cmd_attack,
    "efficiency": cmd_efficiency,
    "sweep-phi": cmd_sweep_phi,
    "verify-table": cmd_verify_table,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        settings = resolve(args)
        return COMMANDS[args.command](settings)
    except (UsageError, ConfigError, OSError) as exc:
        print(f"eprqss: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
