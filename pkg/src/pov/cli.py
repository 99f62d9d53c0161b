"""Command-line scenario runner.

A scenario is one JSON document::

    {"bound": 5, "peaks": [-4, -3, 3, 4], "variant": "baseline",
     "profile": {"proposals": {"1": -4, "4": 4}}}

Rationals may be given as numbers or as ``"p/q"`` strings and are always
written back as strings. Exit codes: 0 success, 2 invalid input, 3 instance
too large.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional, Sequence, Union

from scipy import stats

from .elections import (
    ElectionProfile,
    certify_election,
    election_outcome,
    enumerate_election_equilibria,
)
from .engine import OutcomeLottery, RoleProfile, expected_utilities, outcome_lottery, sample_outcomes
from .equilibrium import (
    EquilibriumCertificate,
    certify,
    default_epsilon,
    default_grid_step,
    enumerate_equilibria,
)
from .model import InstanceTooLarge, InvalidInput, Polity, Q, as_rational, medians
from .tournament import (
    AugmentedPolity,
    augment,
    certify_tournament,
    predicted_equilibrium,
    tournament_lottery,
    uniqueness_report,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_TOO_LARGE = 3

VARIANTS = ("baseline", "tournament", "election")


@dataclass(frozen=True)
class ScenarioConfig:
    bound: Q
    peaks: tuple[Q, ...]
    variant: str = "baseline"
    artificial_peak: Optional[Q] = None
    epsilon: Optional[Q] = None
    grid_step: Optional[Q] = None
    max_proposers: int = 2
    profile: Union[RoleProfile, ElectionProfile, None] = None
    seed: Optional[int] = None

    @property
    def polity(self) -> Polity:
        return Polity(self.bound, self.peaks)

    @property
    def resolved_epsilon(self) -> Q:
        return self.epsilon if self.epsilon is not None else default_epsilon(self.polity)

    @property
    def resolved_grid_step(self) -> Q:
        return self.grid_step if self.grid_step is not None else default_grid_step(self.polity)

    def augmented(self) -> AugmentedPolity:
        peak = self.artificial_peak if self.artificial_peak is not None else Q(0)
        return augment(self.polity, peak)


def _field(doc: dict, name: str, parse, default=None):
    if name not in doc or doc[name] is None:
        return default
    try:
        return parse(doc[name])
    except (InvalidInput, TypeError, ValueError) as exc:
        raise InvalidInput(f"field '{name}': {exc}") from exc


def _parse_int(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidInput(f"expected an integer, got {value!r}")
    return value


def _parse_profile(value: Any, variant: str, n: int):
    if not isinstance(value, dict):
        raise InvalidInput("expected an object")
    if variant == "election":
        actions = value.get("actions")
        if not isinstance(actions, list) or len(actions) != n:
            raise InvalidInput(f"'actions' must list one entry per agent ({n})")
        return ElectionProfile(None if a in (None, "vote") else _parse_int(a) for a in actions)
    proposals = value.get("proposals", {})
    if not isinstance(proposals, dict):
        raise InvalidInput("'proposals' must map agent index to a value")
    return RoleProfile(n, {int(k): as_rational(v) for k, v in proposals.items()})


def parse_config(doc: Any) -> ScenarioConfig:
    """Validate a scenario document; a previously written report is accepted too."""
    if isinstance(doc, dict) and isinstance(doc.get("config"), dict):
        doc = doc["config"]
    if not isinstance(doc, dict):
        raise InvalidInput("a scenario must be a JSON object")
    if "bound" not in doc:
        raise InvalidInput("field 'bound': missing")
    if not isinstance(doc.get("peaks"), list):
        raise InvalidInput("field 'peaks': expected a list")
    bound = _field(doc, "bound", as_rational)
    peaks = _field(doc, "peaks", lambda xs: tuple(as_rational(x) for x in xs))
    try:
        polity = Polity(bound, peaks)
    except InvalidInput as exc:
        name = "bound" if "bound" in str(exc) else "peaks"
        raise InvalidInput(f"field '{name}': {exc}") from exc
    variant = doc.get("variant", "baseline")
    if variant not in VARIANTS:
        raise InvalidInput(f"field 'variant': expected one of {', '.join(VARIANTS)}")
    config = ScenarioConfig(
        bound=polity.bound,
        peaks=polity.peaks,
        variant=variant,
        artificial_peak=_field(doc, "artificial_peak", as_rational),
        epsilon=_field(doc, "epsilon", as_rational),
        grid_step=_field(doc, "grid_step", as_rational),
        max_proposers=_field(doc, "max_proposers", _parse_int, 2),
        profile=_field(doc, "profile", lambda v: _parse_profile(v, variant, polity.n)),
        seed=_field(doc, "seed", _parse_int),
    )
    _validate(config)
    return config


def _validate(config: ScenarioConfig) -> None:
    polity = config.polity
    if config.epsilon is not None and config.epsilon <= 0:
        raise InvalidInput("field 'epsilon': must be positive")
    if config.grid_step is not None and config.grid_step <= 0:
        raise InvalidInput("field 'grid_step': must be positive")
    if config.max_proposers < 0:
        raise InvalidInput("field 'max_proposers': must be non-negative")
    if config.artificial_peak is not None and not polity.contains(config.artificial_peak):
        raise InvalidInput("field 'artificial_peak': outside the policy interval")
    if isinstance(config.profile, RoleProfile):
        for agent, x in config.profile.proposals:
            if not polity.contains(x):
                raise InvalidInput(f"field 'profile': proposal of agent {agent} out of bounds")


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InvalidInput(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"config is not valid JSON: {exc}") from exc
    return parse_config(doc)


def _s(x: Any) -> Optional[str]:
    return None if x is None else str(x)


def profile_to_json(profile) -> Optional[dict]:
    if profile is None:
        return None
    if isinstance(profile, ElectionProfile):
        return {"actions": list(profile.actions)}
    return {"proposals": {str(a): str(x) for a, x in profile.proposals}}


def config_to_json(config: ScenarioConfig) -> dict:
    return {
        "bound": str(config.bound),
        "peaks": [str(p) for p in config.peaks],
        "variant": config.variant,
        "artificial_peak": _s(config.artificial_peak),
        "epsilon": _s(config.epsilon),
        "grid_step": _s(config.grid_step),
        "max_proposers": config.max_proposers,
        "profile": profile_to_json(config.profile),
        "seed": config.seed,
    }


def lottery_to_json(lottery: OutcomeLottery) -> list[dict]:
    return [{"policy": str(x), "probability": str(p)} for x, p in lottery]


def lottery_to_cell(lottery: OutcomeLottery) -> str:
    return ";".join(f"{x}:{p}" for x, p in lottery)


def certificate_to_json(cert: EquilibriumCertificate) -> dict:
    witness = None
    if cert.witness is not None:
        w = cert.witness
        witness = {
            "agent": w.agent,
            "action": str(w.action),
            "utility_before": str(w.utility_before),
            "utility_after": str(w.utility_after),
            "gain": str(w.gain),
        }
    return {"verdict": cert.verdict.value, "witness": witness}


def canonical_profile(config: ScenarioConfig):
    """The median (odd) or median-pair (even) profile, proposing own peaks."""
    polity = config.polity
    triple = medians(polity)
    chosen = sorted({triple.left, triple.right})
    if config.variant == "election":
        return ElectionProfile(a if a in chosen else None for a in polity.agents)
    if config.variant == "tournament":
        predicted = predicted_equilibrium(config.augmented())
        if predicted is not None:
            return predicted
    return RoleProfile(polity.n, {a: polity.peak(a) for a in chosen})


def run_verify(config: ScenarioConfig) -> dict:
    polity = config.polity
    profile = config.profile if config.profile is not None else canonical_profile(config)
    config = replace(config, profile=profile)
    if config.variant == "election":
        lottery = election_outcome(polity, profile)
        cert = certify_election(polity, profile)
    elif config.variant == "tournament":
        augmented = config.augmented()
        lottery = tournament_lottery(augmented, profile)
        cert = certify_tournament(augmented, profile, config.epsilon, config.grid_step)
    else:
        lottery = outcome_lottery(polity, profile)
        cert = certify(polity, profile, config.epsilon, config.grid_step)
    return {
        "command": "verify",
        "config": config_to_json(config),
        **certificate_to_json(cert),
        "lottery": lottery_to_json(lottery),
        "expected_utilities": {str(a): str(u) for a, u in expected_utilities(polity, lottery).items()},
    }


ROW_FIELDS = ("row", "roles", "proposals", "lottery", "outcome_class")


def _roles_cell(n: int, proposers: Sequence[int]) -> str:
    return "".join("P" if a in proposers else "V" for a in range(1, n + 1))


def run_enumerate(config: ScenarioConfig) -> dict:
    polity = config.polity
    summary: dict[str, Any] = {"command": "enumerate", "config": config_to_json(config)}
    if config.variant == "election":
        found = enumerate_election_equilibria(polity)
        classes: dict[OutcomeLottery, int] = {}
        rows = [
            {
                "roles": _roles_cell(polity.n, eq.profile.nominators),
                "proposals": ";".join(
                    f"{i}:{a}" for i, a in enumerate(eq.profile.actions, start=1) if a is not None
                ),
                "lottery": lottery_to_cell(eq.lottery),
                "outcome_class": classes.setdefault(eq.lottery, len(classes)),
            }
            for eq in found
        ]
    else:
        if config.variant == "tournament":
            report = uniqueness_report(
                config.augmented(), config.epsilon, config.grid_step, config.max_proposers
            )
            records = report.equilibria
            summary["predicted"] = profile_to_json(report.predicted)
            summary["unique"] = report.unique
            summary["confirms_prediction"] = report.confirms_prediction
        else:
            records = enumerate_equilibria(
                polity, config.max_proposers, config.epsilon, config.grid_step
            )
        rows = [
            {
                "roles": _roles_cell(polity.n, rec.profile.proposers),
                "proposals": ";".join(f"{a}:{x}" for a, x in rec.profile.proposals),
                "lottery": lottery_to_cell(rec.lottery),
                "outcome_class": rec.outcome_class,
            }
            for rec in records
        ]
    for i, row in enumerate(rows, start=1):
        row["row"] = i
    summary["count"] = len(rows)
    summary["rows"] = rows
    return summary


def run_sample(config: ScenarioConfig, samples: int) -> dict:
    if config.variant != "baseline":
        raise InvalidInput("field 'variant': sampling is available for the baseline procedure only")
    polity = config.polity
    profile = config.profile if config.profile is not None else canonical_profile(config)
    seed = config.seed if config.seed is not None else 0
    config = replace(config, profile=profile, seed=seed)
    exact = outcome_lottery(polity, profile)
    counts = Counter(sample_outcomes(polity, profile, samples, seed))
    atoms = [
        {
            "policy": str(x),
            "probability": str(p),
            "count": counts.get(x, 0),
            "frequency": counts.get(x, 0) / samples,
        }
        for x, p in exact
    ]
    report: dict[str, Any] = {
        "command": "sample",
        "config": config_to_json(config),
        "samples": samples,
        "atoms": atoms,
    }
    if len(exact) > 1:
        observed = [counts.get(x, 0) for x, _ in exact]
        expected = [float(p) * samples for _, p in exact]
        chi2, p_value = stats.chisquare(observed, expected)
        report["chi_square"] = float(chi2)
        report["p_value"] = float(p_value)
    return report


def render(report: dict, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        if "rows" in report:
            writer = csv.DictWriter(buf, fieldnames=ROW_FIELDS, lineterminator="\n")
            writer.writeheader()
            writer.writerows(report["rows"])
        else:
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["policy", "probability"])
            for atom in report.get("lottery", report.get("atoms", [])):
                writer.writerow([atom["policy"], atom["probability"]])
        return buf.getvalue()
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _write(report: dict, fmt: str, out: Optional[Path]) -> None:
    text = render(report, fmt)
    if out is None:
        sys.stdout.write(text)
        return
    out.write_text(text, encoding="utf-8")
    if fmt == "csv" and "rows" in report:
        summary = {k: v for k, v in report.items() if k != "rows"}
        out.with_suffix(".summary.json").write_text(render(summary, "json"), encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pov", description="Propose-or-Vote scenario runner")
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "verify": ("certify a profile (canonical median profile if none given)", "json"),
        "enumerate": ("list every certified equilibrium", "csv"),
        "tournament": ("uniqueness report under elimination voting", "csv"),
        "election": ("exhaustive equilibrium scan of the election variant", "csv"),
        "sample": ("Monte-Carlo draws against the exact lottery", "json"),
    }
    for name, (help_text, fmt) in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, required=True)
        p.add_argument("--out", type=Path)
        p.add_argument("--seed", type=int)
        p.add_argument("--grid-step")
        p.add_argument("--epsilon")
        p.add_argument("--max-proposers", type=int)
        p.add_argument("--format", choices=("csv", "json"), default=fmt)
        if name == "sample":
            p.add_argument("--samples", type=int, default=10000)
    return parser


def _apply_flags(config: ScenarioConfig, args: argparse.Namespace) -> ScenarioConfig:
    changes: dict[str, Any] = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.grid_step is not None:
        changes["grid_step"] = _field({"grid_step": args.grid_step}, "grid_step", as_rational)
    if args.epsilon is not None:
        changes["epsilon"] = _field({"epsilon": args.epsilon}, "epsilon", as_rational)
    if args.max_proposers is not None:
        changes["max_proposers"] = args.max_proposers
    if args.command == "tournament":
        changes["variant"] = "tournament"
        if isinstance(config.profile, ElectionProfile):
            changes["profile"] = None
    elif args.command == "election" and config.variant != "election":
        changes["variant"] = "election"
        changes["profile"] = None
    config = replace(config, **changes)
    _validate(config)
    return config


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _apply_flags(load_config(args.config), args)
        if args.command == "verify":
            report = run_verify(config)
        elif args.command == "sample":
            if args.samples <= 0:
                raise InvalidInput("--samples must be positive")
            report = run_sample(config, args.samples)
        else:
            report = run_enumerate(config)
        _write(report, args.format, args.out)
    except InvalidInput as exc:
        print(f"invalid-input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InstanceTooLarge as exc:
        print(f"instance-too-large: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
