"""
Command-line front end.

Subcommands::

    fermiorder toy                        two-mode and three-mode worked examples
    fermiorder curve      [options]       CSV negativity curves, one per ordering
    fermiorder survey     [options]       exhaustive ordering survey (JSON)
    fermiorder mc-survey  [options]       sampled ordering survey (JSON)
    fermiorder figures    PRESET          grassmann-fig2 | dirac-singlet | spin32-hist

Exit status is 0 on success, 1 for invalid parameters and 2 when exhaustive
enumeration is refused because the mode set is too large.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .entanglement import (
    PartitionSpec,
    negativity,
    negativity_curve,
    partial_trace,
    von_neumann_entropy,
)
from .errors import DomainError, EnumerationRefused
from .fock_algebra import ModeId, ModeOrdering, make_state, reorder_basis
from .ordering_survey import (
    DEFAULT_MC_SAMPLES,
    DEFAULT_QUANTUM,
    SurveyReport,
    classification_grid,
    physical_permutation,
    survey_full,
    survey_monte_carlo,
)
from .rindler_states import (
    FieldSpec,
    JointStateSpec,
    UnruhWeights,
    dirac_singlet,
    dirac_state,
    generic_dirac_state,
    grassmann_fig_state,
    grassmann_state,
    spin32_singlet_analogue,
)

log = logging.getLogger("fermiorder")

DEFAULT_GRID = 33
# Sampled surveys default to a coarser grid; the 9 points are a subset of the
# 33-point grid, so the partition can only merge, and in practice does not.
DEFAULT_MC_GRID = 9
PRESETS = ("grassmann-fig2", "dirac-singlet", "spin32-hist")
STATES = ("default", "fig2", "singlet", "generic", "nopair", "spin32", "custom")


@dataclass
class RunConfig:
    command: str
    field_kind: str = "dirac"
    state: str = "default"
    p: float | None = None
    coeffs: tuple[float, ...] | None = None
    state_seed: int = 1
    qr: float = 1 / math.sqrt(2)
    grid: int | None = None
    quantum: float = DEFAULT_QUANTUM
    samples: int = DEFAULT_MC_SAMPLES
    seed: int = 0
    orderings: list[list[str]] = field(default_factory=list)
    out: Path | None = None
    format: str | None = None
    preset: str | None = None
    workers: int = 1

    def field_spec(self) -> FieldSpec:
        return FieldSpec.parse(self.field_kind)

    def weights(self) -> UnruhWeights:
        return UnruhWeights.from_qr(self.qr)

    def grid_values(self, sampled: bool = False) -> np.ndarray:
        n = self.grid if self.grid is not None else (DEFAULT_MC_GRID if sampled else DEFAULT_GRID)
        return classification_grid(n)

    def joint_spec(self) -> JointStateSpec:
        f = self.field_spec()
        w = self.weights()
        state = self.state
        if state == "default":
            state = "fig2" if f.is_grassmann else "spin32" if f.chain_length == 4 else "singlet"
        if state == "custom":
            return self._custom(f, w)
        if state == "fig2" and f.is_grassmann:
            return grassmann_fig_state(w)
        if state == "singlet" and f.chain_length == 2:
            return dirac_singlet(w)
        if state in ("generic", "nopair") and f.chain_length == 2:
            return generic_dirac_state(self.state_seed, pairs=state == "generic", weights=w)
        if state == "spin32" and f.chain_length == 4:
            return spin32_singlet_analogue(w)
        raise DomainError(f"state {state!r} is not available for the {f.name} field")

    def _custom(self, f: FieldSpec, w: UnruhWeights) -> JointStateSpec:
        if self.p is None or self.coeffs is None:
            raise DomainError("--state custom needs --p and --coeffs")
        c = self.coeffs
        if f.is_grassmann:
            if len(c) != 4:
                raise DomainError("Grassmann --coeffs takes a1,b1,a2,b2")
            return grassmann_state(self.p, *c, weights=w, name="grassmann-custom")
        if f.chain_length == 2:
            if len(c) != 8:
                raise DomainError("Dirac --coeffs takes a1,b1,c1,d1,a2,b2,c2,d2")
            return dirac_state(self.p, c[:4], c[4:], weights=w, name="dirac-custom")
        raise DomainError(f"custom states are not available for the {f.name} field")


# --- formatting --------------------------------------------------------------


def curve_csv(grid: Sequence[float], values: Sequence[float]) -> str:
    buf = io.StringIO()
    buf.write("r,negativity\n")
    for r, v in zip(grid, values):
        buf.write(f"{float(r)!r},{float(v)!r}\n")
    return buf.getvalue()


def report_json(report: SurveyReport) -> str:
    return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"


def histogram_csv(report: SurveyReport) -> str:
    lines = ["rank,population,is_physical"]
    for k, c in enumerate(report.classes, 1):
        lines.append(f"{k},{c.population},{int(c.contains_physical)}")
    return "\n".join(lines) + "\n"


def _write(path: Path | None, text: str):
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    log.info("wrote %s", path)


# --- worked examples ------------------------------------------------------------


def toy_results() -> dict[str, float]:
    """Entropies and negativities of the two-mode and three-mode examples."""
    a, b, c = ModeId.named("a"), ModeId.named("b"), ModeId.named("c")
    ab, ba = ModeOrdering([a, b]), ModeOrdering([b, a])
    psi = make_state(ab, {"00": 0.5, "01": 0.5, "10": 0.5, "11": 0.5})
    keep_first = PartitionSpec(0, (), (1,))
    s_ab = von_neumann_entropy(partial_trace(psi, keep_first))
    # trace out b in the b-first basis: position 0 is b, position 1 is a
    s_ba = von_neumann_entropy(partial_trace(reorder_basis(psi, ba), PartitionSpec(1, (), (0,))))

    abc, acb = ModeOrdering([a, b, c]), ModeOrdering([a, c, b])
    phi = make_state(abc, {"100": 0.5, "010": 0.5, "101": 0.5, "011": 0.5})
    n_abc = negativity(partial_trace(phi, PartitionSpec(0, (1,), (2,))))
    n_acb = negativity(partial_trace(reorder_basis(phi, acb), PartitionSpec(0, (2,), (1,))))
    return {
        "entropy_ab": s_ab,
        "entropy_ba": s_ba,
        "negativity_abc": n_abc,
        "negativity_acb": n_acb,
    }


def _cmd_toy(cfg: RunConfig) -> int:
    res = toy_results()
    if cfg.format == "json":
        _write(cfg.out, json.dumps(res, indent=2) + "\n")
        return 0
    text = (
        "two modes, state (|00>+|01>+|10>+|11>)/2 written in the (a, b) basis\n"
        f"  ordering (a, b): entropy of a = {res['entropy_ab']:.6f}\n"
        f"  ordering (b, a): entropy of a = {res['entropy_ba']:.6f}\n"
        "three modes, state (|100>+|010>+|101>+|011>)/2 written in the (a, b, c) basis, c traced\n"
        f"  ordering (a, b, c): negativity = {res['negativity_abc']:.6f}\n"
        f"  ordering (a, c, b): negativity = {res['negativity_acb']:.6f}\n"
    )
    _write(cfg.out, text)
    return 0


# --- curves and surveys -----------------------------------------------------------


def _orderings(cfg: RunConfig, f: FieldSpec) -> list[ModeOrdering]:
    if cfg.orderings:
        return [f.ordering_from_labels(labels) for labels in cfg.orderings]
    return [f.canonical_ordering(), physical_permutation(f).ordering(f)]


def _cmd_curve(cfg: RunConfig) -> int:
    f = cfg.field_spec()
    spec = cfg.joint_spec()
    grid = cfg.grid_values()
    orderings = _orderings(cfg, f)
    if cfg.out is None:
        for ordering in orderings:
            curve = negativity_curve(spec, f, ordering, grid)
            sys.stdout.write("# " + " ".join(ordering.labels[1:]) + "\n")
            sys.stdout.write(curve_csv(curve.grid, curve.values))
        return 0
    for k, ordering in enumerate(orderings):
        curve = negativity_curve(spec, f, ordering, grid)
        _write(cfg.out / f"ordering-{k}.csv", curve_csv(curve.grid, curve.values))
    index = "".join(f"ordering-{k}.csv\t{' '.join(o.labels[1:])}\n" for k, o in enumerate(orderings))
    _write(cfg.out / "orderings.tsv", index)
    return 0


def _survey(cfg: RunConfig, sampled: bool) -> SurveyReport:
    f = cfg.field_spec()
    spec = cfg.joint_spec()
    grid = cfg.grid_values(sampled)
    if sampled:
        return survey_monte_carlo(
            spec, f, grid=grid, quantum=cfg.quantum, samples=cfg.samples, seed=cfg.seed,
            workers=cfg.workers,
        )
    return survey_full(spec, f, grid=grid, quantum=cfg.quantum, workers=cfg.workers)


def _cmd_survey(cfg: RunConfig, sampled: bool) -> int:
    report = _survey(cfg, sampled)
    _write(cfg.out, report_json(report))
    return 0


def _cmd_figures(cfg: RunConfig) -> int:
    out = cfg.out or Path("figures")
    preset = cfg.preset
    if preset == "grassmann-fig2":
        f = FieldSpec.grassmann()
        spec = grassmann_fig_state(cfg.weights())
        grid = cfg.grid_values()
        pairs = {
            "canonical": f.canonical_ordering(),
            "physical": physical_permutation(f).ordering(f),
        }
        for name, ordering in pairs.items():
            curve = negativity_curve(spec, f, ordering, grid)
            _write(out / f"grassmann-fig2-{name}.csv", curve_csv(curve.grid, curve.values))
        _write(out / "grassmann-fig2-survey.json", report_json(survey_full(spec, f, grid=grid)))
        return 0
    if preset == "dirac-singlet":
        f = FieldSpec.dirac()
        grid = cfg.grid_values()
        report = survey_full(dirac_singlet(cfg.weights()), f, grid=grid, workers=cfg.workers)
        _write(out / "dirac-singlet-survey.json", report_json(report))
        for k, c in enumerate(report.classes):
            _write(out / f"dirac-singlet-class-{k}.csv", curve_csv(report.grid, c.curve))
        return 0
    if preset == "spin32-hist":
        f = FieldSpec.parse("spin:3/2")
        report = survey_monte_carlo(
            spin32_singlet_analogue(cfg.weights()), f, grid=cfg.grid_values(sampled=True),
            quantum=cfg.quantum, samples=cfg.samples, seed=cfg.seed, workers=cfg.workers,
        )
        _write(out / "spin32-survey.json", report_json(report))
        _write(out / "spin32-hist.csv", histogram_csv(report))
        return 0
    raise DomainError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")


# --- argument parsing -----------------------------------------------------------


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _labels(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default="dirac", help="grassmann, dirac or spin:<s>")
    common.add_argument("--state", choices=STATES, default="default")
    common.add_argument("--p", type=float, help="amplitude P of a custom state")
    common.add_argument("--coeffs", type=_floats, help="branch coefficients of a custom state")
    common.add_argument("--state-seed", type=int, default=1, help="seed of the generic states")
    common.add_argument("--qr", type=float, default=1 / math.sqrt(2))
    common.add_argument("--grid", type=int, help="number of uniform r points on [0, pi/4]")
    common.add_argument("--quantum", type=float, default=DEFAULT_QUANTUM)
    common.add_argument("--samples", type=int, default=DEFAULT_MC_SAMPLES)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument(
        "--ordering", type=_labels, action="append", default=[],
        help="comma-separated labels of Rob's modes; repeat for several orderings",
    )
    common.add_argument("--out", type=Path)
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="fermiorder", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("toy", parents=[common], help="two-mode and three-mode worked examples")
    sub.add_parser("curve", parents=[common], help="negativity curves as CSV")
    sub.add_parser("survey", parents=[common], help="survey every ordering")
    sub.add_parser("mc-survey", parents=[common], help="survey sampled orderings")
    fig = sub.add_parser("figures", parents=[common], help="reproduce a figure preset")
    fig.add_argument("preset", choices=PRESETS)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        field_kind=ns.field,
        state=ns.state,
        p=ns.p,
        coeffs=ns.coeffs,
        state_seed=ns.state_seed,
        qr=ns.qr,
        grid=ns.grid,
        quantum=ns.quantum,
        samples=ns.samples,
        seed=ns.seed,
        orderings=ns.ordering,
        out=ns.out,
        format=ns.format,
        preset=getattr(ns, "preset", None),
        workers=ns.workers,
    )


def run_command(cfg: RunConfig) -> int:
    if cfg.format not in (None, "json") and cfg.command in ("survey", "mc-survey", "toy"):
        raise DomainError(f"{cfg.command} writes JSON, not {cfg.format}")
    if cfg.format not in (None, "csv") and cfg.command == "curve":
        raise DomainError("curve writes CSV")
    if cfg.workers < 1:
        raise DomainError("--workers must be at least 1")
    if cfg.command == "toy":
        return _cmd_toy(cfg)
    if cfg.command == "curve":
        return _cmd_curve(cfg)
    if cfg.command == "survey":
        return _cmd_survey(cfg, sampled=False)
    if cfg.command == "mc-survey":
        return _cmd_survey(cfg, sampled=True)
    if cfg.command == "figures":
        return _cmd_figures(cfg)
    raise DomainError(f"unknown command {cfg.command!r}")


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(message)s")
    try:
        return run_command(config_from_args(ns))
    except EnumerationRefused as exc:
        print(f"fermiorder: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ValueError) as exc:
        print(f"fermiorder: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
