"""Command-line front end: one subcommand per toolkit operation, JSON out."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .config import get_config, reload_config
from .distcalc import EngelFlag, FlagFailure, check_engel
from .estimates import sample_certified_discs
from .exactnum import parse_gaussian
from .guards import BudgetExhausted, EngelError, Guard, InvalidInput, VerificationFailure
from .horizontal import (
    DiscModel,
    HorizontalDisc,
    integrate_horizontal_D,
    integrate_horizontal_E,
    remark_line,
    standard_forms,
    verify_tangency,
)
from .kobayashi import SearchConfig, finsler_report
from .moduli import TripleSet, affine_bijection_exists
from .obstacles import ShellSet, shell_membership
from .poly import UniPoly
from .schemas import (
    CurveSchema,
    ExperimentConfig,
    FieldSchema,
    FormSchema,
    Report,
    RunMetadata,
    ShearListSchema,
    ShellSetSchema,
)
from .steering import hermite_steer, path_endpoint_check
from .suites import SUITES, run_all, standard_d_frame
from .transport import cartan_prolong, pullback_flag, standard_contact_frame

logger = logging.getLogger(__name__)

STATUS = {0: "ok", 2: "invalid-input", 3: "verification-failure", 4: "budget-exhausted"}


def _vector(text: str) -> List[Any]:
    return [parse_gaussian(part) for part in text.split(",")]


def _unipoly(text: str) -> UniPoly:
    """Coefficients low to high, comma separated."""
    return UniPoly(_vector(text))


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read JSON from {path}: {exc}") from exc


def _flag_payload(flag: EngelFlag) -> Dict[str, Any]:
    return {
        "ok": True,
        "W": FieldSchema.from_field(flag.W).model_dump(),
        "D": [FieldSchema.from_field(X).model_dump() for X in flag.D.fields],
        "E": [FieldSchema.from_field(X).model_dump() for X in flag.E.fields],
        "d_forms": [FormSchema.from_form(f).model_dump() for f in flag.d_forms],
        "e_forms": [FormSchema.from_form(f).model_dump() for f in flag.e_forms],
    }


def _engel_result(frame: Any) -> Dict[str, Any]:
    result = check_engel(frame)
    if isinstance(result, FlagFailure):
        return {"ok": False, "stage": result.stage, "detail": result.detail, "observed_rank": result.observed_rank}
    return _flag_payload(result)


def _load_frame(inputs: Dict[str, Any]) -> Any:
    if inputs.get("frame"):
        return [FieldSchema.model_validate(item).to_field() for item in _read_json(inputs["frame"])]
    return standard_d_frame()


# subcommands


def cmd_flag(cfg: ExperimentConfig) -> Any:
    return _engel_result(_load_frame(cfg.inputs))


def cmd_tangency(cfg: ExperimentConfig) -> Any:
    curve = CurveSchema.model_validate(_read_json(cfg.inputs["curve"])).to_curve()
    model = DiscModel[cfg.inputs.get("model") or "D"]
    return verify_tangency(curve, standard_forms()[model]).to_dict()


def cmd_integrate(cfg: ExperimentConfig) -> Any:
    inputs = cfg.inputs
    if inputs.get("point") and inputs.get("dir"):
        disc: HorizontalDisc = remark_line(_vector(inputs["point"]), _vector(inputs["dir"]))
    elif inputs.get("model") == "E":
        disc = integrate_horizontal_E(
            _unipoly(inputs["w"]), _unipoly(inputs["x"]), _unipoly(inputs["z"]), parse_gaussian(inputs.get("y0") or "0")
        )
    else:
        if not inputs.get("w") or not inputs.get("x"):
            raise InvalidInput("integrate needs --w and --x, or --point and --dir")
        disc = integrate_horizontal_D(
            _unipoly(inputs["w"]),
            _unipoly(inputs["x"]),
            parse_gaussian(inputs.get("y0") or "0"),
            parse_gaussian(inputs.get("z0") or "0"),
        )
    return {"model": disc.model.value, "degenerate": disc.degenerate, "curve": CurveSchema.from_curve(disc.curve).model_dump()}


def _shell(inputs: Dict[str, Any], key: str = "set") -> ShellSet:
    schema = ShellSetSchema(kind=inputs[key], epsilon=inputs.get("epsilon"), n=inputs.get("n"), R=inputs.get("R"))
    return schema.to_shell_set()


def cmd_member(cfg: ExperimentConfig) -> Any:
    S = _shell(cfg.inputs)
    member = shell_membership(S, _vector(cfg.inputs["point"]))
    return {"set": S.descriptor(), "inside": member.inside, "layer": member.layer}


def cmd_lemma_verify(cfg: ExperimentConfig) -> Any:
    model = cfg.inputs.get("model") or "B"
    count = cfg.samples or get_config().get_sample_count("lemma")
    samples = sample_certified_discs(model, count, cfg.seed)
    verdicts = [s.verdict.model_dump() | {"index": s.index, "regime": s.regime, "injectivity": s.injectivity} for s in samples]
    failures = [v for v in verdicts if not v["passed"]]
    payload = {
        "verdicts": verdicts,
        "summary": {"model": model, "requested": count, "certified": len(samples), "counterexamples": len(failures)},
    }
    if failures:
        raise _WithPayload(VerificationFailure(f"{len(failures)} counterexamples to lemma {model}"), payload)
    return payload


def cmd_finsler(cfg: ExperimentConfig) -> Any:
    S = _shell(cfg.inputs, "obstacle")
    search = SearchConfig.from_config(seed=cfg.seed, degree=cfg.degree, restarts=cfg.restarts)
    report = finsler_report(_vector(cfg.inputs["point"]), _vector(cfg.inputs["dir"]), S, search)
    payload = report.model_dump()
    if report.witness is None:
        raise _WithPayload(BudgetExhausted("no certified disc within the search budget"), payload)
    return payload


def cmd_steer(cfg: ExperimentConfig) -> Any:
    p, q = _vector(cfg.inputs["from"]), _vector(cfg.inputs["to"])
    path = hermite_steer(p, q)
    if not path_endpoint_check(path, p, q):
        raise VerificationFailure("steered path misses its endpoints")
    return {
        "segments": [
            {"start": str(s.start), "end": str(s.end), "curve": CurveSchema.from_curve(s.curve).model_dump()}
            for s in path.segments
        ]
    }


def cmd_pullback(cfg: ExperimentConfig) -> Any:
    phi = ShearListSchema.model_validate(_read_json(cfg.inputs["shears"])).to_automorphism()
    flag = check_engel(_load_frame(cfg.inputs))
    if isinstance(flag, FlagFailure):
        raise InvalidInput(f"input structure is not Engel: {flag.stage}")
    return _flag_payload(pullback_flag(phi, flag))


def cmd_prolong(cfg: ExperimentConfig) -> Any:
    C1, C2, alpha = standard_contact_frame()
    chart = cfg.inputs.get("chart") or "0"
    frame = cartan_prolong(C1, C2, alpha, chart)
    return {"chart": chart, **_engel_result(frame)}


def cmd_moduli_check(cfg: ExperimentConfig) -> Any:
    witness = affine_bijection_exists(TripleSet.standard(cfg.inputs["R"]), TripleSet.standard(cfg.inputs["Rprime"]))
    return {"R": cfg.inputs["R"], "Rprime": cfg.inputs["Rprime"], "witness": witness.to_dict() if witness else None}


def cmd_reproduce_all(cfg: ExperimentConfig) -> Any:
    search = SearchConfig.from_config("suite", seed=cfg.seed, degree=cfg.degree, restarts=cfg.restarts)
    results = run_all(cfg.seed, cfg.samples, search, cfg.inputs.get("suite") or None)
    payload = {"suites": [r.model_dump() for r in results], "passed": all(r.passed for r in results)}
    if not payload["passed"]:
        failed = [r.name for r in results if not r.passed]
        raise _WithPayload(VerificationFailure(f"suites failed: {failed}"), payload)
    return payload


COMMANDS: Dict[str, Callable[[ExperimentConfig], Any]] = {
    "flag": cmd_flag,
    "tangency": cmd_tangency,
    "integrate": cmd_integrate,
    "member": cmd_member,
    "lemma-verify": cmd_lemma_verify,
    "finsler": cmd_finsler,
    "steer": cmd_steer,
    "pullback": cmd_pullback,
    "prolong": cmd_prolong,
    "moduli-check": cmd_moduli_check,
    "reproduce-all": cmd_reproduce_all,
}


class _WithPayload(Exception):
    """Carries a partial result alongside the error that decides the exit code."""

    def __init__(self, error: EngelError, payload: Any):
        super().__init__(str(error))
        self.error = error
        self.payload = payload


def run(cfg: ExperimentConfig, guard: Optional[Guard] = None) -> Tuple[int, Report]:
    guard = guard or Guard()
    if cfg.subcommand not in COMMANDS:
        raise InvalidInput(f"unknown subcommand {cfg.subcommand!r}")
    result: Any = None
    error: Optional[str] = None
    try:
        result = COMMANDS[cfg.subcommand](cfg)
        code = 0
    except _WithPayload as exc:
        result = exc.payload
        error = str(exc.error)
        code = guard.record_error(cfg.subcommand, exc.error)
    except (EngelError, KeyError, ValueError) as exc:
        error = str(exc)
        code = guard.record_error(cfg.subcommand, exc)
    except Exception as exc:
        logger.exception("%s crashed", cfg.subcommand)
        error = f"{type(exc).__name__}: {exc}"
        code = guard.record_error(cfg.subcommand, VerificationFailure(error))
    report = Report(
        command=cfg.subcommand,
        version=__version__,
        status=STATUS.get(code, "invalid-input"),  # type: ignore[arg-type]
        exit_code=code,
        config=cfg,
        result=result,
        error=error,
    )
    return code, report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="engel", description="Exact toolkit for holomorphic Engel structures on C^4")
    parser.add_argument("--seed", type=int, default=None, help="master seed (default from config)")
    parser.add_argument("--samples", type=int, default=None)
    parser.add_argument("--degree", type=int, default=None, help="search degree budget")
    parser.add_argument("--restarts", type=int, default=None, help="search restarts")
    parser.add_argument("--out", default=None, help="write the report here and timing to <out>.meta.json")
    parser.add_argument("--format", choices=["json"], default="json")
    parser.add_argument("--log-level", default=None)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("flag", help="derive the Engel flag of a rank-2 frame")
    p.add_argument("--standard", action="store_true")
    p.add_argument("--frame", help="JSON list of fields")

    p = sub.add_parser("tangency", help="verify a curve is tangent to W, D or E")
    p.add_argument("--curve", required=True)
    p.add_argument("--model", choices=["W", "D", "E"], default="D")

    p = sub.add_parser("integrate", help="integrate a horizontal disc from free data")
    p.add_argument("--model", choices=["D", "E"], default="D")
    p.add_argument("--w")
    p.add_argument("--x")
    p.add_argument("--z")
    p.add_argument("--y0")
    p.add_argument("--z0")
    p.add_argument("--point")
    p.add_argument("--dir")

    p = sub.add_parser("member", help="decide membership in an obstacle set")
    p.add_argument("--set", required=True, choices=["A", "B", "K3", "KW", "Ln", "CR"])
    p.add_argument("--point", required=True)
    p.add_argument("--epsilon")
    p.add_argument("--n", type=int)
    p.add_argument("--R")

    p = sub.add_parser("lemma-verify", help="sample certified discs and check the derivative bounds")
    p.add_argument("--model", choices=["A", "B"], default="B")

    p = sub.add_parser("finsler", help="lower and upper bounds for the directed Finsler metric")
    p.add_argument("--point", required=True)
    p.add_argument("--dir", required=True)
    p.add_argument("--obstacle", choices=["A", "B"], default="B")

    p = sub.add_parser("steer", help="horizontal path between two points")
    p.add_argument("--from", dest="from_", required=True)
    p.add_argument("--to", required=True)

    p = sub.add_parser("pullback", help="pull an Engel flag back along shears")
    p.add_argument("--shears", required=True)
    p.add_argument("--flag", choices=["standard"], default="standard")
    p.add_argument("--frame")

    p = sub.add_parser("prolong", help="Cartan prolongation of the standard contact structure")
    p.add_argument("--chart", choices=["0", "inf"], default="0")

    p = sub.add_parser("moduli-check", help="affine bijections between {0,1,Ri} and {0,1,R'i}")
    p.add_argument("--R", required=True)
    p.add_argument("--Rprime", required=True)

    p = sub.add_parser("reproduce-all", help="run the acceptance suites")
    p.add_argument("--suite", action="append", choices=sorted(SUITES))
    return parser


GLOBAL_OPTIONS = ("seed", "samples", "degree", "restarts", "out", "format", "log_level", "subcommand")


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    inputs = {k.rstrip("_"): v for k, v in vars(args).items() if k not in GLOBAL_OPTIONS and v is not None}
    return ExperimentConfig(
        subcommand=args.subcommand,
        inputs=inputs,
        seed=args.seed if args.seed is not None else get_config().get_seed(),
        samples=args.samples,
        degree=args.degree,
        restarts=args.restarts,
        out=args.out,
        format=args.format,
    )


def _write(report: Report, out: Optional[str], metadata: RunMetadata) -> None:
    text = json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text)
    meta_path = path.with_name(path.name + ".meta.json")
    meta_path.write_text(metadata.model_dump_json(indent=2) + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = reload_config()
    logging.basicConfig(
        level=(args.log_level or config.get_log_level()).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    started = datetime.now(timezone.utc)
    clock = time.perf_counter()
    code, report = run(config_from_args(args))
    finished = datetime.now(timezone.utc)
    metadata = RunMetadata(
        started_at=started.isoformat(),
        finished_at=finished.isoformat(),
        duration_seconds=time.perf_counter() - clock,
        report_path=args.out,
    )
    _write(report, args.out, metadata)
    return code


if __name__ == "__main__":
    sys.exit(main())
