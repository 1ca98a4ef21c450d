import argparse
import logging
import os
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from conelab import __version__
from conelab.config import Config
from conelab.exceptions import ConelabError, InvalidInputError, InvalidParameterError
from conelab.services.analysis import (
    abb_approximate,
    abb_degradation_table,
    gallery,
    is_maximal,
    modulus_profile,
    modulus_sweep,
    parse_schedule,
    pos_support_check,
    replay_certificate,
    stmax_delta_certificate,
)
from conelab.services.cones import base_of, make_cone
from conelab.services.sets import FIXED_DIMENSION, make_set
from conelab.services.solvers import SolverConfig
from conelab.utils.logging_config import setup_logging
from conelab.utils.output import write_rows

logger = logging.getLogger(__name__)

COMMANDS = ("gallery", "abb", "modulus", "check", "certify")
ABB_RESIDUAL_TOL = 1e-8
VECTOR_OPTIONS = ("--point", "--target", "--functional", "--epsilon")
NEGATIVE_VALUE = re.compile(r"^-\.?\d")


@dataclass(slots=True)
class RunConfig:
    command: str
    family: Optional[str] = None
    instance: Optional[str] = None
    cone: Optional[str] = None
    N: Optional[int] = None
    n_max: int = 10
    point: Optional[str] = None
    target: Optional[str] = None
    functional: Optional[str] = None
    epsilon: List[float] = field(default_factory=lambda: [0.5])
    schedule: Optional[str] = None
    sweep: Optional[List[int]] = None
    tol: float = Config.TOL
    seed: int = 0
    output: Optional[str] = None
    save: bool = False
    format: str = "csv"
    log_level: str = Config.LOG_LEVEL
    log_dir: Optional[str] = Config.LOG_DIR
    record_timing: bool = False


def parse_vector(text: Optional[str], N: int, name: str = "vector") -> np.ndarray:
    """Comma-separated decimals zero-padded to N; "0" is the zero vector"""
    if text is None or text.strip() in ("", "0"):
        return np.zeros(N)
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError as e:
        raise InvalidInputError(f"malformed {name} {text!r}: {str(e)}") from e
    if len(values) > N:
        raise InvalidInputError(f"{name} has {len(values)} coordinates but N = {N}")
    return np.concatenate([values, np.zeros(N - len(values))])


def _int_list(text: str) -> List[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text: str) -> List[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _instance(config: RunConfig):
    if not config.instance:
        raise InvalidParameterError(f"{config.command} needs --instance")
    N = FIXED_DIMENSION.get(config.instance, config.N)
    if N is None:
        given = [text for text in (config.point, config.target, config.functional) if text]
        N = max((len(text.split(",")) for text in given), default=None)
    K = make_set(config.instance, N)
    P = make_cone(config.cone, K.dim, K.ambient) if config.cone else K.default_cone()
    return K, P


def _gallery_rows(config: RunConfig, cfg: SolverConfig) -> List[Dict[str, Any]]:
    if not config.family:
        raise InvalidParameterError("gallery needs a family name")
    N = config.N or config.n_max + 1
    options = {}
    if config.point is not None:
        options['x'] = parse_vector(config.point, N, "point")
    return [row.to_dict() for row in gallery(config.family, config.n_max, N, cfg.tol, **options)]


def _abb_rows(config: RunConfig, cfg: SolverConfig) -> List[Dict[str, Any]]:
    if config.sweep:
        return [row.to_dict() for row in abb_degradation_table(config.sweep, cfg=cfg)]
    K, P = _instance(config)
    base = base_of(P, parse_vector(config.functional, K.dim, "functional") if config.functional else np.ones(K.dim))
    schedule = parse_schedule(config.schedule) if config.schedule else None
    trace = abb_approximate(K, P, base, parse_vector(config.target, K.dim, "target"), schedule, cfg)
    rows = []
    previous = np.inf
    for it in trace.iterates:
        row = it.to_dict()
        row['passed'] = bool(it.in_dilated_cone and it.margin > 0
                             and it.support_residual <= ABB_RESIDUAL_TOL
                             and it.distance_to_target <= previous + cfg.tol)
        previous = it.distance_to_target
        rows.append(row)
    return rows


def _modulus_rows(config: RunConfig, cfg: SolverConfig) -> List[Dict[str, Any]]:
    if config.sweep:
        if not config.instance:
            raise InvalidParameterError("modulus --sweep-N needs --instance")
        return [row.to_dict() for row in modulus_sweep(config.instance, config.sweep, config.epsilon[0], cfg)]
    K, P = _instance(config)
    x = parse_vector(config.point, K.dim, "point")
    rows = []
    for report in modulus_profile(K, P, x, config.epsilon, cfg):
        row = report.to_dict()
        row['passed'] = True
        rows.append(row)
    return rows


def _check_rows(config: RunConfig, cfg: SolverConfig) -> List[Dict[str, Any]]:
    K, P = _instance(config)
    x = parse_vector(config.point, K.dim, "point")
    maximal = is_maximal(K, P, x, cfg)
    row: Dict[str, Any] = {
        'instance': K.family,
        'N': K.dim,
        'maximal': maximal.verdict,
        'maximal_replayed': replay_certificate(maximal, K, P, x),
    }
    if config.functional is not None:
        support = pos_support_check(K, P, x, parse_vector(config.functional, K.dim, "functional"), cfg)
        row.update({
            'pos': support.verdict,
            'pos_replayed': replay_certificate(support, K, P, x),
            'margin': support.residuals['margin'],
            'gap': support.residuals['gap'],
            'witness': ";".join(f"{v:.17g}" for v in support.witness.coords) if support.witness else "",
        })
    row['passed'] = bool(maximal.verdict != "inconclusive"
                         and row['maximal_replayed'] and row.get('pos_replayed', True))
    return [row]


def _certify_rows(config: RunConfig, cfg: SolverConfig) -> List[Dict[str, Any]]:
    K, P = _instance(config)
    x = parse_vector(config.point, K.dim, "point")
    f = parse_vector(config.functional, K.dim, "functional") if config.functional else np.ones(K.dim)
    cert = stmax_delta_certificate(K, P, base_of(P, f), x, config.epsilon[0], cfg)
    row = {'instance': K.family, 'N': K.dim, 'epsilon': config.epsilon[0], **cert.to_dict()}
    row['passed'] = cert.violations == 0
    return [row]


HANDLERS = {
    "gallery": _gallery_rows,
    "abb": _abb_rows,
    "modulus": _modulus_rows,
    "check": _check_rows,
    "certify": _certify_rows,
}


def _metadata(config: RunConfig, cfg: SolverConfig) -> Dict[str, Any]:
    echo = asdict(config)
    echo.pop('log_dir', None)
    return {
        'command': config.command,
        'config': echo,
        'seed': cfg.seed,
        'schema_version': Config.SCHEMA_VERSION,
        'version': __version__,
    }


def _output_path(config: RunConfig) -> Optional[str]:
    if config.output:
        return config.output
    if config.save:
        name = config.family or config.instance or "run"
        return os.path.join(Config.OUTPUT_DIR, f"{config.command}-{name}.{config.format}")
    return None


def run(config: RunConfig) -> int:
    """Dispatch one command; 0 when every row passed, 1 on a failing row, 2 on an error"""
    started = time.perf_counter()
    try:
        cfg = SolverConfig.from_env(tol=config.tol, seed=Config.seed(config.seed))
        logger.info(f"Running {config.command} (tol={cfg.tol:g}, seed={cfg.seed})")
        rows = HANDLERS[config.command](config, cfg)
        metadata = _metadata(config, cfg)
        if config.record_timing:
            metadata['wall_time'] = time.perf_counter() - started
        write_rows(rows, config.format, _output_path(config), metadata)
    except ConelabError as e:
        logger.error(f"❌ {str(e)}")
        return 2
    except OSError as e:
        logger.error(f"❌ could not write output: {str(e)}")
        return 2

    failed = sum(not row.get('passed', True) for row in rows)
    if failed:
        logger.warning(f"❌ {config.command}: {failed} of {len(rows)} rows failed")
        return 1
    logger.info(f"✅ {config.command}: all {len(rows)} rows passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=int, help="truncation dimension")
    common.add_argument("--tol", type=float, default=Config.TOL)
    common.add_argument("--seed", type=int, default=0, help="overridden by CONELAB_SEED")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", help="output file, '-' for stdout (default)")
    common.add_argument("--save", action="store_true", help=f"write into {Config.OUTPUT_DIR}/")
    common.add_argument("--log-level", default=Config.LOG_LEVEL)
    common.add_argument("--log-dir", default=Config.LOG_DIR)
    common.add_argument("--record-timing", action="store_true", help="add wall time to JSON metadata")

    parser = argparse.ArgumentParser(prog="conelab", description="Cone-order maximality toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gallery", parents=[common], help="counterexample tables")
    p.add_argument("family")
    p.add_argument("--nmax", dest="n_max", type=int, default=10)
    p.add_argument("--point", help="start point of the triple family")

    p = sub.add_parser("abb", parents=[common], help="dilating-cone approximation trace")
    p.add_argument("--instance")
    p.add_argument("--cone", choices=("orthant", "slanted"))
    p.add_argument("--target")
    p.add_argument("--functional", help="base functional (default all ones)")
    p.add_argument("--schedule", help="geom:delta0:ratio:count or list:d1,d2,...")
    p.add_argument("--sweep", type=_int_list, help="degradation table over these N for kflat")

    p = sub.add_parser("modulus", parents=[common], help="strict-maximality modulus")
    p.add_argument("--instance")
    p.add_argument("--cone", choices=("orthant", "slanted"))
    p.add_argument("--point")
    p.add_argument("--epsilon", type=_float_list, default=[0.5])
    p.add_argument("--sweep-N", dest="sweep", type=_int_list, help="delta_hat at x = 0 over these N")

    p = sub.add_parser("check", parents=[common], help="maximality and positivity of a point")
    p.add_argument("--instance", required=True)
    p.add_argument("--cone", choices=("orthant", "slanted"))
    p.add_argument("--point")
    p.add_argument("--functional")

    p = sub.add_parser("certify", parents=[common], help="delta certificate of strict maximality")
    p.add_argument("--instance", required=True)
    p.add_argument("--cone", choices=("orthant", "slanted"))
    p.add_argument("--point")
    p.add_argument("--functional", help="base functional (default all ones)")
    p.add_argument("--epsilon", type=_float_list, default=[0.5])
    return parser


def _attach_negative_values(argv: Sequence[str]) -> List[str]:
    """Glue '--point -0.5,0.3' into '--point=-0.5,0.3' so argparse does not read an option"""
    tokens: List[str] = []
    for token in argv:
        if tokens and tokens[-1] in VECTOR_OPTIONS and NEGATIVE_VALUE.match(token):
            tokens[-1] = f"{tokens[-1]}={token}"
        else:
            tokens.append(token)
    return tokens


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    argv = sys.argv[1:] if argv is None else argv
    args = vars(build_parser().parse_args(_attach_negative_values(argv)))
    known = set(RunConfig.__dataclass_fields__)
    return RunConfig(**{key: value for key, value in args.items() if key in known})


def main(argv: Optional[Sequence[str]] = None) -> int:
    config = parse_args(argv)
    setup_logging(config.log_level, config.log_dir)
    logger.debug(f"Run configuration: {config}")
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
