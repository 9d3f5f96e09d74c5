"""Experiment configuration: sectioned key = value text files.

Format: `[section]` headers, `key = value` lines, `#`/`;` comments.  Values
are ints, floats, booleans (true/false), bracketed arrays, quoted or bare
strings.  Parse errors carry the offending line number.
"""

import ast
import math
from dataclasses import dataclass, field, asdict

from .errors import InvariantViolation, TypeMismatch, UnknownKey
from .engine import StepperConfig
from .lawlor import InitialProfile, LawlorConfig
from .clifford import CliffordConfig


@dataclass
class FrameCheckConfig:
    n: int = 2
    alpha: float = 0.0
    trials: int = 1000
    seed: int = 0


@dataclass
class ConvergenceConfig:
    problem: str = "heat_dirichlet"   # heat_dirichlet | lawlor_mms | clifford_mms
    grids: tuple = (50, 100, 200)
    t_final: float = 0.05
    scheme: str = "rk4"


@dataclass
class ExperimentConfig:
    scenario: str
    output_dir: str = "out"
    output_times: tuple = ()
    emit_svg: bool = False
    lawlor: LawlorConfig | None = None
    clifford: CliffordConfig | None = None
    frame_check: FrameCheckConfig | None = None
    convergence: ConvergenceConfig | None = None


_SCENARIOS = ("lawlor", "clifford", "frame_check", "convergence")

_DEFAULT_TIMES = {
    "lawlor": (0.5, 1.0, 2.0, 5.0, 10.0),
    "clifford": (0.5, 1.0, 2.0, 5.0, 10.0),
}


def _parse_value(raw, line):
    raw = raw.strip()
    low = raw.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if low in ("none", "null"):
        return None
    try:
        return ast.literal_eval(raw)
    except (ValueError, SyntaxError):
        pass
    if raw and all(c.isalnum() or c in "_-./" for c in raw):
        return raw  # bare word
    raise TypeMismatch(f"cannot parse value {raw!r}", line=line)


def _parse_sections(text):
    """-> {section: {key: (value, line)}}, preserving line numbers."""
    sections: dict[str, dict] = {}
    current = None
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        stripped = rawline.strip()
        if not stripped or stripped.startswith(("#", ";")):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip()
            sections.setdefault(current, {})
            continue
        if "=" not in stripped:
            raise TypeMismatch(f"expected key = value, got {stripped!r}", line=lineno)
        if current is None:
            raise UnknownKey(f"key outside any [section]: {stripped!r}", line=lineno)
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if not key:
            raise TypeMismatch("empty key", line=lineno)
        sections[current][key] = (_parse_value(raw, lineno), lineno)
    return sections


def _coerce(value, kind, key, line):
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeMismatch(f"{key}: expected a number, got {value!r}", line=line)
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeMismatch(f"{key}: expected an integer, got {value!r}", line=line)
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise TypeMismatch(f"{key}: expected a boolean, got {value!r}", line=line)
        return value
    if kind is str:
        if not isinstance(value, str):
            raise TypeMismatch(f"{key}: expected a string, got {value!r}", line=line)
        return value
    if kind == "float_list":
        if not isinstance(value, (list, tuple)):
            raise TypeMismatch(f"{key}: expected an array, got {value!r}", line=line)
        out = []
        for v in value:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise TypeMismatch(f"{key}: non-numeric entry {v!r}", line=line)
            out.append(float(v))
        return tuple(out)
    if kind == "int_list":
        if not isinstance(value, (list, tuple)):
            raise TypeMismatch(f"{key}: expected an array, got {value!r}", line=line)
        for v in value:
            if isinstance(v, bool) or not isinstance(v, int):
                raise TypeMismatch(f"{key}: non-integer entry {v!r}", line=line)
        return tuple(value)
    raise AssertionError(kind)


_SCHEMA = {
    "experiment": {
        "scenario": str, "output_dir": str, "output_times": "float_list",
        "emit_svg": bool,
    },
    "lawlor": {
        "alpha": float, "epsilon": float, "grid_n": int, "initial": str,
        "value": float, "amplitude": float, "width": float,
        "values": "float_list",
    },
    "clifford": {
        "alpha": float, "epsilon": float, "grid_n": int, "initial": str,
        "value": float, "amplitude": float, "width": float,
        "values": "float_list", "mode": str, "t0": float, "delta": float,
    },
    "frame_check": {
        "n": int, "alpha": float, "trials": int, "seed": int,
    },
    "convergence": {
        "problem": str, "grids": "int_list", "t_final": float, "scheme": str,
    },
    "stepper": {
        "scheme": str, "cfl_safety": float, "dt_max": float, "dt_min": float,
        "steady_tol": float, "dt_h2_factor": float, "max_steps": int,
    },
}


def _typed_section(sections, name):
    """Validated {key: (typed value, line)} for one section."""
    schema = _SCHEMA[name]
    out = {}
    for key, (value, line) in sections.get(name, {}).items():
        if key not in schema:
            raise UnknownKey(f"unknown key {key!r} in [{name}]", line=line)
        if value is None:
            out[key] = (None, line)
        else:
            out[key] = (_coerce(value, schema[key], key, line), line)
    return out


def _get(sec, key, default=None):
    return sec[key][0] if key in sec else default


def _line(sec, key, fallback=None):
    return sec[key][1] if key in sec else fallback


def _build_initial(sec, kind_default="constant"):
    kind = _get(sec, "initial", kind_default)
    if kind not in ("constant", "bump", "custom"):
        raise InvariantViolation(f"initial must be constant|bump|custom, got {kind!r}",
                                 line=_line(sec, "initial"))
    return InitialProfile(
        kind=kind,
        value=_get(sec, "value"),
        amplitude=_get(sec, "amplitude", 0.3),
        width=_get(sec, "width", 0.35),
        values=tuple(_get(sec, "values", ())),
    )


def _build_stepper(sec, dt_h2_default=20.0):
    try:
        return StepperConfig(
            scheme=_get(sec, "scheme", "semi_implicit"),
            cfl_safety=_get(sec, "cfl_safety", 0.2),
            dt_max=_get(sec, "dt_max"),
            dt_min=_get(sec, "dt_min", 1e-14),
            steady_tol=_get(sec, "steady_tol", 1e-8),
            dt_h2_factor=_get(sec, "dt_h2_factor", dt_h2_default),
            max_steps=_get(sec, "max_steps", 50_000_000),
        )
    except ValueError as exc:
        raise InvariantViolation(str(exc), line=_line(sec, "scheme", 0)) from exc


def _check_alpha(sec):
    alpha = _get(sec, "alpha", 0.0)
    if not -math.pi / 2 < alpha < math.pi / 2:
        raise InvariantViolation(f"alpha = {alpha:g} outside (-pi/2, pi/2)",
                                 line=_line(sec, "alpha"))
    return alpha


def _check_positive(sec, key, default, name):
    val = _get(sec, key, default)
    if val <= 0:
        raise InvariantViolation(f"{name} must be positive, got {val:g}",
                                 line=_line(sec, key))
    return val


def parse_config(text: str) -> ExperimentConfig:
    sections = _parse_sections(text)
    for name in sections:
        if name not in _SCHEMA:
            raise UnknownKey(f"unknown section [{name}]")
    exp = _typed_section(sections, "experiment")
    scenario = _get(exp, "scenario")
    if scenario is None:
        raise InvariantViolation("missing scenario in [experiment]")
    if scenario not in _SCENARIOS:
        raise InvariantViolation(f"scenario must be one of {_SCENARIOS}, "
                                 f"got {scenario!r}", line=_line(exp, "scenario"))
    times = _get(exp, "output_times", _DEFAULT_TIMES.get(scenario, ()))
    if any(b <= a for a, b in zip(times, times[1:])):
        raise InvariantViolation("output_times must be strictly increasing",
                                 line=_line(exp, "output_times"))
    cfg = ExperimentConfig(
        scenario=scenario,
        output_dir=_get(exp, "output_dir", "out"),
        output_times=tuple(times),
        emit_svg=_get(exp, "emit_svg", False),
    )
    stepper = _build_stepper(_typed_section(sections, "stepper"),
                             dt_h2_default=10.0 if scenario == "clifford" else 20.0)

    if scenario == "lawlor":
        sec = _typed_section(sections, "lawlor")
        alpha = _check_alpha(sec)
        eps = _check_positive(sec, "epsilon", 0.1, "epsilon")
        n = _get(sec, "grid_n", 400)
        if n < 8:
            raise InvariantViolation(f"grid_n must be >= 8, got {n}",
                                     line=_line(sec, "grid_n"))
        cfg.lawlor = LawlorConfig(alpha=alpha, epsilon=eps, grid_n=n,
                                  initial=_build_initial(sec, "bump"),
                                  stepper=stepper)
    elif scenario == "clifford":
        sec = _typed_section(sections, "clifford")
        alpha = _check_alpha(sec)
        eps = _check_positive(sec, "epsilon", 0.1, "epsilon")
        n = _get(sec, "grid_n", 400)
        if n < 8:
            raise InvariantViolation(f"grid_n must be >= 8, got {n}",
                                     line=_line(sec, "grid_n"))
        mode = _get(sec, "mode", "rescaled")
        if mode not in ("rescaled", "unrescaled"):
            raise InvariantViolation(f"mode must be rescaled|unrescaled, got {mode!r}",
                                     line=_line(sec, "mode"))
        t0 = _get(sec, "t0", -1.0)
        if mode == "unrescaled" and not t0 < 0:
            raise InvariantViolation(f"t0 must be negative, got {t0:g}",
                                     line=_line(sec, "t0"))
        cfg.clifford = CliffordConfig(
            alpha=alpha, epsilon=eps, grid_n=n,
            initial=_build_initial(sec, "bump"), stepper=stepper,
            mode=mode, t0=t0, delta=_check_positive(sec, "delta", 1e-3, "delta"))
    elif scenario == "frame_check":
        sec = _typed_section(sections, "frame_check")
        n = _get(sec, "n", 2)
        if n < 2:
            raise InvariantViolation(f"n must be >= 2, got {n}", line=_line(sec, "n"))
        trials = _get(sec, "trials", 1000)
        if trials < 1:
            raise InvariantViolation("trials must be >= 1", line=_line(sec, "trials"))
        cfg.frame_check = FrameCheckConfig(n=n, alpha=_check_alpha(sec),
                                           trials=trials, seed=_get(sec, "seed", 0))
    else:
        sec = _typed_section(sections, "convergence")
        problem = _get(sec, "problem", "heat_dirichlet")
        if problem not in ("heat_dirichlet", "lawlor_mms", "clifford_mms"):
            raise InvariantViolation(f"unknown convergence problem {problem!r}",
                                     line=_line(sec, "problem"))
        grids = _get(sec, "grids", (50, 100, 200))
        if len(grids) < 2 or any(b != 2 * a for a, b in zip(grids, grids[1:])):
            raise InvariantViolation("grid ladder must strictly double",
                                     line=_line(sec, "grids"))
        cfg.convergence = ConvergenceConfig(
            problem=problem, grids=tuple(grids),
            t_final=_check_positive(sec, "t_final", 0.05, "t_final"),
            scheme=_get(sec, "scheme", "rk4"))
    return cfg


def _fmt_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (tuple, list)):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return "none"
    return str(v)


def serialize_config(cfg: ExperimentConfig) -> str:
    """Canonical text for hashing and round-tripping."""
    lines = ["[experiment]",
             f"scenario = {cfg.scenario}",
             f"output_dir = {cfg.output_dir}",
             f"output_times = {_fmt_value(cfg.output_times)}",
             f"emit_svg = {_fmt_value(cfg.emit_svg)}"]

    def emit_flow(name, fc):
        lines.append(f"[{name}]")
        lines.append(f"alpha = {_fmt_value(fc.alpha)}")
        lines.append(f"epsilon = {_fmt_value(fc.epsilon)}")
        lines.append(f"grid_n = {fc.grid_n}")
        lines.append(f"initial = {fc.initial.kind}")
        if fc.initial.value is not None:
            lines.append(f"value = {_fmt_value(fc.initial.value)}")
        lines.append(f"amplitude = {_fmt_value(fc.initial.amplitude)}")
        lines.append(f"width = {_fmt_value(fc.initial.width)}")
        if fc.initial.values:
            lines.append(f"values = {_fmt_value(fc.initial.values)}")
        if name == "clifford":
            lines.append(f"mode = {fc.mode}")
            lines.append(f"t0 = {_fmt_value(fc.t0)}")
            lines.append(f"delta = {_fmt_value(fc.delta)}")
        st = fc.stepper
        lines.append("[stepper]")
        lines.append(f"scheme = {st.scheme}")
        lines.append(f"cfl_safety = {_fmt_value(st.cfl_safety)}")
        if st.dt_max is not None:
            lines.append(f"dt_max = {_fmt_value(st.dt_max)}")
        lines.append(f"dt_min = {_fmt_value(st.dt_min)}")
        lines.append(f"steady_tol = {_fmt_value(st.steady_tol)}")
        lines.append(f"dt_h2_factor = {_fmt_value(st.dt_h2_factor)}")
        lines.append(f"max_steps = {st.max_steps}")

    if cfg.scenario == "lawlor":
        emit_flow("lawlor", cfg.lawlor)
    elif cfg.scenario == "clifford":
        emit_flow("clifford", cfg.clifford)
    elif cfg.scenario == "frame_check":
        fc = cfg.frame_check
        lines += ["[frame_check]", f"n = {fc.n}", f"alpha = {_fmt_value(fc.alpha)}",
                  f"trials = {fc.trials}", f"seed = {fc.seed}"]
    else:
        cv = cfg.convergence
        lines += ["[convergence]", f"problem = {cv.problem}",
                  f"grids = {_fmt_value(cv.grids)}",
                  f"t_final = {_fmt_value(cv.t_final)}",
                  f"scheme = {cv.scheme}"]
    return "\n".join(lines) + "\n"
