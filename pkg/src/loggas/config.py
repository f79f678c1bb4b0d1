"""Experiment configuration and the measure / potential / kernel spec grammar.

Measure specs: ``semicircle[:center,radius]``, ``uniform:a,b``, ``dirac:c``,
``empirical:PATH``, ``gridded:PATH`` (line) and ``haar``, ``arc:a,b``
(circle). Potential specs: ``quadratic[:c]``, ``quartic:a,b``, ``zero``,
``cosine:a``. Kernel specs: ``log``, ``riesz:alpha``, ``invlog``.
"""

import json
from dataclasses import asdict, dataclass, field, fields

from .circle import CircularMeasure, arc, haar
from .energy import Kernel, Potential
from .errors import DomainError, SpecError
from .measures import Dirac, Semicircle, Uniform, load_empirical, load_gridded

__all__ = ["ExperimentConfig", "parse_measure", "parse_potential", "parse_kernel", "is_circular"]


def _numbers(args, spec, count):
    try:
        vals = [float(v) for v in args.split(",")] if args else []
    except ValueError:
        raise SpecError(f"non-numeric argument in {spec!r}") from None
    if len(vals) not in count:
        raise SpecError(f"{spec!r} takes {' or '.join(map(str, count))} numeric arguments")
    return vals


def parse_measure(spec):
    """Measure1D or CircularMeasure described by ``spec``."""
    name, _, args = str(spec).partition(":")
    try:
        if name == "semicircle":
            return Semicircle(*_numbers(args, spec, (0, 2)))
        if name == "uniform":
            return Uniform(*_numbers(args, spec, (2,)))
        if name == "dirac":
            return Dirac(*_numbers(args, spec, (1,)))
        if name == "haar":
            _numbers(args, spec, (0,))
            return haar()
        if name == "arc":
            return arc(*_numbers(args, spec, (2,)))
        if name in ("empirical", "gridded"):
            if not args:
                raise SpecError(f"{spec!r} needs a file path")
            try:
                return load_empirical(args) if name == "empirical" else load_gridded(args)
            except OSError as exc:
                raise SpecError(f"cannot read {args!r}: {exc.strerror}") from None
    except (ValueError, DomainError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"invalid measure {spec!r}: {exc}") from None
    raise SpecError(f"unknown measure {spec!r}")


def is_circular(m):
    return isinstance(m, CircularMeasure)


def parse_potential(spec):
    name, _, args = str(spec).partition(":")
    builders = {"quadratic": (0, 1), "quartic": (2,), "zero": (0,), "cosine": (1,)}
    if name not in builders:
        raise SpecError(f"unknown potential {spec!r}")
    vals = _numbers(args, spec, builders[name])
    try:
        return getattr(Potential, name)(*vals)
    except DomainError as exc:
        raise SpecError(f"invalid potential {spec!r}: {exc}") from None


def parse_kernel(spec):
    name, _, args = str(spec).partition(":")
    try:
        if name == "riesz":
            return Kernel.riesz(*_numbers(args, spec, (1,)))
        if name in ("log", "invlog"):
            _numbers(args, spec, (0,))
            return Kernel(name)
    except DomainError as exc:
        raise SpecError(f"invalid kernel {spec!r}: {exc}") from None
    raise SpecError(f"unknown kernel {spec!r}")


@dataclass
class ExperimentConfig:
    """Every setting a command reads; JSON round-trips to a canonical form."""

    command: str = ""
    kind: str = ""
    n: int = 200
    beta: float = 2.0
    reps: int = 500
    seed: int = 0
    stream: int = 0
    workers: int = 1
    potential: str = "quadratic:0.5"
    kernel: str = "log"
    measures: list = field(default_factory=list)
    metric: str = "angular"
    out: str = "."
    tol: float = 1e-8

    _INTS = ("n", "reps", "seed", "stream", "workers")
    _FLOATS = ("beta", "tol")

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    @classmethod
    def from_dict(cls, data):
        unknown = sorted(set(data) - set(cls.field_names()))
        if unknown:
            raise SpecError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**data)
        cfg._normalize()
        return cfg

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise SpecError("config must be a JSON object")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                return cls.from_json(fh.read())
        except OSError as exc:
            raise SpecError(f"cannot read config {path!r}: {exc.strerror}") from None

    def _normalize(self):
        try:
            for name in self._INTS:
                v = getattr(self, name)
                if isinstance(v, bool) or float(v) != int(float(v)):
                    raise ValueError(name)
                setattr(self, name, int(float(v)))
            for name in self._FLOATS:
                setattr(self, name, float(getattr(self, name)))
        except (TypeError, ValueError):
            raise SpecError(f"config field {name!r} has the wrong type") from None
        if isinstance(self.measures, str):
            self.measures = [self.measures]
        self.measures = [str(m) for m in self.measures]
        for name in ("command", "kind", "potential", "kernel", "metric", "out"):
            setattr(self, name, str(getattr(self, name)))

    def merged(self, overrides):
        """Copy with the non-None entries of ``overrides`` applied."""
        data = asdict(self)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return ExperimentConfig.from_dict(data)

    def to_dict(self):
        return asdict(self)

    def canonical_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
