"""Experiment configuration files.

The format is INI-style ``key = value`` lines grouped in sections; ``#``
starts a comment.  Every file opens with a ``[meta]`` section naming the
schema::

    [meta]
    schema = avgquery-config/1

    [experiment]
    kind = sweep            # run | sweep | certify | verify-bounds | distinguish
    name = or-classical
    seed = 7
    trials = 2000
    sizes = 256, 512, 1024
    out = results/or

    [algorithm]
    name = classical_or_sampler

    [tunables]              # optional, validated against the algorithm

    [function]
    kind = OR               # OR | MAJ | PARITY | THRESHOLD | SIMON
    theta = 1/10            # THRESHOLD only

    [distribution]
    kind = or_alpha         # uniform | or_alpha | simon_d1 | simon_d2
    alpha = 0.4

For SIMON and the Simon distributions ``sizes`` lists n, not N.  The
``distinguish`` kind reads ``m``, ``decider`` and ``amplify`` (majority vote
over that many truncated runs, default 1) from ``[experiment]`` and
needs no algorithm, function or distribution.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import algorithms as algs
from . import distributions as dist
from .oracle import MAJ, OR, PARITY, SIMON, THRESHOLD, BooleanFunction, Kind

SCHEMA = "avgquery-config/1"
KINDS = ("run", "sweep", "certify", "verify-bounds", "distinguish")
FUNCTIONS = {"OR": OR, "MAJ": MAJ, "PARITY": PARITY, "THRESHOLD": THRESHOLD, "SIMON": SIMON}
DISTRIBUTIONS = ("uniform", "or_alpha", "simon_d1", "simon_d2")

ALLOWED = {
    "meta": {"schema"},
    "experiment": {"kind", "name", "seed", "trials", "sizes", "out", "exact", "inner_reps",
                   "trials_per_input", "m", "decider", "amplify", "jobs"},
    "algorithm": {"name"},
    "tunables": None,  # checked against the algorithm
    "function": {"kind", "theta"},
    "distribution": {"kind", "alpha"},
}


class ConfigError(ValueError):
    """Raised for any invalid configuration; the CLI maps it to exit code 2."""


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    name: str
    seed: int
    sizes: tuple
    trials: int = 1000
    out: str = "results"
    exact: bool = False
    inner_reps: int = 100
    trials_per_input: int = 200
    jobs: int = 1
    algorithm: Optional[str] = None
    tunables: dict = field(default_factory=dict)
    function: Optional[str] = None
    theta: Fraction = Fraction(1, 10)
    distribution: Optional[str] = None
    alpha: Optional[float] = None
    m: Optional[int] = None
    decider: str = "transcript"
    amplify: int = 1

    def make_function(self, size: int) -> BooleanFunction:
        if self.function == "THRESHOLD":
            return THRESHOLD(size, self.theta)
        return FUNCTIONS[self.function](size)

    def make_distribution(self, size: int) -> dist.InputDistribution:
        if self.distribution == "uniform":
            N = size * 2**size if self.function == "SIMON" else size
            return dist.uniform(N)
        if self.distribution == "or_alpha":
            return dist.or_alpha(size, self.alpha)
        return getattr(dist, self.distribution)(size)

    def to_text(self) -> str:
        """Canonical config text; parses back to an equal config."""
        lines = ["[meta]", f"schema = {SCHEMA}", "", "[experiment]"]
        exp = {"kind": self.kind, "name": self.name, "seed": self.seed, "trials": self.trials,
               "sizes": ", ".join(str(s) for s in self.sizes), "out": self.out,
               "exact": str(self.exact).lower(), "inner_reps": self.inner_reps,
               "trials_per_input": self.trials_per_input, "jobs": self.jobs}
        if self.kind == "distinguish":
            exp.update(m=self.m, decider=self.decider, amplify=self.amplify)
        lines += [f"{k} = {v}" for k, v in exp.items()]
        if self.kind != "distinguish":
            lines += ["", "[algorithm]", f"name = {self.algorithm}"]
            if self.tunables:
                lines += ["", "[tunables]"] + [f"{k} = {_show(v)}" for k, v in sorted(self.tunables.items())]
            lines += ["", "[function]", f"kind = {self.function}"]
            if self.function == "THRESHOLD":
                lines.append(f"theta = {self.theta}")
            lines += ["", "[distribution]", f"kind = {self.distribution}"]
            if self.alpha is not None:
                lines.append(f"alpha = {self.alpha!r}")
        return "\n".join(lines) + "\n"


def _show(v) -> str:
    return "none" if v is None else str(v)


def _scalar(text: str):
    t = text.strip()
    low = t.lower()
    if low in ("none", ""):
        return None
    if low in ("true", "false"):
        return low == "true"
    for conv in (int, float):
        try:
            return conv(t)
        except ValueError:
            pass
    if "/" in t:
        try:
            return Fraction(t)
        except ValueError:
            pass
    return t


def _int(sec, key, default=None, minimum=1):
    if key not in sec:
        if default is None:
            raise ConfigError(f"[{sec.name}] is missing required key '{key}'")
        return default
    try:
        v = int(sec[key])
    except ValueError:
        raise ConfigError(f"[{sec.name}] {key} must be an integer, got {sec[key]!r}") from None
    if v < minimum:
        raise ConfigError(f"[{sec.name}] {key} must be >= {minimum}")
    return v


def parse_text(text: str, source: str = "<config>") -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None,
                                   default_section="__no_defaults__")
    cp.optionxform = str
    try:
        cp.read_string(text, source)
    except configparser.Error as e:
        raise ConfigError(f"{source}: {e}") from None
    for sname in cp.sections():
        if sname not in ALLOWED:
            raise ConfigError(f"unknown section [{sname}]")
        allowed = ALLOWED[sname]
        if allowed is not None:
            extra = set(cp[sname]) - allowed
            if extra:
                raise ConfigError(f"unknown key(s) in [{sname}]: {', '.join(sorted(extra))}")
    if not cp.has_section("meta") or cp["meta"].get("schema") != SCHEMA:
        raise ConfigError(f"[meta] schema must be {SCHEMA}")
    if not cp.has_section("experiment"):
        raise ConfigError("missing [experiment] section")
    e = cp["experiment"]
    kind = e.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"experiment kind must be one of {', '.join(KINDS)}, got {kind!r}")
    try:
        sizes = tuple(int(s) for s in e.get("sizes", "").split(",") if s.strip())
    except ValueError:
        raise ConfigError("sizes must be a comma-separated list of integers") from None
    if not sizes or min(sizes) < 1:
        raise ConfigError("sizes must list at least one positive integer")
    if kind == "sweep" and len(sizes) < 3:
        raise ConfigError("a sweep needs at least 3 sizes")
    exact = e.get("exact", "false").lower()
    if exact not in ("true", "false"):
        raise ConfigError("exact must be true or false")
    base = dict(
        kind=kind, name=e.get("name", kind), seed=_int(e, "seed", minimum=0), sizes=sizes,
        trials=_int(e, "trials", 1000), out=e.get("out", "results"), exact=exact == "true",
        inner_reps=_int(e, "inner_reps", 100, minimum=100), trials_per_input=_int(e, "trials_per_input", 200),
        jobs=_int(e, "jobs", 1),
    )
    if kind == "distinguish":
        for s in ("algorithm", "function", "distribution", "tunables"):
            if cp.has_section(s):
                raise ConfigError(f"[{s}] is not used by distinguish experiments")
        m = _int(e, "m")
        decider = e.get("decider", "transcript")
        from .harness import DECIDERS
        if decider not in DECIDERS:
            raise ConfigError(f"decider must be one of {', '.join(DECIDERS)}")
        if any(m > 2**n for n in sizes):
            raise ConfigError("m must not exceed 2^n for every n in sizes")
        return ExperimentConfig(m=m, decider=decider, amplify=_int(e, "amplify", 1), **base)
    for s in ("m", "decider", "amplify"):
        if s in e:
            raise ConfigError(f"{s} is only used by distinguish experiments")
    for s in ("algorithm", "function", "distribution"):
        if not cp.has_section(s):
            raise ConfigError(f"missing [{s}] section")
    name = cp["algorithm"].get("name")
    if name not in algs.REGISTRY:
        raise ConfigError(f"unknown algorithm {name!r}; known: {', '.join(sorted(algs.REGISTRY))}")
    spec = algs.REGISTRY[name]
    tunables = {k: _scalar(v) for k, v in (cp["tunables"].items() if cp.has_section("tunables") else [])}
    try:
        spec.tunables(None, **tunables)
    except KeyError as err:
        raise ConfigError(str(err.args[0])) from None
    fkind = cp["function"].get("kind")
    if fkind not in FUNCTIONS:
        raise ConfigError(f"function kind must be one of {', '.join(FUNCTIONS)}")
    if Kind(fkind.lower()) not in spec.computes:
        raise ConfigError(f"{name} does not compute {fkind}")
    theta = Fraction(1, 10)
    if "theta" in cp["function"]:
        if fkind != "THRESHOLD":
            raise ConfigError("theta applies only to THRESHOLD")
        try:
            theta = Fraction(cp["function"]["theta"])
        except ValueError:
            raise ConfigError("theta must be a fraction such as 1/10") from None
        if not 0 < theta < 1:
            raise ConfigError("theta must lie in (0, 1)")
    dk = cp["distribution"].get("kind")
    if dk not in DISTRIBUTIONS:
        raise ConfigError(f"distribution kind must be one of {', '.join(DISTRIBUTIONS)}")
    alpha = None
    if dk == "or_alpha":
        try:
            alpha = float(cp["distribution"]["alpha"])
        except (KeyError, ValueError):
            raise ConfigError("or_alpha needs a numeric alpha") from None
        if not 0 < alpha < 0.5:
            raise ConfigError(f"alpha = {alpha} violates the constraint alpha in (0, 1/2)")
    elif "alpha" in cp["distribution"]:
        raise ConfigError("alpha applies only to or_alpha")
    if (fkind == "SIMON") != (dk in ("simon_d1", "simon_d2") or dk == "uniform" and fkind == "SIMON"):
        raise ConfigError("SIMON pairs with simon_d1, simon_d2 or uniform; Simon distributions need SIMON")
    if spec.unit.value == "block" and fkind != "SIMON":
        raise ConfigError(f"{name} queries blocks and needs SIMON")
    return ExperimentConfig(algorithm=name, tunables=tunables, function=fkind, theta=theta,
                            distribution=dk, alpha=alpha, **base)


def load(path) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {p}: {e.strerror}") from None
    return parse_text(text, str(p))


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
