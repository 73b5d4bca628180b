"""Plain key = value run configuration.

Grammar: one `section.key = value` per line, '#' starts a comment, blank
lines ignored.  Unknown keys are rejected so config typos fail loudly, and
every error names the offending key or line.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import ParseError, UnknownKey, OutOfRange, InvalidParams
from .grid import RadialGrid, Profile, MIN_COUNT
from .metric import MetricProfile
from .presets import xi_function, PRESET_NAMES


@dataclass(frozen=True)
class RunConfig:
    n: int = 2
    r_min: float = 1e-6
    r_max: float = 1e6
    count: int = 512
    preset: str = "cigar"
    beta: float = 0.5
    table: str = ""
    c0: float = 1.0
    t_end: float = 1.0
    dt_safety: float = 0.2
    output_times: tuple = ()
    epsilon: float = 0.1
    seed: int = 0

    def grid(self) -> RadialGrid:
        return RadialGrid.logspace(self.r_min, self.r_max, self.count)

    def preset_params(self) -> dict:
        if self.preset == "conoid":
            return {"beta": self.beta}
        if self.preset == "custom_table":
            return {"points": _parse_table(self.table)}
        return {}

    def metric(self, grid: RadialGrid | None = None) -> MetricProfile:
        grid = grid or self.grid()
        fn, slope0 = xi_function(self.preset, self.preset_params())
        xi = Profile(grid, fn(grid.nodes))
        return MetricProfile.from_xi(n=self.n, xi=xi, c0=self.c0,
                                     slope0=slope0)

    def flow_config(self, grid: RadialGrid | None = None):
        from .flow import FlowConfig
        return FlowConfig(n=self.n, grid=grid or self.grid(),
                          t_end=self.t_end, dt_safety=self.dt_safety)


def _parse_table(text: str):
    points = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            r, v = chunk.split(":")
            points.append((float(r), float(v)))
        except ValueError:
            raise InvalidParams(f"bad custom table entry {chunk!r}; "
                                "expected r:xi pairs separated by ';'")
    return points


def _float_list(raw: str):
    return tuple(float(x) for x in raw.replace(",", " ").split())


_SCHEMA = {
    "n": ("n", int, lambda v: v >= 1, ">= 1"),
    "grid.r_min": ("r_min", float, lambda v: v > 0, "> 0"),
    "grid.r_max": ("r_max", float, lambda v: v > 0, "> 0"),
    "grid.count": ("count", int, lambda v: v >= MIN_COUNT, f">= {MIN_COUNT}"),
    "xi.preset": ("preset", str, lambda v: v in PRESET_NAMES,
                  f"one of {PRESET_NAMES}"),
    "xi.beta": ("beta", float, lambda v: 0 < v < 1, "in (0, 1)"),
    "xi.table": ("table", str, lambda v: True, ""),
    "xi.c0": ("c0", float, lambda v: v > 0, "> 0"),
    "flow.t_end": ("t_end", float, lambda v: v >= 0, ">= 0"),
    "flow.dt_safety": ("dt_safety", float, lambda v: 0 < v <= 1, "in (0, 1]"),
    "flow.output_times": ("output_times", _float_list,
                          lambda v: all(x > 0 for x in v), "positive times"),
    "compare.epsilon": ("epsilon", float, lambda v: v > 0, "> 0"),
    "seed": ("seed", int, lambda v: 0 <= v < 2 ** 64, "a u64"),
}


def parse_config(text: str) -> RunConfig:
    """Parse config text into a RunConfig, applying defaults."""
    values = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(line_no, f"expected 'key = value', got {raw!r}")
        key, _, raw_val = line.partition("=")
        key = key.strip()
        raw_val = raw_val.strip()
        if key not in _SCHEMA:
            raise UnknownKey(f"unknown config key {key!r} (line {line_no})")
        attr, conv, check, domain = _SCHEMA[key]
        try:
            val = conv(raw_val)
        except ValueError:
            raise ParseError(line_no, f"cannot parse value for {key!r}: "
                             f"{raw_val!r}")
        if not check(val):
            raise OutOfRange(f"{key} = {raw_val} out of range (need {domain})")
        values[attr] = val
    cfg = RunConfig(**values)
    if cfg.r_min > cfg.r_max * 1e-6 * (1 + 1e-12):
        raise OutOfRange("grid.r_min must be <= 1e-6 * grid.r_max")
    if any(t > cfg.t_end for t in cfg.output_times):
        raise OutOfRange("flow.output_times must not exceed flow.t_end")
    return cfg


def config_to_text(cfg: RunConfig) -> str:
    """Render a RunConfig back to config text (all keys explicit)."""
    by_attr = {attr: key for key, (attr, *_rest) in _SCHEMA.items()}
    lines = []
    for f in fields(cfg):
        key = by_attr[f.name]
        v = getattr(cfg, f.name)
        if f.name == "output_times":
            v = ",".join(repr(x) for x in v)
        lines.append(f"{key} = {v}")
    return "\n".join(lines) + "\n"
