"""
Run Configuration

One TOML file configures every stage:

    [filter]  z_max, z_min, doppler_dev_max
    [loss]    lambda_dist, dist_clamp, eps
    [train]   lr, beta1, beta2, adam_eps, epochs, max_points, seed, use_temporal, augment_flip
    [model]   network sizes
    [cluster] y_scale, eps, min_pts, gap_split, subsample_max, ci_threshold, max_recluster_depth
    [gpr]     nu, lengthscale, signal_variance, noise_variance, jitter
    [radar]   sensor model used by `simulate`
    [run]     seed, fit_curves

Missing keys keep their defaults; unknown tables or keys are rejected.
"""

from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, List, Tuple
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from src.module2_sim.dataset_io import PathLike
from src.module2_sim.renderer import RadarModel
from src.module3_preprocess.filters import FilterConfig
from src.module4_segnet.losses import LossConfig
from src.module4_segnet.model import SegModelConfig
from src.module4_segnet.training import TrainConfig
from src.module5_curvefit.clustering import ClusterConfig
from src.module5_curvefit.gaussian_process import GPRConfig


@dataclass
class RunSettings:
    seed: int = 0
    fit_curves: bool = True

    def validate(self) -> Tuple[bool, List[str]]:
        return (True, []) if self.seed >= 0 else (False, ["seed must be >= 0"])


@dataclass
class RunConfig:
    """Every configurable parameter of a run, grouped by TOML table."""
    filter: FilterConfig = field(default_factory=FilterConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    model: SegModelConfig = field(default_factory=SegModelConfig)
    cluster: ClusterConfig = field(default_factory=ClusterConfig)
    gpr: GPRConfig = field(default_factory=GPRConfig)
    radar: RadarModel = field(default_factory=RadarModel)
    run: RunSettings = field(default_factory=RunSettings)

    @classmethod
    def tables(cls) -> List[str]:
        return [f.name for f in fields(cls)]

    def validate(self) -> Tuple[bool, List[str]]:
        errors = []
        for table in self.tables():
            ok, table_errors = getattr(self, table).validate()
            errors.extend(f"[{table}] {e}" for e in table_errors)
        return len(errors) == 0, errors

    def override(self, table: str, **values: Any) -> "RunConfig":
        """Copy with keys of one table replaced (None values are ignored)."""
        values = {k: v for k, v in values.items() if v is not None}
        if not values:
            return self
        section = _section(table, getattr(self, table), values)
        return replace(self, **{table: section})

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """
        Raises:
            ValueError: on unknown tables/keys or invalid values
        """
        config = cls()
        for table, values in data.items():
            if table not in cls.tables():
                raise ValueError(f"unknown config table [{table}]")
            if not isinstance(values, dict):
                raise ValueError(f"[{table}] must be a table")
            config = replace(config, **{table: _section(table, getattr(config, table), values)})
        ok, errors = config.validate()
        if not ok:
            raise ValueError("; ".join(errors))
        return config


def _section(table: str, current: Any, values: Dict[str, Any]) -> Any:
    known = {f.name for f in fields(current)}
    for key in values:
        if key not in known:
            raise ValueError(f"unknown config key '{key}' in [{table}]")
    converted = {k: tuple(v) if isinstance(v, list) else v for k, v in values.items()}
    return replace(current, **converted)


def load_run_config(path: PathLike) -> RunConfig:
    """Read a TOML run configuration."""
    with open(path, "rb") as handle:
        return RunConfig.from_dict(tomllib.load(handle))


def describe_defaults() -> str:
    """Every table and default value, one `table.key = value` per line."""
    defaults = RunConfig()
    lines = []
    for table in RunConfig.tables():
        section = getattr(defaults, table)
        for f in fields(section):
            lines.append(f"  {table}.{f.name} = {getattr(section, f.name)!r}")
    return "\n".join(lines)
