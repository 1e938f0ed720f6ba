import json
import logging
import math
import os
from typing import Any, Dict, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from relaybc.core.errors import ConfigError

logger = logging.getLogger(__name__)

Coordinate = Tuple[float, float]


def dbm_per_hz_to_w(value: float) -> float:
    """Convert a noise density in dBm/Hz to W/Hz."""
    return 10.0 ** (value / 10.0) * 1e-3


class NetworkConfig(BaseModel):
    """Geometry, radio constants and budgets of one three-node scenario.

    Defaults are the reference scenario: S=(0,0), R=(20,20), D=(100,0),
    Ts=10 ms, W=10 kHz, sigma2=-100 dBm/Hz, eta=0.5, Pc=200 uW and
    P=Pmax=20 W (E = 0.2 J per block).
    """

    model_config = ConfigDict(frozen=True)

    coord_s: Coordinate = Field((0.0, 0.0), description="Source (IoT node) position, m")
    coord_r: Coordinate = Field((20.0, 20.0), description="HAP / relay position, m")
    coord_d: Coordinate = Field((100.0, 0.0), description="Destination position, m")
    alpha1: float = Field(3.0, ge=0.0, le=6.0, description="S-D path-loss exponent")
    alpha2: float = Field(2.7, ge=0.0, le=6.0, description="S-R path-loss exponent")
    alpha3: float = Field(2.7, ge=0.0, le=6.0, description="R-D path-loss exponent")
    xi_sd: float = Field(1.0, gt=0.0, description="S-D small-scale fading power gain")
    xi_sr: float = Field(1.0, gt=0.0, description="S-R small-scale fading power gain")
    xi_rd: float = Field(1.0, gt=0.0, description="R-D small-scale fading power gain")
    Ts: float = Field(0.01, gt=0.0, description="Block duration, s")
    W: float = Field(1e4, gt=0.0, description="Bandwidth, Hz")
    sigma2: float = Field(1e-13, gt=0.0, description="Noise power spectral density, W/Hz")
    eta: float = Field(0.5, gt=0.0, le=1.0, description="Energy-conversion efficiency")
    Pc: float = Field(2e-4, ge=0.0, description="Backscatter circuit power, W")
    P: float = Field(20.0, gt=0.0, description="HAP average-power budget, W")
    Pmax: float = Field(20.0, gt=0.0, description="HAP peak transmit power, W")
    L: int = Field(20, ge=2, description="Subframes per block")

    @model_validator(mode="before")
    @classmethod
    def _ingest_energy(cls, data: Any) -> Any:
        if not isinstance(data, dict) or "E" not in data:
            return data
        data = dict(data)
        energy = data.pop("E")
        if "P" in data:
            raise ValueError("give the budget either as P (W) or as E (J), not both")
        if isinstance(energy, dict):
            energy = energy.get("joules")
        data["P"] = float(energy) / float(data.get("Ts", 0.01))
        return data

    @field_validator("sigma2", mode="before")
    @classmethod
    def _ingest_sigma2(cls, value: Any) -> Any:
        if isinstance(value, dict):
            if "dbm_per_hz" in value:
                return dbm_per_hz_to_w(float(value["dbm_per_hz"]))
            if "w_per_hz" in value:
                return float(value["w_per_hz"])
            raise ValueError("sigma2 needs 'dbm_per_hz' or 'w_per_hz'")
        return value

    @field_validator("alpha1", "alpha2", "alpha3")
    @classmethod
    def _flag_small_exponent(cls, value: float) -> float:
        if value < 1.0:
            logger.warning(f"path-loss exponent {value} is below free-space propagation")
        return value

    @field_validator("coord_s", "coord_r", "coord_d")
    @classmethod
    def _finite_coordinate(cls, value: Coordinate) -> Coordinate:
        if not all(math.isfinite(c) for c in value):
            raise ValueError("coordinates must be finite")
        return value

    @model_validator(mode="after")
    def _budget_within_peak(self) -> "NetworkConfig":
        if self.P > self.Pmax:
            raise ValueError(f"average budget P={self.P} exceeds peak power Pmax={self.Pmax}")
        return self

    @property
    def noise_bw(self) -> float:
        """Noise power over the band, W."""
        return self.W * self.sigma2

    @property
    def tsw(self) -> float:
        return self.Ts * self.W

    @property
    def energy_per_block(self) -> float:
        """Budget expressed as energy per block, J."""
        return self.P * self.Ts

    def with_updates(self, **changes: Any) -> "NetworkConfig":
        """Return a re-validated copy with the given fields replaced."""
        data = self.model_dump()
        data.update(changes)
        return NetworkConfig.model_validate(data)


def default_config(**overrides: Any) -> NetworkConfig:
    """Default simulation scenario, optionally with overrides."""
    return NetworkConfig(**overrides)


def config_from_dict(data: Dict[str, Any]) -> NetworkConfig:
    try:
        return NetworkConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid network configuration: {exc}") from exc


def load_config(path: str = "scenario.yaml") -> NetworkConfig:
    """Load a scenario from a JSON or YAML file."""
    import yaml

    if not os.path.exists(path):
        raise FileNotFoundError(f"Configuration file not found at {path}")

    suffix = os.path.splitext(path)[1].lower()
    with open(path, "r") as f:
        if suffix == ".json":
            data = json.load(f)
        elif suffix in (".yaml", ".yml"):
            data = yaml.safe_load(f)
        else:
            raise ConfigError(f"unsupported configuration format '{suffix}'")

    if not isinstance(data, dict):
        raise ConfigError(f"{path} does not contain a mapping")
    return config_from_dict(data)
