"""
Deney yapılandırması: pydantic modelleri, düz key=value metin biçimi, ortam değişkenleri ve sonuç kaydı.

Öncelik: model varsayılanları < ortam değişkenleri (.env dahil) < yapılandırma dosyası < CLI bayrakları.
"""
import hashlib
import json
import math
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from environment import CookieEnvironment, CookieLaw, CoupledPair, Deterministic, IIDLazy, VerticalStationary
from lattice import SeedSpec

TOOL_VERSION = "0.1.0"

# zamanlama anahtarları: sonuçları değiştirmez, hash dışında tutulur
SCHEDULING_KEYS = ("threads", "output_dir")

ENV_VARIABLES = {
    "ERWLAB_OUTPUT_DIR": "output_dir",
    "ERWLAB_THREADS": "threads",
    "ERWLAB_MASTER_SEED": "master_seed",
}


class ConfigError(ValueError):
    """Yapılandırma çözümlenemedi veya doğrulanamadı"""


def _split_list(value):
    if isinstance(value, str):
        return [p.strip() for p in value.split(",") if p.strip()]
    return value


def _parse_m(value):
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "∞"):
            return math.inf
        value = float(text)
    if isinstance(value, float) and math.isinf(value):
        if value < 0:
            raise ValueError("m pozitif olmalı")
        return math.inf
    if int(value) != value or value < 1:
        raise ValueError(f"m pozitif tamsayı veya inf olmalı: {value}")
    return int(value)


class EnvironmentSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: str = Field(default="deterministic", description="deterministic | iid | vertical | coupled")
    beta: List[float] = Field(default_factory=lambda: [0.5], description="Deterministik yığın değerleri")
    law: Optional[str] = Field(default=None, description="uniform:a,b veya discrete:v@w,...")
    identical: bool = True
    sigma: Optional[float] = Field(default=None, ge=0.0, lt=1.0)
    lower: Optional["EnvironmentSpec"] = None
    upper: Optional["EnvironmentSpec"] = None

    @field_validator("beta", mode="before")
    @classmethod
    def _beta_list(cls, value):
        return _split_list(value)

    @field_validator("beta")
    @classmethod
    def _beta_range(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("En az bir β değeri gerekli")
        for b in value:
            if not -1.0 <= b <= 1.0:
                raise ValueError(f"β [-1,1] aralığında olmalı: {b}")
        return value

    @field_validator("law")
    @classmethod
    def _law_text(cls, value: Optional[str]) -> Optional[str]:
        if value is not None:
            CookieLaw.parse(value)
        return value

    @model_validator(mode="after")
    def _kind_fields(self) -> "EnvironmentSpec":
        if self.kind not in ("deterministic", "iid", "vertical", "coupled"):
            raise ValueError(f"Bilinmeyen ortam türü: {self.kind}")
        if self.kind in ("iid", "vertical") and self.law is None:
            raise ValueError(f"{self.kind} ortamı için env.law gerekli")
        if self.kind == "coupled" and (self.lower is None or self.upper is None):
            raise ValueError("coupled ortam için env.lower ve env.upper gerekli")
        return self

    def build(self, m, env_seed: int = 0) -> CookieEnvironment:
        if self.kind == "deterministic":
            betas = self.beta[0] if len(self.beta) == 1 else self.beta
            return Deterministic(betas, m, self.sigma)
        if self.kind == "iid":
            return IIDLazy(CookieLaw.parse(self.law), m, env_seed, self.identical, self.sigma)
        if self.kind == "vertical":
            return VerticalStationary(CookieLaw.parse(self.law), m, env_seed, self.identical, self.sigma)
        return CoupledPair(self.lower.build(m, env_seed), self.upper.build(m, env_seed))


EnvironmentSpec.model_rebuild()


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    experiment: str = "default"
    d: int = Field(default=8, ge=2)
    m: Union[int, float] = 1
    env: EnvironmentSpec = Field(default_factory=EnvironmentSpec)
    horizon: int = Field(default=10 ** 5, ge=1, description="LLN ufku n")
    window: int = Field(default=10 ** 4, ge=1, description="Kesim penceresi (iki yönde)")
    moment_cap: Optional[int] = Field(default=None, ge=1, description="Moment ilişkilerinin kesme seviyesi L; boş ise pencere")
    replicates: int = Field(default=10 ** 4, ge=2)
    env_draws: int = Field(default=10, ge=1)
    betas: List[float] = Field(default_factory=lambda: [0.0, 0.2, 0.4, 0.6, 0.8])
    t_grid: List[float] = Field(default_factory=lambda: [0.5])
    eps: float = Field(default=0.9, gt=0.0, le=1.0)
    dims: List[int] = Field(default_factory=lambda: [2, 3, 4, 5], description="Dönüş olasılığı için dim değerleri")
    return_n: int = Field(default=10, ge=0)
    method: str = "auto"
    mechanism: str = Field(default="direct", description="direct | construction | discovery")
    oracle_n: int = Field(default=3, ge=0)
    master_seed: int = Field(default=0, ge=0, lt=2 ** 64)
    stream_id: int = Field(default=0, ge=0, lt=2 ** 64)
    output_dir: str = "results"
    threads: int = Field(default=1, ge=1)
    max_attempts: int = Field(default=10 ** 6, ge=1)
    ess_threshold: float = Field(default=0.1, ge=0.0, le=1.0)
    beta_max: float = Field(default=0.8, ge=0.0, lt=1.0)
    max_truncation: float = Field(default=0.01, ge=0.0, le=1.0)
    verify_scale: float = Field(default=1.0, gt=0.0, description="verify replika sayılarının çarpanı")
    criteria: List[int] = Field(default_factory=list, description="verify alt kümesi; boş ise tümü")

    @field_validator("m", mode="before")
    @classmethod
    def _m_value(cls, value):
        return _parse_m(value)

    @field_validator("betas", "t_grid", "dims", "criteria", mode="before")
    @classmethod
    def _lists(cls, value):
        return _split_list(value)

    @field_validator("betas")
    @classmethod
    def _beta_grid(cls, value: List[float]) -> List[float]:
        for b in value:
            if not -1.0 <= b <= 1.0:
                raise ValueError(f"β [-1,1] aralığında olmalı: {b}")
        return value

    @field_validator("t_grid")
    @classmethod
    def _t_grid(cls, value: List[float]) -> List[float]:
        for t in value:
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"t [0,1] aralığında olmalı: {t}")
        return value

    @field_validator("method")
    @classmethod
    def _method(cls, value: str) -> str:
        if value not in ("auto", "convolution", "quadrature"):
            raise ValueError(f"Bilinmeyen yöntem: {value}")
        return value

    @field_validator("mechanism")
    @classmethod
    def _mechanism(cls, value: str) -> str:
        if value not in ("direct", "construction", "discovery"):
            raise ValueError(f"Bilinmeyen simülasyon mekanizması: {value}")
        return value

    def seed_spec(self) -> SeedSpec:
        return SeedSpec(self.master_seed, self.stream_id)

    def environment(self, env_seed: int = 0) -> CookieEnvironment:
        return self.env.build(self.m, env_seed)


def _format(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "inf" if math.isinf(value) else repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_format(v) for v in value)
    return str(value)


def _flatten(data: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, name + "."))
        elif value is not None:
            flat[name] = value
    return flat


def _unflatten(flat: Dict[str, Any]) -> Dict[str, Any]:
    nested: Dict[str, Any] = {}
    for key, value in flat.items():
        node = nested
        parts = key.split(".")
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"Anahtar çakışması: {key}")
            node = child
        node[parts[-1]] = value
    return nested


def emit_config(cfg: ExperimentConfig, exclude: tuple = ()) -> str:
    """Sıralı key=value metni; parse_config(emit_config(cfg)) == cfg"""
    flat = _flatten(cfg.model_dump())
    return "".join(f"{key} = {_format(flat[key])}\n" for key in sorted(flat) if key not in exclude)


def parse_lines(text: str) -> Dict[str, str]:
    flat: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"Satır {number} key=value biçiminde değil: {raw!r}")
        flat[key.strip()] = value.strip()
    return flat


def build_config(flat: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(_unflatten(flat))
    except ValidationError as e:
        raise ConfigError(f"Geçersiz yapılandırma: {str(e)}")
    except ValueError as e:
        raise ConfigError(f"Geçersiz yapılandırma: {str(e)}")


def parse_config(text: str) -> ExperimentConfig:
    return build_config(parse_lines(text))


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Yapılandırma dosyası okunamadı {path}: {str(e)}")
    if path.suffix == ".json":
        try:
            return _flatten(json.loads(text))
        except json.JSONDecodeError as e:
            raise ConfigError(f"JSON çözümlenemedi {path}: {str(e)}")
    return parse_lines(text)


def environment_overrides() -> Dict[str, str]:
    load_dotenv()
    flat = {}
    for variable, key in ENV_VARIABLES.items():
        value = os.getenv(variable)
        if value:
            flat[key] = value
    return flat


def load_config(path: Optional[Union[str, Path]] = None, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    flat: Dict[str, Any] = environment_overrides()
    if path is not None:
        flat.update(read_config_file(path))
    if overrides:
        flat.update({k: v for k, v in overrides.items() if v is not None})
    return build_config(flat)


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(emit_config(cfg, SCHEDULING_KEYS).encode("utf-8")).hexdigest()


class ResultRecord(BaseModel):
    """Her çalıştırmanın JSON özeti"""
    config_hash: str
    experiment: str
    subcommand: str
    master_seed: int
    stream_id: int
    tool_version: str = TOOL_VERSION
    wall_clock: float = 0.0
    config: Dict[str, Any] = Field(default_factory=dict)
    results: List[Dict[str, Any]] = Field(default_factory=list)
    status: str = "ok"
