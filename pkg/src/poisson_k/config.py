"""Run-time defaults: tolerances, caps, generator version, seed.

Values can come from a JSON file (``--config`` or ``$POISSON_K_CONFIG``);
``$POISSON_K_SEED`` overrides the seed in either case.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

CONFIG_ENV = "POISSON_K_CONFIG"
SEED_ENV = "POISSON_K_SEED"

#: identifies the sampler: numpy PCG64 streams per chunk + inversion Poisson draws
RNG_ALGORITHMS = ("pcg64-inversion-v1",)


@dataclass(frozen=True)
class Settings:
    oracle_tolerance: float = 1e-8
    mgf_tolerance: float = 1e-3
    mc_sigmas: float = 5.0
    sampler_sigmas: float = 6.0
    table_cap: int = 30
    rng_algorithm: str = RNG_ALGORITHMS[0]
    seed: int = 20231214
    mc_chunk_size: int = 1 << 16

    def __post_init__(self) -> None:
        if self.rng_algorithm not in RNG_ALGORITHMS:
            raise ValueError(f"unknown rng_algorithm {self.rng_algorithm!r}; known: {RNG_ALGORITHMS}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def to_json(self) -> dict:
        return asdict(self)


def load_settings(path: str | os.PathLike | None = None, env: dict | None = None) -> Settings:
    env = os.environ if env is None else env
    path = path or env.get(CONFIG_ENV)
    settings = Settings()
    if path:
        data = json.loads(Path(path).read_text())
        known = {f.name for f in fields(Settings)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        settings = replace(settings, **data)
    seed = env.get(SEED_ENV)
    if seed:
        settings = replace(settings, seed=int(seed))
    return settings
