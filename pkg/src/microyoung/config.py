"""Run configuration shared by the command line and the estimators."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

DICTIONARIES = ("plain", "moment_free", "offcenter", "punctured")


@dataclass
class RunConfig:
    grid_1d: int = 4096
    grid_2d: int = 512
    n_min: int = 2
    n_max: int = 10
    p_samples: tuple = (2.0, 4.0, 8.0, math.inf)
    margin: float = 0.1
    dictionary: str = "plain"
    seed: int = 0
    output_dir: str = "."  # empty string: stdout only

    def __post_init__(self):
        self.p_samples = tuple(float(p) for p in self.p_samples)
        self.validate()

    def validate(self):
        for name in ("grid_1d", "grid_2d"):
            n = getattr(self, name)
            if n < 64 or n & (n - 1):
                raise ValueError(f"{name} must be a power of two >= 64, got {n}")
        if not 1 <= self.n_min < self.n_max <= 14:
            raise ValueError(f"need 1 <= n_min < n_max <= 14, got {self.n_min}, {self.n_max}")
        if self.n_max - self.n_min + 1 < 3:
            raise ValueError("at least three scales are needed for a slope")
        if not self.p_samples or any(not p >= 1 for p in self.p_samples):
            raise ValueError("p_samples must be non-empty with every p >= 1")
        if not 0 < self.margin < 1:
            raise ValueError("margin must lie in (0, 1)")
        if self.dictionary not in DICTIONARIES:
            raise ValueError(f"dictionary must be one of {DICTIONARIES}")
        return self

    @property
    def scales(self):
        return list(range(self.n_min, self.n_max + 1))

    def grid_size(self, dim):
        return self.grid_1d if dim == 1 else self.grid_2d

    def to_dict(self):
        d = asdict(self)
        d["p_samples"] = ["inf" if math.isinf(p) else p for p in self.p_samples]
        return d

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown configuration keys: {sorted(unknown)}")
        data = dict(data)
        if "p_samples" in data:
            data["p_samples"] = tuple(float(p) for p in data["p_samples"])
        return cls(**data)

    @classmethod
    def from_file(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))
