"""Scenario files and sample generation.

A scenario file is a JSON document::

    {"dimension": 3,
     "metric": [["1", "0", "0"], ...],
     "oneform": ["0.2", "0", "0"],
     "phi": "matsumoto" | "randers" | {"custom": "<expression in s>"},
     "samples": 50, "seed": 42, "box": 0.3}

Expression strings are stored verbatim so a load/dump cycle is bit-exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .catalog import CatalogPair
from .metric import FieldError, MetricField, OneFormField, beta_norm_squared

DEFAULT_SAMPLES = 50
DEFAULT_SEED = 42
DEFAULT_BOX = 0.3
DEFAULT_MARGIN = 0.05


class ScenarioError(FieldError):
    pass


@dataclass
class Scenario:
    dimension: int
    metric: list
    oneform: list
    phi: object = "matsumoto"
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    box: float = DEFAULT_BOX
    name: str = field(default="", compare=False)

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        try:
            n = int(d["dimension"])
            metric = [list(r) for r in d["metric"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"malformed scenario: {exc}") from None
        oneform = list(d.get("oneform") or ["0"] * n)
        phi = d.get("phi", "matsumoto")
        if not (phi in ("matsumoto", "randers") or
                (isinstance(phi, dict) and set(phi) == {"custom"})):
            raise ScenarioError(f"unsupported phi {phi!r}")
        for row in metric:
            if not all(isinstance(t, str) for t in row):
                raise ScenarioError("metric entries must be expression strings")
        if not all(isinstance(t, str) for t in oneform):
            raise ScenarioError("1-form entries must be expression strings")
        return cls(n, metric, oneform, phi,
                   int(d.get("samples", DEFAULT_SAMPLES)),
                   int(d.get("seed", DEFAULT_SEED)),
                   float(d.get("box", DEFAULT_BOX)),
                   str(d.get("name", "")))

    @classmethod
    def from_pair(cls, pair: CatalogPair, phi="matsumoto", **kw) -> "Scenario":
        n = pair.metric.n
        oneform = list(pair.oneform.texts()) if pair.oneform else ["0"] * n
        return cls(n, [list(r) for r in pair.metric.texts()], oneform, phi, **kw)

    def to_dict(self) -> dict:
        d = {"dimension": self.dimension, "metric": self.metric,
             "oneform": self.oneform, "phi": self.phi,
             "samples": self.samples, "seed": self.seed, "box": self.box}
        if self.name:
            d["name"] = self.name
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)

    @classmethod
    def loads(cls, text: str) -> "Scenario":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scenario is not valid JSON: {exc}") from None

    @classmethod
    def load(cls, path) -> "Scenario":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    def fields(self):
        metric = MetricField.from_strings(self.metric, self.dimension)
        oneform = OneFormField.from_strings(self.oneform, self.dimension)
        return metric, oneform

    def phi_function(self):
        from ..abmetric import phi_from_spec
        return phi_from_spec(self.phi)


def sample_points(metric: MetricField, oneform: OneFormField | None,
                  count: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                  box: float = DEFAULT_BOX, margin: float = DEFAULT_MARGIN,
                  zero_s_every: int = 5, max_tries: int = 10000):
    """Points ``(x, y)`` with x uniform in the box, y on the unit sphere.

    Directions with ``alpha - beta <= margin * alpha`` are rejected.  Every
    ``zero_s_every``-th sample is projected so that ``beta(y) = 0``.
    """
    rng = np.random.default_rng(seed)
    n = metric.n
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise ScenarioError("could not draw enough valid samples")
        x = rng.uniform(-box, box, n)
        y = rng.normal(size=n)
        y /= np.linalg.norm(y)
        a = metric.check_positive_definite(x)
        if oneform is not None:
            b = oneform.values(x)
            if zero_s_every and len(out) % zero_s_every == zero_s_every - 1 \
                    and np.any(b != 0):
                bsharp = np.linalg.solve(a, b)
                y = y - (b @ y) / (b @ bsharp) * bsharp
                nrm = np.linalg.norm(y)
                if nrm < 1e-8:
                    continue
                y /= nrm
            alpha = np.sqrt(y @ a @ y)
            if alpha - b @ y <= margin * alpha:
                continue
        out.append((x, y))
    return out


def max_beta_norm_squared(metric, oneform, points) -> float:
    return max(beta_norm_squared(metric, oneform, x) for x, _ in points)
