"""One entry point over the four p-value engines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

from .asymptotic import asymptotic_pvalue
from .bootstrap import BootstrapConfig, bootstrap_pvalue
from .core import ENGINES, TestResult
from .exact import DEFAULT_MAX_M, DEFAULT_TOL, exact_pvalue
from .mca import McaConfig, mca_pvalue

__all__ = ["EngineConfig", "run_test"]


@dataclass(frozen=True)
class EngineConfig:
    """Settings for every engine; each engine reads only its own fields."""

    engine: str = "mca"
    epsilon: float = 1e-5
    report_upper: bool = False
    B: int | None = None
    seed: int = 0
    add_one_smoothing: bool = False
    max_m: int = DEFAULT_MAX_M
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}; choose from {', '.join(ENGINES)}")
        # validate the engine-specific parts eagerly
        self.mca()
        self.bootstrap()

    def mca(self) -> McaConfig:
        return McaConfig(epsilon=self.epsilon, report_upper=self.report_upper)

    def bootstrap(self) -> BootstrapConfig:
        return BootstrapConfig(B=self.B, seed=self.seed, add_one_smoothing=self.add_one_smoothing)


def run_test(a: Any, b: Any, cfg: EngineConfig | None = None, *,
             stream: Sequence[int] = ()) -> TestResult:
    """Test one pair with the engine named in ``cfg``.

    ``stream`` only matters for the bootstrap, where it picks the random substream.
    """
    cfg = cfg or EngineConfig()
    if cfg.engine == "exact":
        return exact_pvalue(a, b, max_m=cfg.max_m, tol=cfg.tol)
    if cfg.engine == "asymptotic":
        return asymptotic_pvalue(a, b)
    if cfg.engine == "bootstrap":
        return bootstrap_pvalue(a, b, cfg.bootstrap(), stream=stream)
    return mca_pvalue(a, b, cfg.mca(), tol=cfg.tol)
