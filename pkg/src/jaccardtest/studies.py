"""Calibration and runtime studies behind the ``simulate`` and ``benchmark`` commands."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, replace
from typing import IO, Iterable, Sequence

import numpy as np

from .bootstrap import make_rng
from .core import ResourceLimitError
from .engines import EngineConfig, run_test
from .fdr import qvalue
from .matrix import format_real
from .simulate import SimSpec, simulate_mixture, simulate_null_pair

__all__ = [
    "CalibrationRow",
    "simulate_command",
    "false_discovery_proportion",
    "RuntimeRow",
    "benchmark_command",
    "write_calibration",
    "write_runtime",
]


@dataclass(frozen=True)
class CalibrationRow:
    index: int
    truth: bool
    coefficient: float
    centered: float
    p_value: float
    q_value: float


def simulate_command(spec: SimSpec, cfg: EngineConfig | None = None, *,
                     smoother: bool = False) -> list[CalibrationRow]:
    """Test the query against every panel vector of a simulated mixture."""
    cfg = cfg or EngineConfig()
    query, panel, truth = simulate_mixture(spec)
    results = [run_test(query, row, cfg, stream=(k,)) for k, row in enumerate(panel)]
    p = np.array([r.p_value for r in results])
    q = qvalue(p, smoother=smoother).q_values
    return [CalibrationRow(k, bool(t), r.coefficient, r.centered, r.p_value, float(qk))
            for k, (t, r, qk) in enumerate(zip(truth, results, q))]


def false_discovery_proportion(rows: Sequence[CalibrationRow], threshold: float) -> float:
    """Share of nulls among rows with ``q <= threshold``; 0 when nothing is called."""
    called = [r for r in rows if r.q_value <= threshold]
    if not called:
        return 0.0
    return sum(not r.truth for r in called) / len(called)


def write_calibration(rows: Iterable[CalibrationRow], out: IO[str], delimiter: str = ",") -> None:
    w = csv.writer(out, delimiter=delimiter, lineterminator="\n")
    w.writerow(["index", "truth", "coefficient", "centered", "p_value", "q_value"])
    for r in rows:
        w.writerow([r.index, int(r.truth), format_real(r.coefficient), format_real(r.centered),
                    format_real(r.p_value), format_real(r.q_value)])


@dataclass(frozen=True)
class RuntimeRow:
    engine: str
    m: int
    reps: int
    mean_seconds: float
    speedup_vs_exact: float | None
    note: str = ""


def _warm_up(cfg: EngineConfig) -> None:
    # first calls pay for loading compiled kernels
    a = np.array([1, 0, 1, 1, 0, 0, 1, 0], dtype=np.uint8)
    b = np.array([1, 1, 0, 1, 0, 1, 0, 0], dtype=np.uint8)
    run_test(a, b, cfg)


def benchmark_command(m_grid: Sequence[int], reps: int = 10,
                      engines: Sequence[str] = ("exact", "asymptotic", "bootstrap", "mca"),
                      cfg: EngineConfig | None = None, *, p: float = 0.5, timeout: float = 120.0,
                      seed: int = 0) -> list[RuntimeRow]:
    """Mean wall-clock seconds per call for each engine and length.

    Every engine sees the same simulated independent pairs. The bootstrap
    uses ``B = 5 m`` unless ``cfg.B`` is set. An engine whose single call
    exceeds ``timeout`` is skipped at that and every larger ``m``.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    base = cfg or EngineConfig()
    timings: dict[tuple[str, int], float] = {}
    notes: dict[tuple[str, int], str] = {}
    done: dict[tuple[str, int], int] = {}
    timed_out: set[str] = set()
    for m in m_grid:
        rng = make_rng(seed, m)
        pairs = [simulate_null_pair(m, p, p, rng) for _ in range(reps)]
        for engine in engines:
            ecfg = replace(base, engine=engine)
            key = (engine, m)
            if engine in timed_out:
                notes[key] = f"skipped: earlier call exceeded {timeout:g} s"
                continue
            if engine == "exact" and m > ecfg.max_m:
                notes[key] = f"skipped: m above exact cap {ecfg.max_m}"
                continue
            _warm_up(ecfg)
            total = 0.0
            n = 0
            for a, b in pairs:
                t0 = time.perf_counter()
                try:
                    run_test(a, b, ecfg)
                except ResourceLimitError as exc:
                    notes[key] = f"skipped: {exc}"
                    break
                dt = time.perf_counter() - t0
                total += dt
                n += 1
                if dt > timeout:
                    timed_out.add(engine)
                    notes[key] = f"stopped after call exceeding {timeout:g} s"
                    break
            if n:
                timings[key] = total / n
                done[key] = n
    rows = []
    for m in m_grid:
        for engine in engines:
            key = (engine, m)
            mean = timings.get(key, float("nan"))
            ex = timings.get(("exact", m))
            speed = ex / mean if ex is not None and key in timings and mean > 0 else None
            rows.append(RuntimeRow(engine, m, done.get(key, 0), mean, speed, notes.get(key, "")))
    return rows


def write_runtime(rows: Iterable[RuntimeRow], out: IO[str], delimiter: str = ",") -> None:
    w = csv.writer(out, delimiter=delimiter, lineterminator="\n")
    w.writerow(["engine", "m", "reps", "mean_seconds", "speedup_vs_exact", "note"])
    for r in rows:
        w.writerow([r.engine, r.m, r.reps, format_real(r.mean_seconds),
                    "" if r.speedup_vs_exact is None else format_real(r.speedup_vs_exact), r.note])
