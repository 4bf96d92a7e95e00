"""Batch evaluation on seeded synthetic melodies."""

from __future__ import annotations

import os
from collections import defaultdict
from pathlib import Path

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict
from tqdm import tqdm

from ..config import CorpusConfig
from ..errors import IoError, NotAFrame
from ..vocoders.classic import PhaseVocoder
from ..vocoders.nonstationary import NonstationaryPhaseVocoder
from .melody import PERFECT_RATE_RANGE, MelodySpec, perfect_stretch, synth_melody
from .metrics import error_measure


class SignalResult(BaseModel):
    """One melody at one rate; extra ``e_*`` and ``red_*`` fields hold the metrics."""

    model_config = ConfigDict(extra="allow")

    index: int
    seed: int
    r: float

    def metrics(self) -> dict[str, float | None]:
        return dict(self.model_extra or {})

    def row(self) -> list[float]:
        values = [self.index, self.seed, self.r, *self.metrics().values()]
        return [np.nan if value is None else float(value) for value in values]


class EvalReport(BaseModel):
    config: CorpusConfig
    per_signal: list[SignalResult]
    averages: dict[str, float]
    per_rate: dict[str, dict[str, float]] = {}

    def write(self, path: str | os.PathLike) -> None:
        """JSON report, or the per-signal table when ``path`` ends in ``.csv``."""
        path = Path(path)
        try:
            if path.suffix == ".csv":
                columns = ["index", "seed", "r", *self.per_signal[0].metrics()]
                table = np.array([item.row() for item in self.per_signal])
                np.savetxt(
                    path,
                    table,
                    fmt="%.10g",
                    delimiter=",",
                    header=",".join(columns),
                    comments="",
                )
            else:
                path.write_text(self.model_dump_json(indent=2) + "\n")
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc


def _mean_columns(results: list[SignalResult]) -> dict[str, float]:
    columns: dict[str, list[float]] = defaultdict(list)
    for item in results:
        for key, value in item.metrics().items():
            if value is not None:
                columns[key].append(value)
    return {key: float(np.mean(values)) for key, values in columns.items()}


def evaluate_melody(
    spec: MelodySpec, rate: float, config: CorpusConfig, index: int = 0
) -> SignalResult:
    signal = synth_melody(spec)
    low, high = PERFECT_RATE_RANGE
    reference = perfect_stretch(spec, rate) if low <= rate <= high else None

    metrics: dict[str, float | None] = {}
    for pv in config.pv:
        label = f"pv_{pv.label}"
        try:
            stretched = PhaseVocoder(pv).stretch(signal, rate).signal
        except NotAFrame as exc:
            logger.warning(f"Melody {index}: {label} fails at rate {rate}: {exc}")
            stretched = None
        metrics[f"e_{label}"] = (
            None
            if reference is None or stretched is None
            else error_measure(reference, stretched, config.spectrogram)
        )

    result = NonstationaryPhaseVocoder(config.nspv).stretch(signal, rate)
    metrics["e_nspv"] = (
        None
        if reference is None
        else error_measure(reference, result.signal, config.spectrogram)
    )
    # one red_pv column unless the PV configurations disagree
    redundancies = {f"red_pv_{pv.label}": pv.channels / pv.hop for pv in config.pv}
    if len(set(redundancies.values())) == 1:
        redundancies = {"red_pv": next(iter(redundancies.values()))}
    metrics.update(redundancies)
    metrics["red_nspv"] = result.redundancy
    return SignalResult(index=index, seed=spec.seed or 0, r=rate, **metrics)


def run_corpus(config: CorpusConfig | None = None, progress: bool = True) -> EvalReport:
    """Evaluate every configured vocoder on ``config.count`` seeded melodies.

    Each melody draws its own seed (and, without fixed rates, its rate) from
    a child of ``config.seed``, so reports do not depend on run order.
    """
    config = config or CorpusConfig()
    children = np.random.SeedSequence(config.seed).spawn(config.count)
    results = []
    iterator = tqdm(children, desc="Evaluating", disable=not progress)
    for index, child in enumerate(iterator):
        seed = int(child.generate_state(1)[0])
        if config.rates is None:
            rates = [float(np.random.default_rng(child).uniform(*config.rate_range))]
        else:
            rates = config.rates
        spec = MelodySpec.random(seed)
        for rate in rates:
            results.append(evaluate_melody(spec, rate, config, index))

    per_rate = {}
    if config.rates is not None:
        for rate in config.rates:
            matching = [item for item in results if item.r == rate]
            per_rate[str(rate)] = _mean_columns(matching)
    report = EvalReport(
        config=config,
        per_signal=results,
        averages=_mean_columns(results),
        per_rate=per_rate,
    )
    logger.info(
        "Corpus averages: "
        + ", ".join(f"{key}={value:.6f}" for key, value in report.averages.items())
    )
    return report
