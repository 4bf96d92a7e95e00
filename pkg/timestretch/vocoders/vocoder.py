from abc import ABC, abstractmethod
from dataclasses import dataclass

from ..signal.io import Signal


@dataclass(frozen=True)
class StretchResult:
    signal: Signal
    rate: float
    realized_rate: float
    redundancy: float


class Vocoder(ABC):
    name: str

    @abstractmethod
    def stretch(self, signal: Signal, rate: float) -> StretchResult:
        raise NotImplementedError
