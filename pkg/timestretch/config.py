from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import InvalidRate

MAX_RATE = 4.0


def check_rate(rate: float, low: float = 0.0, high: float = MAX_RATE) -> float:
    """Stretch factors live in (low, high]."""
    if not (low < rate <= high):
        raise InvalidRate(rate, f"({low}, {high}]")
    return float(rate)


class PvConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    hop: int = Field(256, gt=0)
    channels: int = Field(1024, gt=1)
    window_length: int = Field(0, ge=0)  # 0 means "same as channels"
    interpolate: bool = False

    @model_validator(mode="after")
    def _painless(self) -> "PvConfig":
        window = self.window
        if window % 2:
            raise ValueError(f"PV window length must be even, got {window}")
        if window > self.channels:
            raise ValueError(
                f"PV window ({window}) longer than channel count ({self.channels})"
            )
        if self.hop >= window:
            raise ValueError(f"PV hop ({self.hop}) leaves gaps between windows")
        return self

    @property
    def window(self) -> int:
        return self.window_length or self.channels

    @property
    def label(self) -> str:
        return f"{self.hop}_{self.channels}"


class ScaleFrameConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    min_win: int = Field(96, ge=16)
    num_scales: int = Field(5, ge=1)
    min_channels: int = Field(768, ge=16)

    @model_validator(mode="after")
    def _check(self) -> "ScaleFrameConfig":
        if self.min_win % 2:
            raise ValueError(f"min_win must be even, got {self.min_win}")
        if self.min_channels < self.min_win:
            raise ValueError(
                f"min_channels ({self.min_channels}) below min_win ({self.min_win})"
            )
        return self

    @property
    def scale_lengths(self) -> list[int]:
        return [self.min_win * 2**k for k in range(self.num_scales)]

    @property
    def max_win(self) -> int:
        return self.min_win * 2 ** (self.num_scales - 1)


class OnsetConfig(BaseModel):
    """Spectral flux settings, given at ``reference_rate`` and rescaled."""

    model_config = ConfigDict(frozen=True)

    hop: int = Field(128, gt=0)
    channels: int = Field(2048, gt=1)
    window_length: int = Field(256, ge=2)
    neighborhood: int = Field(10, ge=1)
    bias: float = Field(1.5, gt=0)
    floor_ratio: float = Field(0.02, ge=0)
    reference_rate: int = Field(16000, gt=0)

    @model_validator(mode="after")
    def _painless(self) -> "OnsetConfig":
        if self.window_length > self.channels:
            raise ValueError("onset window longer than its channel count")
        return self


class NspvConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    frames: ScaleFrameConfig = ScaleFrameConfig()
    onsets: OnsetConfig = OnsetConfig()
    eps_db: float = Field(2.0, ge=0)
    floor_db: float = Field(-120.0, lt=0)


class SpectrogramConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    hop: int = Field(128, gt=0)
    channels: int = Field(2048, gt=1)
    window_length: int = Field(2048, ge=2)
    floor_db: float = Field(-120.0, lt=0)

    @model_validator(mode="after")
    def _painless(self) -> "SpectrogramConfig":
        if self.window_length > self.channels:
            raise ValueError("spectrogram window longer than its channel count")
        return self


class Profile(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    pv: PvConfig
    nspv: NspvConfig


PROFILES: dict[str, Profile] = {
    "16k": Profile(
        name="16k",
        pv=PvConfig(hop=256, channels=1024),
        nspv=NspvConfig(
            frames=ScaleFrameConfig(min_win=96, num_scales=5, min_channels=768)
        ),
    ),
    "44k": Profile(
        name="44k",
        pv=PvConfig(hop=512, channels=2048),
        nspv=NspvConfig(
            frames=ScaleFrameConfig(min_win=384, num_scales=5, min_channels=1536)
        ),
    ),
}


def profile_for_rate(sample_rate: int) -> Profile:
    return PROFILES["16k"] if sample_rate < 32000 else PROFILES["44k"]


def override(model: BaseModel, **updates: Any) -> Any:
    """Copy ``model`` with the non-None ``updates`` applied and re-validated."""
    changes = {key: value for key, value in updates.items() if value is not None}
    if not changes:
        return model
    return type(model).model_validate({**model.model_dump(), **changes})


class CorpusConfig(BaseModel):
    """Synthetic evaluation run: ``count`` melodies, random or fixed rates."""

    model_config = ConfigDict(frozen=True)

    count: int = Field(50, ge=1)
    seed: int = Field(0, ge=0)
    rates: list[float] | None = None
    rate_range: tuple[float, float] = (0.5, 3.75)
    pv: list[PvConfig] = Field(
        default_factory=lambda: [
            PvConfig(hop=256, channels=1024),
            PvConfig(hop=128, channels=512),
        ]
    )
    nspv: NspvConfig = NspvConfig()
    spectrogram: SpectrogramConfig = SpectrogramConfig()

    @model_validator(mode="after")
    def _rates(self) -> "CorpusConfig":
        low, high = self.rate_range
        if not (0 < low < high <= MAX_RATE):
            raise ValueError(f"rate range {self.rate_range} outside (0, {MAX_RATE}]")
        for rate in self.rates or []:
            if not (0 < rate <= MAX_RATE):
                raise ValueError(f"rate {rate} outside (0, {MAX_RATE}]")
        if self.rates is not None and not self.rates:
            raise ValueError("fixed rate list is empty")
        return self
