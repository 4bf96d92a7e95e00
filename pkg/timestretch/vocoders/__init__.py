from .vocoder import StretchResult, Vocoder

__all__ = ["get_vocoder", "StretchResult", "Vocoder"]


def get_vocoder(vocoder_name: str, *args, **kwargs) -> Vocoder:
    from .classic import PhaseVocoder
    from .nonstationary import NonstationaryPhaseVocoder

    __vocoder_map__ = {
        "pv": PhaseVocoder,
        "nspv": NonstationaryPhaseVocoder,
    }

    if vocoder_name in __vocoder_map__:
        return __vocoder_map__[vocoder_name](*args, **kwargs)
    else:
        raise ValueError(f"Vocoder {vocoder_name} not found")
