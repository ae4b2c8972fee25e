from . import horseshoe, nishimura, regularized
from .base import ChainOutput, TauProposal, merge, sample_lambda, sample_nu

SAMPLERS = {
    "horseshoe": horseshoe,
    "regularized": regularized,
    "nishimura": nishimura,
}


def get_sampler(name: str):
    try:
        return SAMPLERS[name]
    except KeyError:
        raise ValueError(f"unknown sampler {name!r}; choose from {sorted(SAMPLERS)}") from None


__all__ = ["SAMPLERS", "get_sampler", "ChainOutput", "TauProposal", "merge",
           "sample_lambda", "sample_nu"]
