"""Horseshoe-family Gibbs samplers and tools for checking their ergodicity constants."""
from .model import ChainState, Dataset, GlobalPrior, PriorConfig, validate_dataset

__all__ = ["ChainState", "Dataset", "GlobalPrior", "PriorConfig", "validate_dataset"]
