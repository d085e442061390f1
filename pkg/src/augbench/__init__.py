"""Benchmark toolkit: generative augmentation (GMM/VAE/GAN) for small
tabular classification tasks, with six from-scratch classifiers and a
deterministic experiment harness."""

from .rng import RngStream

__version__ = "0.1.0"
__all__ = ["RngStream", "__version__"]
