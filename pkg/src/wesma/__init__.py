"""Undecimated wavelet features and marginalized denoising autoencoders.

Submodules: ``wavelet`` (a trous transform), ``denoise`` (shrinkage),
``textprep``, ``embed`` (CBOW), ``autoencoder`` (WESMA), ``fusion``,
``evalkit``, ``datagen``, ``pipeline`` and ``cli``.
"""
from ._backend import available_backends, current_backend, use_backend

__version__ = "0.1.0"
__all__ = ["available_backends", "current_backend", "use_backend", "__version__"]
