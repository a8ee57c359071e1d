"""Localized sketch-text pair conditioning for diffusion image generation.

Subpackages:
    pair_codec   -- frozen modality encoders and trainable projectors
    pair_former  -- per-pair self-attention pooling into k learnable tokens
    diffusion    -- toy latent denoiser with paired cross-attention, trainer, sampler
    sketchy      -- dataset construction (hierarchy, sketches, descriptions, manifest)
    evaluation   -- generation metrics and human-study aggregation
    service      -- HTTP generation service
"""

__version__ = "0.1.0"
