"""Desk-scale laboratory for shaped adversarial face stickers.

Trains a WGAN-GP sticker generator, attaches the stickers to face images
through a differentiable mesh renderer with spherical-harmonics shading,
and measures dodging/impersonation success against small white-box face
recognizers.
"""

__version__ = "0.1.0"
