"""AuraSense leaky-surface-wave proximity detection tools."""

__version__ = '0.1.0'
