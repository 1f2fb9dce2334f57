"""TerraTrace: NDVI time-series grid store, polygon signature curves,
phenology-based land-use classification, fire history, and an
LLM-assisted analysis service."""

__version__ = "0.1.0"
