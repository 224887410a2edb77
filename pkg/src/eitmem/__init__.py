"""Simulator of image storage and retrieval in an EIT atomic memory."""

from .config import ConfigError, ExperimentConfig, default_config, load_config, parse_config
from .field import ComplexFieldGrid, OpticalLayout, TransverseGrid

__version__ = "0.1.0"

__all__ = ["ComplexFieldGrid", "ConfigError", "ExperimentConfig", "OpticalLayout", "TransverseGrid",
           "default_config", "load_config", "parse_config"]
