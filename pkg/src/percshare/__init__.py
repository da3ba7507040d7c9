"""Percolation of SINR coverage under mobile-operator infrastructure sharing."""

from .params import REFERENCE_PARAMS, SharingStrategy, SystemParams, db_to_linear

__version__ = "0.1.0"

__all__ = ["REFERENCE_PARAMS", "SharingStrategy", "SystemParams", "db_to_linear"]
