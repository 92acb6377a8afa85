"""obstructa - finite-scale workbench for Kochen-Specker obstructions to spectra."""

__version__ = "0.1.0"
