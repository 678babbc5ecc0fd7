"""Desk-scale emulation of a driven Rydberg chain as a confining Ising magnet.

The package maps transverse/longitudinal Ising targets onto Rydberg drive
parameters, synthesizes the corresponding pulse schedules, evolves the chain
with a second-order Trotter splitting (compiled kernels with a pure-NumPy
fallback), runs quenched-noise ensembles, and analyses connected spin
correlations against a semiclassical two-kink (meson) front model.
"""

__version__ = "0.1.0"
