"""Single-photon scattering through a T-shaped coupled-resonator waveguide."""

__version__ = "0.1.0"
