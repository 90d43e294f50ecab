"""Sub-Riemannian geometry of Hopf-fibred spheres and the quaternionic H-type group."""

__version__ = "0.1.0"
