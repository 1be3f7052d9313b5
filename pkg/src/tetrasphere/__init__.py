"""Tangent spheres of tetrahedra, Grace spheres, Euler cones, Poncelet
3-pairs, bicentric tetrahedra and lifted triangle circles, each with
numeric verification of the identities that relate them."""

__version__ = "0.1.0"
