"""cubiclab: a desk-scale laboratory for the flat geometry of cubic
differentials, the Blaschke-metric PDE, marked length spectra, and
constant-curvature model surfaces."""

__version__ = "0.1.0"
