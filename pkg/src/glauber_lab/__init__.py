"""glauber-lab: heat-bath Glauber dynamics on trees and hyperbolic balls.

Exact spectral gaps, cut-width and canonical-path upper bounds,
test-function lower bounds, block-dynamics path coupling, and
disagreement-based correlation decay experiments at desk scale.
"""

__version__ = "0.1.0"
