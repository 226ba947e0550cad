from .geometry import SimGeometry, build_geometry
from .propagation import (PropagationStack, build_propagation_stack,
                          diffraction_coefficient, diffraction_coefficients)
from .beamformer import (PhaseState, BeamformerMatrix, compose_beamformer,
                         partial_products, partial_product_chain)
