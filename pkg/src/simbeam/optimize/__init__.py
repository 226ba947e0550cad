from .power import (PowerAllocation, PowerIteration, water_level,
                    water_fill_update, damped_power_iteration)
from .phases import (sum_rate_gradient, armijo_ascent_step, spectral_step, gradient_ascent,
                     optimize_phases, evaluate_sum_rate, fractional_increase)
from .alternating import alternating_optimize, initial_phases
