"""Information subtraction: representations that keep target information
while squeezing out a chosen condition.

Subpackages:
    numerics     matrix-backed MLPs, optimizers, checkpoints
    mi           neural MI lower bounds and training-free oracles
    data         simulators, synthetic generators, CSV ingestion
    subtraction  the two-stage generator/critic trainer and its applications
    reports      information decompositions, fairness metrics, sweeps
"""

__version__ = "0.1.0"
