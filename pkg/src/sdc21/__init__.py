"""Simulator and key-rate calculator for the 2-1 secure dense coding protocol.

Modules:
  linalg       dense complex operator kernel on qubit tensor products
  states       protocol states, encoding unitaries, measurement families
  channels     Kraus noise models and forward/backward scenarios
  protocol     exact outcome distributions of key and test runs
  purification teleportation-based purification identities, checked numerically
  rates        entropies, overlap constants, key-rate lower bounds
  postprocess  finite-key sampling, reconciliation, privacy amplification
  cli          `sdc21 verify | rate | sweep | finite-key`
"""

__version__ = "0.1.0"
