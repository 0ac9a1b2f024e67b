"""
Numerical core: fundamental diagrams, network topology, DG discretization,
junction coupling and time stepping.
"""
