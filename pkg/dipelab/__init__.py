# Distributed inner-product estimation laboratory
# Exact variance coefficients, protocol simulation, kernel analysis and copy-budget planning
__version__ = "1.0.0"
