"""
qcount test suite
"""
