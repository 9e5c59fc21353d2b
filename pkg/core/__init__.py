"""
Saturable Battery Simulator Core Components

Numerical kernel (linalg, model, states, dynamics, observables, steadystate),
configuration, errors and MCP server lifecycle.
"""
