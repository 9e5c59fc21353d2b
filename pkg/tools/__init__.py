"""
Saturable Battery Simulator Tools

One module per command (spectrum, charge, maxenergy, wigner, steady, check), each with a
run_<command>(config) function and its MCP tool registration.
"""
