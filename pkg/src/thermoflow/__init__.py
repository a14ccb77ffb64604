"""Topological pressure, equilibrium states and suspension-flow MMEs for
shifts of finite type, plus a roof construction that makes the flow MMEs
concentrate on a chosen subshift."""

__version__ = "0.1.0"
