"""Stochastic queuing models of microbial interactions.

Subpackages/modules: engine (generic CTMC machinery), electron (single-cell
electron transport), cable (multi-cell relay chains and their reduced
birth-death abstraction), capacity (signaling-rate optimization), quorum
(population-level autoinducer dynamics), cli (command-line front end).
"""

__version__ = "1.0.0"
