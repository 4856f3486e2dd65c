"""Planar simulator and control stack for a hybrid wind/electric sailboat.

The package wires a PID rudder helm, a sail forward-force model, a four-bar
tacking mission with motor-assisted tacks, an energy ledger and a heading
angle sweep harness into a deterministic, seeded closed-loop simulation.
"""

__version__ = "0.1.0"
