"""flowlab: flows, ergodic maps, information geometry, spreads, trajectory
logic and provability logic at desk scale."""

__version__ = "0.1.0"
