"""sitetwin: a deterministic, seedable project-control engine.

Probabilistic CPM forecasting with weekly Bayesian updating, earned-value
tracking, critical-chain buffer accounting, Q-learning-assisted resource
leveling with human accept/reject decisions, and what-if scenario analysis,
all behind an event-sourced project twin with a CLI and HTTP service.
"""

__version__ = "0.1.0"
