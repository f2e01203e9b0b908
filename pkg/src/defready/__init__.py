"""Defence-readiness metrics and trade-decoupling counterfactuals."""

__version__ = "0.1.0"
