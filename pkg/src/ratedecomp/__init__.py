"""Interest-rate decomposition models."""
