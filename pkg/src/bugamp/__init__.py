"""bugamp: a deterministic virtual-time concurrency benchmark plus four
black-box search strategies that amplify the probability of triggering the
seeded bugs."""

__version__ = "0.1.0"
