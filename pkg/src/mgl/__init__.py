"""Meta-Goal Learner: one-shot text classification via meta-interpretive learning."""

__version__ = "0.1.0"
