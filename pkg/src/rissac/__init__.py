"""Joint analog-precoder and RIS phase design with soft actor-critic."""

__version__ = "0.1.0"
