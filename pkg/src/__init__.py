"""xi bootstrap - Chatterjee's rank correlation, its standard bootstrap, and the theory checks."""

__version__ = "1.0.0"
__author__ = "Wed"
