"""drht: discrete homotopic distance between Lipschitz maps on finite metric spaces."""

__version__ = "0.1.0"
