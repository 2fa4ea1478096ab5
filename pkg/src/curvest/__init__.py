"""Normal, tangent-frame, Weingarten map and curvature estimation for
point clouds in low ambient dimension."""

__version__ = "0.1.0"
