"""Design and analysis toolkit for suspended-magnetometer UAV surveys."""
__version__ = "0.1.0"
