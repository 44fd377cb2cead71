"""
Package version, printed by ``csch-hilbert --version`` and in every report header.
"""

from importlib.metadata import PackageNotFoundError, version

__version__ = "0.3.0"


def get_version() -> str:
    """
    Version of the installed distribution, or of this source tree when not installed.

    Returns:
        The version string
    """
    try:
        return version("csch-hilbert")
    except PackageNotFoundError:
        return __version__
