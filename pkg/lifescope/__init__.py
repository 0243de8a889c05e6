from lifescope.config import ENGINE_VERSION

__version__ = ENGINE_VERSION
