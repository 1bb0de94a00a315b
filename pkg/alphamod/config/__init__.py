from alphamod.config.settings import DEFAULTS_FILE, Settings, settings

__all__ = ["DEFAULTS_FILE", "Settings", "settings"]
