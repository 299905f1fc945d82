"""System-level simulator for D2D communication reusing cellular uplink resources."""

from .config import (AntennaPattern, ChannelParams, ConfigError, NoiseParams,
                     PathlossParams, ScenarioConfig, SiteParams, apply_scenario,
                     load_config)
from .engine import SCHEMES, CampaignResult, DropResult, run_campaign, run_drop

__version__ = "0.1.0"

__all__ = [
    "AntennaPattern",
    "ChannelParams",
    "ConfigError",
    "NoiseParams",
    "PathlossParams",
    "ScenarioConfig",
    "SiteParams",
    "apply_scenario",
    "load_config",
    "SCHEMES",
    "CampaignResult",
    "DropResult",
    "run_campaign",
    "run_drop",
    "__version__",
]
