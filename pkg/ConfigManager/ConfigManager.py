#!/usr/bin/env python
#  ConfigManager.py Copyright (c) 2025, 2026 Nikki Cooper
#
#  This program and the accompanying materials are made available under the
#  terms of the GNU Lesser General Public License, version 3.0 which is available at
#  https://www.gnu.org/licenses/gpl-3.0.html#license-text
#
# ini-file settings for pyHCT.  Command line flags win over the file, the file
# wins over the built-in defaults below.

import configparser
import os

import constants as const
from debug_utils import debug

DEFAULTS = {
    "Build": {
        "rule": "aev",
        "epsilon": const.DEFAULT_EPSILON,
        "power_constant": const.DEFAULT_POWER_CONSTANT,
        "leaf_max": const.DEFAULT_LEAF_MAX,
        "balance": True,
        "threads": 0,                  # 0 = physical cores
        "rp_zero_threshold": False,
    },
    "Query": {
        "bucket": const.DEFAULT_BUCKET,
        "knn": const.DEFAULT_KNN,
        "test_fraction": const.DEFAULT_TEST_FRACTION,
    },
    "Anomaly": {
        "pair_cap": const.PAIR_CAP,
        "threshold_grid": const.DEFAULT_THRESHOLD_GRID,
        "test_fraction": const.DEFAULT_TEST_FRACTION,
    },
    "Report": {
        "indent": 2,
    },
}


class ConfigManager:
    def __init__(self, config_file=None):
        self.config_file = os.path.expanduser(
            config_file or os.environ.get(const.CONFIG_ENV) or const.CONFIG_FILE)
        self.config = configparser.RawConfigParser()    # Init the case sensitive configparser
        self.config.optionxform = str  # Prevents automatic lowercase conversion
        self.load_config()

    def load_config(self):
        """Load configuration from file."""
        if os.path.exists(self.config_file):
            self.config.read(self.config_file)
            debug(f"config loaded from {self.config_file}")
        else:
            debug(f"config file {self.config_file} not found, using defaults")

    @staticmethod
    def auto_convert_value(value):
        """Convert config values to their proper types (bool, int, float or tuple of numbers)."""
        text = value.strip().strip('"')
        if text.lower() in {"true", "false", "yes", "no", "on", "off"}:
            return text.lower() in {"true", "yes", "on"}
        if "," in text:
            try:
                return tuple(ConfigManager._number(part) for part in text.split(",") if part.strip())
            except ValueError:
                return text
        try:
            return ConfigManager._number(text)
        except ValueError:
            return text  # Default: return as string

    @staticmethod
    def _number(text):
        text = text.strip()
        try:
            return int(text)
        except ValueError:
            return float(text)

    def get_section_as_dict(self, section):
        """Defaults for a section overlaid with whatever the ini file sets, properly typed."""
        merged = dict(DEFAULTS.get(section, {}))
        if section in self.config:
            for key, value in self.config[section].items():
                merged[key] = self.auto_convert_value(value)
        return merged

    def get(self, section, key, fallback=None):
        """Retrieve a typed config value with optional fallback."""
        return self.get_section_as_dict(section).get(key, fallback)

    def set(self, section, key, value):
        """Set a config value and save changes."""
        if section not in self.config:
            self.config[section] = {}
        self.config[section][key] = self._as_text(value)
        self.save_config()

    def save_dict_to_ini(self, section, data_dict):
        """Save a dictionary back to the `.ini` file while preserving key case."""
        if section not in self.config:
            self.config[section] = {}

        for key, value in data_dict.items():
            self.config.set(section, key, self._as_text(value))

        self.save_config()

    @staticmethod
    def _as_text(value):
        if isinstance(value, (tuple, list)):
            return ",".join(str(v) for v in value)
        return str(value)

    def save_config(self):
        """Save configuration to file."""
        os.makedirs(os.path.dirname(self.config_file) or ".", exist_ok=True)
        with open(self.config_file, "w", encoding="utf-8") as configfile:
            self.config.write(configfile)
