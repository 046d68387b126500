#  Bcolors.py Copyright (c) 2025, 2026 Nikki Cooper
#
#  This program and the accompanying materials are made available under the
#  terms of the GNU Lesser General Public License, version 3.0 which is available at
#  https://www.gnu.org/licenses/gpl-3.0.html#license-text
#
import os
import sys


class Bcolors(object):
    """
    ANSI escape codes used to colour pyHCT console output.

    Besides the plain foreground colours the class carries a handful of semantic
    aliases so the command modules never hard-code a colour for a meaning:

        RULE      splitting rule names and tree shapes
        METRIC    metric names in summaries
        VALUE     numeric results
        PASS      a check that held (Cheeger sandwich, dual cost paths, ...)
        FAIL      a check that did not hold, and error messages
        WARNING   clamped aggregates, fallbacks, degenerate inputs

    Colours are switched off when stdout is not a terminal or when the NO_COLOR
    environment variable is set, so report files and pipes stay clean.

    Attributes:
        enabled (bool): True when escape codes are emitted.
    """
    def __init__(self, enabled=None):
        if enabled is None:
            enabled = sys.stdout.isatty() and "NO_COLOR" not in os.environ
        self.enabled = enabled

        codes = {
            "Default_f":      '\x1B[39m',
            "Red_f":          '\x1B[31m',
            "Green_f":        '\x1B[32m',
            "Yellow_f":       '\x1B[33m',
            "Blue_f":         '\x1B[34m',
            "Magenta_f":      '\x1B[35m',
            "Cyan_f":         '\x1B[36m',
            "Light_Gray_f":   '\x1B[37m',
            "Light_Red_f":    '\x1B[91m',
            "Light_Green_f":  '\x1B[92m',
            "Light_Yellow_f": '\x1B[93m',
            "Light_Blue_f":   '\x1B[94m',
            "Light_Cyan_f":   '\x1B[96m',
            "White_f":        '\x1B[97m',
            "BOLD":           '\x1B[1m',
            "DIM":            '\x1B[2m',
            "RESET":          '\x1B[0m',
        }
        for name, code in codes.items():
            setattr(self, name, code if enabled else "")

        # Semantic aliases
        self.RULE = self.Light_Cyan_f
        self.METRIC = self.Magenta_f
        self.VALUE = self.Light_Green_f
        self.PASS = self.Green_f
        self.FAIL = self.Red_f
        self.WARNING = self.Light_Yellow_f
        self.ENDC = self.RESET

    def paint(self, text, colour):
        """Wrap text in a colour and a reset."""
        return f"{colour}{text}{self.RESET}"

    def verdict(self, ok):
        """PASS / FAIL word for a boolean check."""
        return self.paint("PASS", self.PASS) if ok else self.paint("FAIL", self.FAIL)
