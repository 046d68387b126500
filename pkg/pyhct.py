#!/usr/bin/env python
#   pyhct.py Copyright (c) 2025, 2026 Nikki Cooper
#
#  This program and the accompanying materials are made available under the
#  terms of the GNU Lesser General Public License, version 3.0 which is available at
#  https://www.gnu.org/licenses/gpl-3.0.html#license-text
#
#
import os
import sys

import constants as const
from Bcolors import Bcolors
from cmdLineOpts import cmdLineOptions
from debug_utils import set_verbose
from hctCommands import run
from hctErrors import HCTError


def main(argv=None):
    """
    Entry point for pyHCT: parse the command line, run the subcommand and turn
    library errors into a red message and exit status 1.

    The banner goes to stderr so that reports printed on stdout stay valid JSON.

    Returns:
        int: process exit code.
    """
    # Create a Bcolors instance to give us colors in the console.
    bcolors = Bcolors()
    program_name = os.path.basename(__file__)
    print(
        f"{bcolors.RESET}{bcolors.Green_f}{program_name} "
        f"version {bcolors.Cyan_f}{const.TOOL_VERSION}{bcolors.RESET}"
        f" Hierarchical cluster trees for search and classification.{bcolors.RESET}", file=sys.stderr)

    opts = cmdLineOptions(argv)
    set_verbose(opts.verbose)

    try:
        return run(opts)
    except HCTError as error:
        print(f"{bcolors.FAIL}Error: {error}{bcolors.RESET}", file=sys.stderr)
        return 1
    except OSError as error:
        print(f"{bcolors.FAIL}Error: {error.strerror}: {error.filename}{bcolors.RESET}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
