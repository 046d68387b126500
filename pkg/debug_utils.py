# debug_utils.py
#
# Console diagnostics: verbose-only traces tagged with the caller's file and line,
# and warnings that always reach stderr.
import inspect
import os
import sys

from Bcolors import Bcolors

_state = {"verbose": False}
_bc = Bcolors(enabled=sys.stderr.isatty() and "NO_COLOR" not in os.environ)


def set_verbose(flag):
    _state["verbose"] = bool(flag)


def debug(*args):
    if not _state["verbose"]:
        return
    frame = inspect.currentframe().f_back
    info = inspect.getframeinfo(frame)
    print(f"{_bc.DIM}{os.path.basename(info.filename)}, line {info.lineno}, in {info.function}:{_bc.RESET}",
          *args, file=sys.stderr)


def warn(message):
    print(f"{_bc.WARNING}Warning: {message}{_bc.RESET}", file=sys.stderr)


def note(message):
    if _state["verbose"]:
        print(f"{_bc.Light_Blue_f}{message}{_bc.RESET}", file=sys.stderr)
