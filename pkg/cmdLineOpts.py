#  cmdLineOpts.py Copyright (c) 2025, 2026 Nikki Cooper
#
#  This program and the accompanying materials are made available under the
#  terms of the GNU Lesser General Public License, version 3.0 which is available at
#  https://www.gnu.org/licenses/gpl-3.0.html#license-text
#
import argparse
import math
import os

from Bcolors import Bcolors

import cmdLineHelp as chl
import constants as const

bc = Bcolors()

GEN_TYPES = ("planted", "gmm", "clique")


def cmdLineOptions(argv=None):
    """
    Parses the pyHCT command line.

    Every subcommand shares the system options (--seed, --threads, --out,
    --config, --verbose).  Tree-building subcommands add the input, build and
    query groups.  Flags that have an ini counterpart default to None so the
    command layer can tell "not given" from "given" and fall back to the ini
    file, then to the built-in defaults.

    Returns
    -------
    argparse.Namespace
        with ``command`` naming the subcommand.

    Raises
    ------
    SystemExit
        on parse errors or inconsistent flag combinations.
    """
    parser = argparse.ArgumentParser(
        prog="pyhct",
        description=f"{bc.BOLD}{bc.Blue_f}pyHCT - hierarchical cluster trees for search and classification{bc.RESET}",
        formatter_class=argparse.RawTextHelpFormatter
        )

    # Shared parent parsers
    system = argparse.ArgumentParser(add_help=False)
    system_group = system.add_argument_group(chl.group["system_group"])
    system_group.add_argument("--seed", type=non_negative_int, default=const.DEFAULT_SEED, help=chl.help["seed"])
    system_group.add_argument("--threads", type=non_negative_int, default=None, help=chl.help["threads"])
    system_group.add_argument("--config", type=str, default=None, help=chl.help["config"])
    system_group.add_argument("--verbose", action="store_true", help=chl.help["verbose"])

    inputs = argparse.ArgumentParser(add_help=False)
    input_group = inputs.add_argument_group(chl.group["input_group"])
    input_group.add_argument("--input", type=validate_user_file, required=True, help=chl.help["input"])
    input_group.add_argument("--labels", type=validate_user_file, default=None, help=chl.help["labels"])
    input_group.add_argument("--label-column", type=int, default=None, help=chl.help["label_column"])

    build = argparse.ArgumentParser(add_help=False)
    build_group = build.add_argument_group(chl.group["build_group"])
    build_group.add_argument("--rule", type=str, choices=list(const.RULE_FLAGS), default=None, help=chl.help["rule"])
    build_group.add_argument("--epsilon", type=positive_float, default=None, help=chl.help["epsilon"])
    build_group.add_argument("--leaf-max", type=positive_int, default=None, help=chl.help["leaf_max"])
    build_group.add_argument("--no-balance", action="store_true", help=chl.help["no_balance"])

    query = argparse.ArgumentParser(add_help=False)
    query_group = query.add_argument_group(chl.group["query_group"])
    query_group.add_argument("--bucket", type=positive_int, default=None, help=chl.help["bucket"])
    query_group.add_argument("--knn", type=positive_int, default=None, help=chl.help["knn"])
    query_group.add_argument("--test-fraction", type=open_fraction, default=None, help=chl.help["test_fraction"])

    def output(required=False):
        out = argparse.ArgumentParser(add_help=False)
        out_group = out.add_argument_group(chl.group["output_group"])
        out_group.add_argument("--out", type=str, required=required, default=None, help=chl.help["out"])
        return out, out_group

    commands = parser.add_subparsers(dest="command", metavar="command", required=True)

    def add(name, parents):
        return commands.add_parser(name, parents=parents, help=chl.command[name], description=chl.command[name],
                                   formatter_class=argparse.RawTextHelpFormatter)

    # gen
    gen_out, gen_out_group = output(required=True)
    gen_out_group.add_argument("--labels", type=str, default=None, help=chl.help["labels"])
    gen = add("gen", [system, gen_out])
    gen_group = gen.add_argument_group(chl.group["gen_group"])
    gen_group.add_argument("subtype", choices=GEN_TYPES, help=chl.help["subtype"])
    gen_group.add_argument("--n", type=positive_int, required=True, help=chl.help["n"])
    gen_group.add_argument("--p", type=probability, default=None, help=chl.help["p"])
    gen_group.add_argument("--q", type=probability, default=None, help=chl.help["q"])
    gen_group.add_argument("--k", type=positive_int, default=4, help=chl.help["k"])
    gen_group.add_argument("--dim", type=positive_int, default=10, help=chl.help["dim"])
    gen_group.add_argument("--sep", type=positive_float, default=12.0, help=chl.help["sep"])

    # build
    build_out, build_out_group = output()
    build_out_group.add_argument("--tree", type=str, default=None, help=chl.help["tree"])
    add("build", [system, inputs, build, build_out])

    # classify / purity
    add("classify", [system, inputs, build, query, output()[0]])
    add("purity", [system, inputs, build, query, output()[0]])

    # cost
    cost_out, cost_out_group = output()
    cost_out_group.add_argument("--brute-force", action="store_true", help=chl.help["brute_force"])
    add("cost", [system, inputs, build, cost_out])

    # anomaly
    anomaly = add("anomaly", [system, inputs, build, query, output()[0]])
    anomaly_group = anomaly.add_argument_group(chl.group["anomaly_group"])
    anomaly_group.add_argument("--holdout", type=validate_class_list, required=True, help=chl.help["holdout"])
    anomaly_group.add_argument("--threshold-grid", type=validate_threshold_grid, default=None,
                               help=chl.help["threshold_grid"])
    anomaly_group.add_argument("--superclasses", type=validate_superclasses, default=None,
                               help=chl.help["superclasses"])

    # cheeger
    add("cheeger", [system, inputs, output()[0]])

    args = parser.parse_args(argv)

    # gen
    if args.command == "gen":
        if args.subtype == "planted":
            if args.p is None or args.q is None:
                parser.error("gen planted requires --p and --q")
            if args.q >= args.p:
                parser.error("--q must be smaller than --p")
            if args.n % 2:
                parser.error("gen planted requires an even --n")
        elif args.p is not None or args.q is not None:
            parser.error("--p and --q are only used by gen planted")
        if args.subtype == "gmm" and args.k > args.n:
            parser.error("gen gmm requires --k <= --n")
        if args.subtype == "clique" and args.n < 2:
            parser.error("a clique needs --n >= 2 (a single node would be isolated)")
        return args

    if args.labels is not None and args.label_column is not None:
        parser.error("use either --labels or --label-column, not both")
    if args.command == "cheeger" and not args.input.endswith(".edges"):
        parser.error("cheeger needs an explicit graph (.edges edge list)")

    return args


# Validate user supplied input files
def validate_user_file(file_path):
    """Checks if a given path is a readable file."""
    if file_path is None:
        raise argparse.ArgumentTypeError(f"Error: {bc.Light_Yellow_f}A file must be supplied.{bc.RESET}")
    expanded_path = os.path.expanduser(file_path)
    if not os.path.isfile(expanded_path):
        raise argparse.ArgumentTypeError(f"Error: {bc.Red_f}'{file_path}'{bc.Light_Yellow_f} is not a valid file.{bc.RESET}")
    return expanded_path


def _number(text, kind):
    try:
        return kind(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{bc.Red_f}{text}{bc.Light_Yellow_f} is not a valid number{bc.RESET}") from None


def positive_int(text):
    value = _number(text, int)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{bc.Light_Yellow_f}Value must be at least{bc.Green_f} 1{bc.Light_Yellow_f}, but got{bc.Red_f} {value}{bc.RESET}")
    return value


def non_negative_int(text):
    value = _number(text, int)
    if value < 0:
        raise argparse.ArgumentTypeError(f"{bc.Light_Yellow_f}Value must not be negative, but got{bc.Red_f} {value}{bc.RESET}")
    return value


def positive_float(text):
    value = _number(text, float)
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"{bc.Light_Yellow_f}Value must be a positive number, but got{bc.Red_f} {text}{bc.RESET}")
    return value


def probability(text):
    value = _number(text, float)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{bc.Light_Yellow_f}Value must be between{bc.Green_f} 0{bc.Light_Yellow_f} and{bc.Green_f} 1{bc.Light_Yellow_f}, but got{bc.Red_f} {text}{bc.RESET}")
    return value


def open_fraction(text):
    value = _number(text, float)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"{bc.Light_Yellow_f}Value must lie strictly between{bc.Green_f} 0{bc.Light_Yellow_f} and{bc.Green_f} 1{bc.Light_Yellow_f}, but got{bc.Red_f} {text}{bc.RESET}")
    return value


# --threshold-grid 0,0.1,0.5,inf
def validate_threshold_grid(text):
    grid = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        value = _number(part, float)
        if math.isnan(value) or value < 0:
            raise argparse.ArgumentTypeError(f"{bc.Light_Yellow_f}Thresholds must be non-negative, but got{bc.Red_f} {part}{bc.RESET}")
        grid.append(value)
    if not grid:
        raise argparse.ArgumentTypeError(f"Error: {bc.Light_Yellow_f}The threshold grid is empty.{bc.RESET}")
    return tuple(grid)


# --holdout 3,7
def validate_class_list(text):
    classes = [non_negative_int(part.strip()) for part in text.split(",") if part.strip()]
    if not classes:
        raise argparse.ArgumentTypeError(f"Error: {bc.Light_Yellow_f}Name at least one class to hold out.{bc.RESET}")
    if len(set(classes)) != len(classes):
        raise argparse.ArgumentTypeError(f"Error: {bc.Red_f}'{text}'{bc.Light_Yellow_f} repeats a class.{bc.RESET}")
    return tuple(classes)


# --superclasses 0:0,1:0,2:1  or a file of "class superclass" lines
def validate_superclasses(text):
    expanded_path = os.path.expanduser(text)
    if os.path.isfile(expanded_path):
        with open(expanded_path, encoding="utf-8") as handle:
            pairs = [line.split("#", 1)[0].replace(":", " ").replace(",", " ").split() for line in handle]
        pairs = [pair for pair in pairs if pair]
    else:
        pairs = [part.split(":") for part in text.split(",") if part.strip()]
    mapping = {}
    for pair in pairs:
        if len(pair) != 2:
            raise argparse.ArgumentTypeError(f"Error: {bc.Red_f}'{':'.join(pair)}'{bc.Light_Yellow_f} is not a class:superclass pair.{bc.RESET}")
        mapping[non_negative_int(pair[0].strip())] = non_negative_int(pair[1].strip())
    if not mapping:
        raise argparse.ArgumentTypeError(f"Error: {bc.Light_Yellow_f}The superclass map is empty.{bc.RESET}")
    return mapping
