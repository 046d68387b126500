#  cmdLineHelp.py Copyright (c) 2025, 2026 Nikki Cooper
#
#  This program and the accompanying materials are made available under the
#  terms of the GNU Lesser General Public License, version 3.0 which is available at
#  https://www.gnu.org/licenses/gpl-3.0.html#license-text
#
# help dictionary for argparse usage in cmdLineOpts.py
#
from Bcolors import Bcolors
bc = Bcolors()

# subcommand one-liners for parser.add_subparsers()
# pylint: disable=use-dict-literal
command = dict(
	gen=f"{bc.Light_Yellow_f}Generate a synthetic dataset: {bc.White_f}planted{bc.Light_Yellow_f} partition graph, {bc.White_f}gmm{bc.Light_Yellow_f} vectors or a {bc.White_f}clique{bc.Light_Yellow_f}.{bc.RESET}",
	build=f"{bc.Light_Yellow_f}Build a cluster tree and report its shape; {bc.White_f}--tree{bc.Light_Yellow_f} exports it.{bc.RESET}",
	classify=f"{bc.Light_Yellow_f}Tree-backed kNN classification on a held-out split.{bc.RESET}",
	cost=f"{bc.Light_Yellow_f}Hierarchy cost of a tree built without the balance band.{bc.RESET}",
	purity=f"{bc.Light_Yellow_f}Leaf purity of the tree against flat k-means baselines.{bc.RESET}",
	anomaly=f"{bc.Light_Yellow_f}Hold out classes and sweep the novel-class threshold.{bc.RESET}",
	cheeger=f"{bc.Light_Yellow_f}Check the Cheeger inequalities on an explicit graph.{bc.RESET}",
)

#argparse parser.add_argument_group()
group = dict(
	input_group=f"{bc.BOLD}{bc.Light_Blue_f}Input Options{bc.RESET}",
	gen_group=f"{bc.BOLD}{bc.Light_Blue_f}Generator Options{bc.RESET}",
	build_group=f"{bc.BOLD}{bc.Blue_f}Tree Build Options{bc.RESET}",
	query_group=f"{bc.BOLD}{bc.Light_Blue_f}Query Options{bc.RESET}",
	anomaly_group=f"{bc.BOLD}{bc.Light_Blue_f}Anomaly Options{bc.RESET}",
	output_group=f"{bc.BOLD}{bc.Light_Blue_f}Output Options{bc.RESET}",
	system_group=f"{bc.BOLD}{bc.Light_Blue_f}System Options{bc.RESET}",
)

# argparse help=""
# pylint: disable=redefined-builtin
help = dict(
	input=f"{bc.Light_Yellow_f}Input data. {bc.Green_f}.edges{bc.Light_Yellow_f} files are read as graphs, anything else as CSV vectors.{bc.RESET}",
	labels=f"{bc.Light_Yellow_f}Labels file, one integer per line.\n{bc.Magenta_f}For {bc.White_f}gen{bc.Magenta_f}: where to write the labels. Default: {bc.Green_f}<out>.labels{bc.RESET}",
	label_column=f"{bc.Light_Yellow_f}Read labels from this CSV column instead ({bc.Green_f}-1{bc.Light_Yellow_f} = last).{bc.RESET}",
	subtype=f"{bc.Light_Yellow_f}What to generate.{bc.RESET}",
	n=f"{bc.Light_Yellow_f}Number of points / nodes.{bc.RESET}",
	p=f"{bc.Light_Yellow_f}Intra-block edge probability ({bc.Green_f}planted{bc.Light_Yellow_f}).{bc.RESET}",
	q=f"{bc.Light_Yellow_f}Inter-block edge probability ({bc.Green_f}planted{bc.Light_Yellow_f}), must be below {bc.White_f}--p{bc.Light_Yellow_f}.{bc.RESET}",
	k=f"{bc.Light_Yellow_f}Number of clusters ({bc.Green_f}gmm{bc.Light_Yellow_f}).\n{bc.Magenta_f}Default: {bc.Green_f}4{bc.RESET}",
	dim=f"{bc.Light_Yellow_f}Dimension ({bc.Green_f}gmm{bc.Light_Yellow_f}).\n{bc.Magenta_f}Default: {bc.Green_f}10{bc.RESET}",
	sep=f"{bc.Light_Yellow_f}Minimum distance between cluster means ({bc.Green_f}gmm{bc.Light_Yellow_f}).\n{bc.Magenta_f}Default: {bc.Green_f}12{bc.RESET}",
	#
	rule=f"{bc.Light_Yellow_f}Splitting rule.\n{bc.Magenta_f}Default: {bc.Green_f}aev{bc.Magenta_f} (or the ini file){bc.RESET}",
	seed=f"{bc.Light_Yellow_f}Seed for every random choice of the run.\n{bc.Magenta_f}Default: {bc.Green_f}0{bc.RESET}",
	epsilon=f"{bc.Light_Yellow_f}Power iteration accuracy; rounds = ceil(4 ln n / epsilon).\n{bc.Magenta_f}Default: {bc.Green_f}0.1{bc.RESET}",
	leaf_max=f"{bc.Light_Yellow_f}Stop splitting at this many points.\n{bc.Magenta_f}Default: {bc.Green_f}1{bc.RESET}",
	no_balance=f"{bc.Light_Yellow_f}Allow splits outside the ({bc.Green_f}1/3{bc.Light_Yellow_f}, {bc.Green_f}2/3{bc.Light_Yellow_f}) balance band.{bc.RESET}",
	threads=f"{bc.Light_Yellow_f}Worker threads for the build. Results do not depend on it.\n{bc.Magenta_f}Default: {bc.Green_f}physical cores{bc.RESET}",
	#
	bucket=f"{bc.Light_Yellow_f}Query bucket size B: descent stops below B points.\n{bc.Magenta_f}Default: {bc.Green_f}64{bc.RESET}",
	knn=f"{bc.Light_Yellow_f}Neighbours per vote.\n{bc.Magenta_f}Default: {bc.Green_f}5{bc.RESET}",
	test_fraction=f"{bc.Light_Yellow_f}Share of points held back for testing.\n{bc.Magenta_f}Default: {bc.Green_f}0.2{bc.RESET}",
	#
	holdout=f"{bc.Light_Yellow_f}Comma separated class ids hidden during training.{bc.RESET}",
	threshold_grid=f"{bc.Light_Yellow_f}Comma separated tau values ({bc.Green_f}inf{bc.Light_Yellow_f} allowed).\n{bc.Magenta_f}Default: {bc.Green_f}0,0.1,...,1{bc.RESET}",
	superclasses=f"{bc.Light_Yellow_f}Class to superclass map, {bc.Green_f}class:super,class:super{bc.Light_Yellow_f} or a file with one pair per line.{bc.RESET}",
	#
	out=f"{bc.Light_Yellow_f}Output path (report, sweep CSV or generated data).\n{bc.Magenta_f}Default: {bc.Green_f}report to stdout{bc.RESET}",
	tree=f"{bc.Light_Yellow_f}Export the tree as JSON for HCTree.load; the other commands rebuild from {bc.White_f}--input{bc.Light_Yellow_f}.{bc.RESET}",
	brute_force=f"{bc.Light_Yellow_f}Also evaluate the cost pair by pair and compare ({bc.Green_f}n <= 2000{bc.Light_Yellow_f}).{bc.RESET}",
	#
	verbose=f"{bc.Light_Yellow_f}Enable verbose output.{bc.RESET}",
	config=f"{bc.Light_Yellow_f}ini file with defaults.\n{bc.Magenta_f}Default: {bc.Green_f}~/.config/pyHCT/pyHCT.ini{bc.RESET}",
)
