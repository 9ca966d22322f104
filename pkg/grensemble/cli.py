"""Command line interface for grensemble."""

import logging
import argparse
import argcomplete  # type: ignore
import pathlib
import sys
import pandas as pd  # type: ignore
from enum import Enum
from typing import Optional, Union
from .config import Config, default_config_file
from .const import MODE_STRICT, MODE_VALID_AMR, TIE_FIRST_PIVOT, TIE_STABLE_RNG
from .exceptions import AlignmentError, GrensembleException
from .grensemble import Grensemble, format_mapping
from .penman_io import format_corpus
from .synth import NoiseSpec

_LOGGER = logging.getLogger(__name__)

EXIT_ERROR = 1
EXIT_ALIGNMENT = 2


class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"

    def __str__(self):
        return self.value


def print_df(df: pd.DataFrame, output_format: Optional[OutputFormat]):
    """Print a pandas dataframe in specified format."""
    match output_format:
        case OutputFormat.CSV:
            print(df.to_csv(index=False))

        case OutputFormat.JSON:
            print(df.to_json(orient="records", indent=2))

        case None:
            print(df.to_string(index=False))

        case _:
            raise NotImplementedError("unknown dataframe output format: %s", output_format)


def theta_type(value: str) -> Union[int, float]:
    """Vote count ("3") or fraction of the number of inputs ("0.5")."""
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid theta: {value!r}")


def positive_int(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def create_parser():
    parser = argparse.ArgumentParser(
        description="Ensemble graph predictions (e.g. AMR parses) by pivot voting"
    )

    parser.add_argument(
        "-f", "--format", type=OutputFormat, choices=list(OutputFormat),
        help="set output format for commands that output a pandas dataframe"
    )

    parser.add_argument(
        "-c", "--config-file", type=pathlib.Path,
        help=f"path to configuration file (default {default_config_file()})",
    )

    parser.add_argument(
        "-v", "--verbose", action="count", default=0,
        help="increase verbosity. Can be provided up to two times."
    )

    # options shared by every command that matches graphs
    matching = argparse.ArgumentParser(add_help=False)
    matching.add_argument(
        "--restarts", type=positive_int,
        help="hill-climbing restarts per match"
    )
    matching.add_argument(
        "--max-climb-steps", type=positive_int,
        help="cap on improving moves per restart (default: climb to a local optimum)"
    )
    matching.add_argument("--seed", type=int, help="random seed")
    matching.add_argument(
        "--jobs", "-j", type=positive_int,
        help="worker processes (default: $GRENSEMBLE_JOBS or 1)"
    )
    matching.add_argument(
        "--generic", dest="amr_mode", action="store_const", const=False,
        help="treat inputs as generic graphs: no inverse role normalization, no root matching"
    )
    matching.add_argument(
        "--lenient", dest="strict", action="store_const", const=False,
        help="replace unparsable entries with empty graphs instead of failing"
    )

    subparsers = parser.add_subparsers(dest="subparser_name", required=True)

    def ensemble(gr: Grensemble, args):
        corpus, report = gr.ensemble_files(args.predictions, args.out, args.report, args.pivot)
        if args.out is None:
            print(format_corpus(corpus, gr.config.amr_mode), end="")
        else:
            print_df(report.drop(columns=["per_pivot_supports"]), args.format)

    parser_ensemble = subparsers.add_parser(
        "ensemble", parents=[matching],
        help="ensemble aligned prediction files"
    )
    parser_ensemble.set_defaults(func_grensemble=ensemble)

    parser_ensemble.add_argument(
        "predictions", nargs="+", type=pathlib.Path,
        help="PENMAN prediction files, aligned by ::id or by position"
    )

    parser_ensemble.add_argument(
        "--out", "-o", type=pathlib.Path,
        help="output PENMAN file (default: stdout)"
    )

    parser_ensemble.add_argument(
        "--report", type=pathlib.Path,
        help="write a JSON report with one row per entry"
    )

    parser_ensemble.add_argument(
        "--theta", "-t", type=theta_type,
        help="minimum votes: an integer count or a fraction of the number of inputs (default 0.5)"
    )

    parser_ensemble.add_argument(
        "--mode", choices=[MODE_VALID_AMR, MODE_STRICT],
        help="validity mode of the output graphs"
    )

    parser_ensemble.add_argument(
        "--tie-policy", choices=[TIE_FIRST_PIVOT, TIE_STABLE_RNG],
        help="how to choose among pivots with equal support"
    )

    parser_ensemble.add_argument(
        "--pivot", type=int,
        help="only use the input with this index as pivot"
    )

    def score(gr: Grensemble, args):
        s, frame = gr.score_files(args.prediction, args.gold, args.report, args.inputs, args.unlabeled)
        if args.per_sentence:
            print_df(frame, args.format)
        print(f"Precision: {s.precision:.4f}")
        print(f"Recall: {s.recall:.4f}")
        print(f"F1: {s.f1:.4f}")

    parser_score = subparsers.add_parser(
        "score", parents=[matching],
        help="compute corpus Smatch of predictions against gold"
    )
    parser_score.set_defaults(func_grensemble=score)

    parser_score.add_argument("prediction", type=pathlib.Path)
    parser_score.add_argument("gold", type=pathlib.Path)

    parser_score.add_argument(
        "--report", type=pathlib.Path,
        help="write a JSON score report"
    )

    parser_score.add_argument(
        "--inputs", nargs="+", type=pathlib.Path, default=[],
        help="ensemble input files; adds the support/Smatch correlation to the report"
    )

    parser_score.add_argument(
        "--unlabeled", action="store_true",
        help="ignore edge labels"
    )

    parser_score.add_argument(
        "--per-sentence", action="store_true",
        help="print per-sentence scores"
    )

    def match(gr: Grensemble, args):
        g1, _, m = gr.match_files(args.graph1, args.graph2, args.exact)
        print(format_mapping(g1, m))
        print(f"matched triples: {m.score}")

    parser_match = subparsers.add_parser(
        "match", parents=[matching],
        help="print the best vertex match between the first graphs of two files"
    )
    parser_match.set_defaults(func_grensemble=match)

    parser_match.add_argument("graph1", type=pathlib.Path)
    parser_match.add_argument("graph2", type=pathlib.Path)

    parser_match.add_argument(
        "--exact", action="store_true",
        help="use exhaustive search (small graphs only)"
    )

    def stats(gr: Grensemble, args):
        result = gr.stats(args.predictions, args.gold, args.report)
        if args.per_sentence:
            print_df(result.per_sentence, args.format)
        print_df(result.summary, args.format)
        print_df(result.pivot_frequencies, args.format)
        if result.correlation is None:
            print("Pearson r: undefined")
        else:
            r, p_value = result.correlation
            print(f"Pearson r: {r:.4f} (p = {p_value:.3g})")

    parser_stats = subparsers.add_parser(
        "stats", parents=[matching],
        help="normalized support, Smatch and pivot selection statistics"
    )
    parser_stats.set_defaults(func_grensemble=stats)

    parser_stats.add_argument(
        "predictions", nargs="+", type=pathlib.Path,
        help="PENMAN prediction files"
    )

    parser_stats.add_argument(
        "--gold", "-g", type=pathlib.Path, required=True,
        help="gold PENMAN file"
    )

    parser_stats.add_argument("--report", type=pathlib.Path, help="write a JSON report")

    parser_stats.add_argument(
        "--per-sentence", action="store_true",
        help="print per-sentence support and Smatch"
    )

    def synth(gr: Grensemble, args):
        noise = NoiseSpec(
            p_node_relabel=args.p_node_relabel,
            p_edge_relabel=args.p_edge_relabel,
            p_edge_delete=args.p_edge_delete,
            p_edge_add=args.p_edge_add,
            p_node_delete=args.p_node_delete,
            disjoint_vocab=args.disjoint_vocab,
            seed=gr.config.seed,
        )
        paths = gr.synth(args.out_dir, args.sentences, args.models, args.nodes, args.density,
                         noise, args.correlated)
        for p in paths:
            print(p)

    parser_synth = subparsers.add_parser(
        "synth",
        help="generate a synthetic gold corpus and noisy prediction corpora"
    )
    parser_synth.set_defaults(func_grensemble=synth)

    parser_synth.add_argument("out_dir", type=pathlib.Path)
    parser_synth.add_argument("--sentences", "-n", type=positive_int, default=100)
    parser_synth.add_argument("--models", "-m", type=positive_int, default=5)
    parser_synth.add_argument("--nodes", type=positive_int, default=20)
    parser_synth.add_argument("--density", type=float, default=1.2,
                              help="edges per node, default: %(default)s")
    parser_synth.add_argument("--p-node-relabel", type=float, default=0.1)
    parser_synth.add_argument("--p-edge-relabel", type=float, default=0.1)
    parser_synth.add_argument("--p-edge-delete", type=float, default=0.05)
    parser_synth.add_argument("--p-edge-add", type=float, default=0.05)
    parser_synth.add_argument("--p-node-delete", type=float, default=0.0)
    parser_synth.add_argument("--seed", type=int, help="random seed")
    parser_synth.add_argument(
        "--correlated", action="store_true",
        help="all simulated models make the same errors"
    )
    parser_synth.add_argument(
        "--disjoint-vocab", action="store_true",
        help="relabel with labels that never occur in gold graphs"
    )

    return parser, subparsers


def main(argv: Optional[list[str]] = None):
    parser, _ = create_parser()

    argcomplete.autocomplete(parser)

    args = parser.parse_args(argv)

    levels = {
        0: logging.WARNING,
        1: logging.INFO,
    }

    level = levels.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level)
    _LOGGER.info("log verbosity: %s", logging.getLevelName(level))

    _LOGGER.debug("args: %r", args)

    try:
        config = Config.load(args.config_file)
    except Exception as e:
        sys.exit(f"Error reading config file: {str(e)}")

    options = vars(args)
    config = config.override(**{
        key: options.get(key)
        for key in ("theta", "mode", "tie_policy", "restarts", "max_climb_steps",
                    "seed", "jobs", "amr_mode", "strict")
    })
    _LOGGER.debug("config: %r", config)

    gr = Grensemble(config)

    try:
        ret = args.func_grensemble(gr, args)
        sys.exit(ret if ret is not None else 0)
    except AlignmentError as e:
        print(f"Error: {str(e)}", file=sys.stderr)
        sys.exit(EXIT_ALIGNMENT)
    # print "expected" grensemble exceptions w/o stack trace
    except GrensembleException as e:
        sys.exit(f"Error: {str(e)}")
    except Exception:
        _LOGGER.exception("unexpected exception")
        sys.exit("unexpected exception")
