import argparse
import logging
import os
import sys
import timeit
import typing

import pandas as pd
from termcolor import colored

from fairlattice import config, ingest, lattice, metrics, oracle, report, synth
from fairlattice.exceptions import CapacityError, DataError, FairLatticeError
from fairlattice.models import SyntheticConfig
from fairlattice.tally import build_table
from utils import transform_displayed_info, write_frame

logger = logging.getLogger(__name__)

BENCH_FILE = 'bench.csv'
BENCH_COLUMNS = ('m', 'n', 'propagation_seconds', 'edge_traversals', 'edge_bound',
                 'oracle_seconds', 'comparisons', 'time_ratio', 'equal', 'skipped')

# flag name -> SyntheticConfig field, applied over the YAML config when given
SYNTH_FLAGS = {
    'm': 'm', 'vertex_size': 'vertex_size', 'p_base': 'p_base', 'delta': 'delta',
    'n_low': 'n_biased_low', 'n_high': 'n_biased_high', 'placement': 'placement', 'seed': 'seed',
}


def _binarization(args) -> ingest.BinarizationConfig:
    if args.config:
        return ingest.load_config(args.config)
    return ingest.identity_config_for(args.input)


def cmd_audit(args) -> int:
    data = ingest.load_csv(args.input, _binarization(args), header=not args.no_header)
    audit = report.run_audit(data,
                             n_sub=args.n_sub,
                             n_repeats=args.n_repeats,
                             seed=args.seed,
                             allow_sparse=args.allow_sparse,
                             dump_subgroups=args.dump_subgroups,
                             metadata={'config': args.config})
    report.write_report(audit, args.out_dir)
    print(colored(transform_displayed_info(report.summary_info(audit)), 'green'))
    if audit.empty_count:
        print(colored(f"{audit.empty_count} empty subgroups excluded", 'yellow'))
    return 0


def synthetic_config(args) -> SyntheticConfig:
    values = config.load_yaml(args.config) if args.config else {}
    for flag, name in SYNTH_FLAGS.items():
        if getattr(args, flag) is not None:
            values[name] = getattr(args, flag)
    return SyntheticConfig.from_dict(values)


def cmd_synth(args) -> int:
    data = synth.generate(synthetic_config(args))
    ingest.save_csv(data, args.output)
    print(colored(f"{data.n_rows} rows over {2 ** data.m} vertices written to {args.output}", 'green'))
    return 0


def bench_row(m: int, n_rows: int, seed: int, repeat: int) -> typing.Dict[str, typing.Any]:
    data = synth.random_dataset(m, n_rows, seed)
    table = build_table(data)
    propagation = min(timeit.repeat(lambda: build_table(data), number=1, repeat=repeat))
    row = {'m': m, 'n': n_rows, 'propagation_seconds': propagation,
           'edge_traversals': table.edge_traversals, 'edge_bound': lattice.shape(m).edge_bound,
           'oracle_seconds': None, 'comparisons': None, 'time_ratio': None, 'equal': None, 'skipped': False}
    try:
        oracle.check_budget(m, n_rows)
    except CapacityError as e:
        logger.warning("skipping oracle for m=%d, n=%d: %s", m, n_rows, e)
        print(colored(f"m={m} n={n_rows}: oracle skipped ({e})", 'yellow'))
        row['skipped'] = True
        return row

    start = timeit.default_timer()
    expected = oracle.brute_force_counts(data)
    elapsed = timeit.default_timer() - start
    if not table.same_counts(expected):
        raise DataError(f"propagated counts differ from brute force at m={m}, n={n_rows}")
    row.update(oracle_seconds=elapsed, comparisons=oracle.comparison_count(m, n_rows),
               time_ratio=elapsed / propagation if propagation > 0 else None, equal=True)
    return row


def cmd_bench(args) -> int:
    rows = []
    for m in args.m:
        lattice.check_attribute_count(m)
        for n_rows in args.n:
            row = bench_row(m, n_rows, args.seed, args.repeat)
            rows.append(row)
            ratio = row['time_ratio']
            print(colored(f"m={m} n={n_rows}: propagation {row['propagation_seconds']:.4f}s, "
                          f"{row['edge_traversals']} edges (bound {row['edge_bound']})"
                          + ('' if ratio is None else f", oracle {row['oracle_seconds']:.4f}s, ratio {ratio:.1f}"),
                          'green'))
    if args.out_dir:
        path = os.path.join(args.out_dir, BENCH_FILE)
        write_frame(pd.DataFrame(rows, columns=list(BENCH_COLUMNS)), path)
        logger.info("wrote bench table to %s", path)
    return 0


def cmd_adult_prep(args) -> int:
    cfg = ingest.load_config(args.config) if args.config else ingest.adult_preset()
    data = ingest.load_csv(args.input, cfg, header=not args.no_header)
    ingest.save_csv(data, args.output)
    table = build_table(data)
    info = {'N': data.n_rows, 'M': data.m, 'dropped rows': data.dropped_rows}
    for k in range(data.m + 1):
        n_avg, n_min = metrics.level_counts(table, k)
        info[f"level {k}"] = f"average {n_avg:.1f}, minimum {n_min}"
    print(colored(transform_displayed_info(info), 'green'))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='fairlattice',
                                     description='intersectional fairness audit over the subgroup lattice')
    parser.add_argument('--verbose', action='store_true', help='debug logging')
    commands = parser.add_subparsers(dest='command', required=True)

    audit = commands.add_parser('audit', help='audit a CSV dataset')
    audit.add_argument('--input', required=True)
    audit.add_argument('--config', help='binarization YAML; 0/1 columns with a label column when omitted')
    audit.add_argument('--no-header', action='store_true', help='raw UCI Adult file without a header row')
    audit.add_argument('--n-sub', type=int, help='rows per vertex in every subsample; no subsampling when omitted')
    audit.add_argument('--n-repeats', type=int, default=config.DEFAULT_N_REPEATS)
    audit.add_argument('--seed', type=int, default=config.DEFAULT_SEED)
    audit.add_argument('--allow-sparse', action='store_true')
    audit.add_argument('--dump-subgroups', action='store_true')
    audit.add_argument('--out-dir', default='out')
    audit.set_defaults(func=cmd_audit)

    gen = commands.add_parser('synth', help='generate a synthetic benchmark dataset')
    gen.add_argument('--config', help='SyntheticConfig YAML, e.g. conf/experiment1.yml')
    gen.add_argument('--output', required=True)
    gen.add_argument('--m', type=int)
    gen.add_argument('--vertex-size', type=int)
    gen.add_argument('--p-base', type=float)
    gen.add_argument('--delta', type=float)
    gen.add_argument('--n-low', type=int)
    gen.add_argument('--n-high', type=int)
    gen.add_argument('--placement', choices=('random', 'contiguous'))
    gen.add_argument('--seed', type=int)
    gen.set_defaults(func=cmd_synth)

    bench = commands.add_parser('bench', help='time propagation against brute force')
    bench.add_argument('--m', type=int, nargs='+', default=[4, 6, 8])
    bench.add_argument('--n', type=int, nargs='+', default=[10_000])
    bench.add_argument('--seed', type=int, default=config.DEFAULT_SEED)
    bench.add_argument('--repeat', type=int, default=3, help='propagation timing keeps the fastest run')
    bench.add_argument('--out-dir')
    bench.set_defaults(func=cmd_bench)

    adult = commands.add_parser('adult-prep', help='binarise a user-supplied Adult CSV')
    adult.add_argument('--input', required=True)
    adult.add_argument('--config', help='defaults to the built-in Adult preset')
    adult.add_argument('--no-header', action='store_true')
    adult.add_argument('--output', required=True)
    adult.set_defaults(func=cmd_adult_prep)
    return parser


def main(argv: typing.Optional[typing.List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(format=config.LOG_FORMAT, level=logging.DEBUG if args.verbose else logging.INFO)
    try:
        return args.func(args)
    except FairLatticeError as e:
        logger.debug("command failed", exc_info=True)
        print(colored(f"error: {e}", 'red'), file=sys.stderr)
        return e.exit_code
