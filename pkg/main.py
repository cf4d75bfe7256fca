#!/usr/bin/env python3
"""
Multigraph Extremal Laboratory - Main Entry Point

Command-line front door for membership checks, regime classification,
constructions, closed-form formulas, exact search oracles and the
validation harness.
"""

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import pandas as pd
from colorama import Fore, Style, init as colorama_init
from dotenv import load_dotenv
from tabulate import tabulate

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from src.core import (
    CapExceededError, ConstraintSpec, GoldenStore, SearchConfig,
    ValidationHarness, any_disagreement, build_family_member, classify,
    count_members, describe, dump_multigraph, ex_c3c4, ex_pi_density, ex_pi_exact,
    ex_sigma_exact, is_isomorphic, is_member, load_multigraph, load_suite,
    max_product, max_sum, multigraph_to_record, parse_family, summarize,
    violations,
)
from src.core.formulas import C3C4_KNOWN, FormulaError

load_dotenv()

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DISAGREEMENT = 1
EXIT_USAGE = 2
EXIT_CAP = 3


def configure_logging(verbose: bool = False) -> None:
    """Log to a file and to stderr; stdout carries reports only."""
    level = logging.DEBUG if verbose else getattr(logging, os.getenv('LOG_LEVEL', 'INFO').upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(os.getenv('MGLAB_LOG_FILE', 'mglab.log')),
            logging.StreamHandler(sys.stderr)
        ],
        force=True,
    )


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description='Exact laboratory for (n,s,q)-multigraphs',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py formula 4 3 7
  python main.py classify 4 15
  python main.py search product 4 3 5 --all-witnesses
  python main.py girth45 5
  python main.py --format csv validate --suite suites/default.yaml
        """
    )
    parser.add_argument('--format', choices=['human', 'csv', 'records'], default='human',
                        help='Output format (default: human)')
    parser.add_argument('--max-nodes', type=_positive_int, help='Search node cap (MGLAB_MAX_NODES)')
    parser.add_argument('--max-seconds', type=_positive_int, help='Search time cap in seconds (MGLAB_MAX_SECONDS)')
    parser.add_argument('--threads', type=_positive_int, help='Worker threads for the search (MGLAB_THREADS)')
    parser.add_argument('--timings', action='store_true', help='Include timings and node counts in output')
    parser.add_argument('--regen-golden', action='store_true', help='Recompute and rewrite frozen golden values')
    parser.add_argument('--verbose', action='store_true', help='Enable verbose logging')

    sub = parser.add_subparsers(dest='command', required=True)

    check = sub.add_parser('check', help='Membership and violations for a multigraph file')
    check.add_argument('file')
    check.add_argument('--spec', nargs=2, type=int, metavar=('S', 'Q'), required=True)

    cls = sub.add_parser('classify', help='Regime of (s, q)')
    cls.add_argument('s', type=int)
    cls.add_argument('q', type=int)

    construct = sub.add_parser('construct', help='Build a family member: U:a, Ustar:s,a or T:parts,a')
    construct.add_argument('family')
    construct.add_argument('n', type=int)
    construct.add_argument('--out', help='Write the multigraph to this file')

    formula = sub.add_parser('formula', help='Closed-form values for (n, s, q)')
    for name in ('n', 's', 'q'):
        formula.add_argument(name, type=int)

    search = sub.add_parser('search', help='Exact product or sum maximum')
    search.add_argument('mode', choices=['product', 'sum'])
    for name in ('n', 's', 'q'):
        search.add_argument(name, type=int)
    search.add_argument('--all-witnesses', action='store_true', help='Return every witness class')

    count = sub.add_parser('count', help='Exact |F(n,s,q)|')
    for name in ('n', 's', 'q'):
        count.add_argument(name, type=int)

    girth = sub.add_parser('girth45', help='ex(n, {C3, C4}) with a witness')
    girth.add_argument('n', type=int)

    validate = sub.add_parser('validate', help='Run the validation suite')
    validate.add_argument('--suite', help='YAML suite file (default: suites/default.yaml)')
    validate.add_argument('--epsilons', nargs='*', default=None, help='Override stability epsilons')

    iso = sub.add_parser('isocheck', help='Isomorphism test for two multigraph files')
    iso.add_argument('file_a')
    iso.add_argument('file_b')

    stability = sub.add_parser('stability', help='Near-extremal classes over an epsilon grid')
    for name in ('n', 's', 'q'):
        stability.add_argument(name, type=int)
    stability.add_argument('--eps', nargs='+', required=True)

    return parser


class _Output:
    """Writes tables and records in the selected format."""

    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def records(self, records: Sequence[dict]) -> None:
        for record in records:
            self.stream.write(json.dumps(record) + '\n')

    def table(self, rows: List[Dict], headers: Optional[List[str]] = None, records: Optional[Sequence[dict]] = None) -> None:
        if self.fmt == 'records':
            self.records(records if records is not None else rows)
            return
        frame = pd.DataFrame(rows, columns=headers)
        if self.fmt == 'csv':
            self.stream.write(frame.to_csv(index=False))
        else:
            self.stream.write(tabulate(frame.values.tolist(), headers=list(frame.columns), tablefmt='simple') + '\n')

    def line(self, text: str) -> None:
        self.stream.write(text + '\n')


def _colour(ok: bool) -> str:
    return f"{Fore.GREEN}yes{Style.RESET_ALL}" if ok else f"{Fore.RED}no{Style.RESET_ALL}"


def _search_config(args) -> SearchConfig:
    return SearchConfig(max_nodes=args.max_nodes, max_seconds=args.max_seconds, threads=args.threads)


def cmd_check(args, out: _Output) -> int:
    G = load_multigraph(args.file)
    spec = ConstraintSpec(*args.spec)
    found = violations(G, spec)
    record = {'n': G.n, 's': spec.s, 'q': spec.q, 'member': is_member(G, spec),
              'violations': [[list(X), total] for X, total in found], 'stats': describe(G)}
    if out.fmt == 'human':
        stats = record['stats']
        out.line(f"{'member' if record['member'] else 'not a member'} of F({G.n},{spec.s},{spec.q})")
        out.line(f"sum {stats['sum']}, product {stats['product']}, mu {stats['mu']}, "
                 f"degrees {' '.join(map(str, stats['degrees']))}")
        if found:
            out.table([{'subset': ' '.join(map(str, X)), 'sum': total} for X, total in found], ['subset', 'sum'])
        else:
            out.line('no violations')
    else:
        out.table([{'subset': ' '.join(map(str, X)), 'sum': total} for X, total in found],
                  ['subset', 'sum'], records=[record])
    return EXIT_OK


def cmd_classify(args, out: _Output) -> int:
    regime = classify(args.s, args.q)
    if out.fmt == 'human':
        out.line(str(regime))
    else:
        out.table([regime.to_dict()], ['regime', 's', 'q', 'a', 'b', 't'], records=[regime.to_dict()])
    return EXIT_OK


def cmd_construct(args, out: _Output) -> int:
    family = parse_family(args.family)
    G = build_family_member(args.n, family)
    if args.out:
        dump_multigraph(G, args.out)
    record = multigraph_to_record(G)
    if out.fmt == 'csv':
        out.table([{'u': u, 'v': v, 'w': w} for (u, v), w in G.items()], ['u', 'v', 'w'])
    else:
        out.line(json.dumps(record))
    return EXIT_OK


def cmd_formula(args, out: _Output) -> int:
    n, s, q = args.n, args.s, args.q
    oracle = None if n in C3C4_KNOWN else (lambda m: ex_c3c4(m, _search_config(args))[0])
    product = ex_pi_exact(n, s, q, oracle)
    record = {'n': n, 's': s, 'q': q, 'regime': str(classify(s, q)), 'product': product.to_dict()}
    try:
        record['sum'] = ex_sigma_exact(n, s, q).to_dict()
    except FormulaError:
        record['sum'] = None
    try:
        record['density'] = ex_pi_density(s, q).to_dict()
    except FormulaError:
        record['density'] = None

    if out.fmt == 'human':
        out.line(f"{product.display()} ({product.status})")
        if record['sum']:
            out.line(f"ex_sigma: {record['sum'].get('value', '')} ({record['sum']['status']})")
    else:
        row = {'n': n, 's': s, 'q': q, 'product': product.display(), 'status': product.status}
        out.table([row], list(row), records=[record])
    return EXIT_OK


def cmd_search(args, out: _Output) -> int:
    spec = ConstraintSpec(args.s, args.q)
    oracle = max_product if args.mode == 'product' else max_sum
    certificate = oracle(args.n, spec, _search_config(args), all_witnesses=args.all_witnesses)
    record = certificate.to_dict(include_stats=args.timings)
    if out.fmt == 'human':
        out.line(f"{args.mode} maximum over F({args.n},{spec.s},{spec.q}): {certificate.value}")
        out.line(f"witness classes: {len(certificate.witnesses)}, labeled witnesses: {certificate.witness_count_labeled}")
        for W in certificate.witnesses:
            out.line(json.dumps(multigraph_to_record(W)))
    else:
        row = {'mode': args.mode, 'n': args.n, 's': spec.s, 'q': spec.q, 'value': certificate.value,
               'witness_classes': len(certificate.witnesses)}
        out.table([row], list(row), records=[record])
    return EXIT_OK


def cmd_count(args, out: _Output) -> int:
    spec = ConstraintSpec(args.s, args.q)
    total = count_members(args.n, spec, _search_config(args))
    row = {'n': args.n, 's': spec.s, 'q': spec.q, 'count': total}
    if out.fmt == 'human':
        out.line(str(total))
    else:
        out.table([row], list(row))
    return EXIT_OK


def cmd_girth45(args, out: _Output) -> int:
    value, witness = ex_c3c4(args.n, _search_config(args))
    edges = sorted(tuple(sorted(e)) for e in witness.edges)
    if out.fmt == 'human':
        out.line(str(value))
        out.line(' '.join(f"{u}-{v}" for u, v in edges))
    else:
        record = {'n': args.n, 'value': value, 'edges': [list(e) for e in edges]}
        out.table([{'n': args.n, 'value': value}], ['n', 'value'], records=[record])
    return EXIT_OK


def cmd_isocheck(args, out: _Output) -> int:
    G, H = load_multigraph(args.file_a), load_multigraph(args.file_b)
    same = is_isomorphic(G, H)
    if out.fmt == 'human':
        out.line('isomorphic' if same else 'not isomorphic')
    else:
        out.table([{'isomorphic': same}], ['isomorphic'])
    return EXIT_OK


def _stability_rows(harness: ValidationHarness, n: int, s: int, q: int, epsilons) -> List[dict]:
    return [dict(n=n, s=s, q=q, **row.to_dict()) for row in harness.stability_report(n, s, q, epsilons)]


def cmd_stability(args, out: _Output) -> int:
    harness = ValidationHarness(_search_config(args))
    rows = _stability_rows(harness, args.n, args.s, args.q, [Fraction(e) for e in args.eps])
    out.table(rows, ['n', 's', 'q', 'epsilon', 'classes', 'max_distance'])
    return EXIT_OK


def cmd_validate(args, out: _Output) -> int:
    suite = load_suite(args.suite) if args.suite else load_suite()
    if args.epsilons is not None:
        suite.epsilons = [Fraction(e) for e in args.epsilons]
    config = _search_config(args)
    if suite.threads and args.threads is None:
        config.threads = suite.threads
    harness = ValidationHarness(config)

    reports, _ = harness.validate_suite(suite, progress=out.fmt == 'human')
    summary = summarize(reports, include_timings=args.timings)
    golden = harness.golden_checks(GoldenStore(), regenerate=args.regen_golden)
    golden_ok = all(matches for *_, matches in golden)

    if out.fmt == 'records':
        out.records([r.to_dict(include_timings=args.timings) for r in reports])
        out.records([{'golden': key, 'frozen': frozen, 'computed': computed, 'matches': matches}
                     for key, frozen, computed, matches in golden])
    elif out.fmt == 'csv':
        out.stream.write(summary.to_csv(index=False))
    else:
        rows = summary.to_dict('records')
        for row in rows:
            row['agree'] = _colour(row['agree'])
        out.table(rows, list(summary.columns))
        out.table([{'golden': key, 'frozen': frozen, 'computed': computed, 'ok': _colour(matches)}
                   for key, frozen, computed, matches in golden], ['golden', 'frozen', 'computed', 'ok'])

    for n, s, q in suite.triples if suite.epsilons else []:
        try:
            rows = _stability_rows(harness, n, s, q, suite.epsilons)
        except ValueError as e:
            logger.info(f"No stability probe for (n={n}, s={s}, q={q}): {e}")
            continue
        if out.fmt != 'csv':
            out.table(rows, ['n', 's', 'q', 'epsilon', 'classes', 'max_distance'])

    if any_disagreement(reports) or not golden_ok:
        return EXIT_DISAGREEMENT
    return EXIT_OK


COMMANDS = {
    'check': cmd_check,
    'classify': cmd_classify,
    'construct': cmd_construct,
    'formula': cmd_formula,
    'search': cmd_search,
    'count': cmd_count,
    'girth45': cmd_girth45,
    'validate': cmd_validate,
    'isocheck': cmd_isocheck,
    'stability': cmd_stability,
}


def run(argv: Optional[Sequence[str]] = None, stream=None) -> int:
    """Dispatch argv and return the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    configure_logging(args.verbose)
    colorama_init()
    out = _Output(args.format, stream)
    try:
        return COMMANDS[args.command](args, out)
    except CapExceededError as e:
        logger.error(f"Cap exceeded: {e}")
        return EXIT_CAP
    except (ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_USAGE


def main():
    """Main application entry point."""
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
