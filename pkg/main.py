#!/usr/bin/env python3
"""
Congruence Verification Toolkit - Command Line
sum / verify / classify / scan over truncated binomial and Catalan sums mod p
"""

import functools
import logging
import logging.config
import os
import sys

import click
from colorama import init as colorama_init
from pydantic import ValidationError
from sympy import primerange

from config.advanced_settings import LOGGING_CONFIG, default_workers, oracle_config, sweep_defaults
from config.settings import LOG_FILE
from src.cubicres import CubicClass, classify, sun_c0_criterion
from src.exceptions import BudgetExceeded, CongruenceError, DegenerateC
from src.harness import (
    ReportWriter, SweepConfig, load_config_file, render_scan, render_summary,
    run_sweep, scan,
)
from src.linrec import RecurrenceSpec, sum_fast, sum_via_roots
from src.modarith import PrimePowerModulus, parse_rational
from src.oracle import SumDescriptor, direct_sum

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

logger = logging.getLogger(__name__)


def setup_logging():
    """Console on stderr, rotating file under logs/"""
    log_dir = os.path.dirname(LOG_FILE)
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
    logging.config.dictConfig(LOGGING_CONFIG)


def exit_codes(func):
    """Map library errors to process exit codes"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except BudgetExceeded as e:
            click.echo(f"❌ Budget exceeded: {e}", err=True)
            sys.exit(EXIT_BUDGET)
        except ValidationError as e:
            click.echo(f"❌ Invalid configuration:\n{e}", err=True)
            sys.exit(EXIT_USAGE)
        except CongruenceError as e:
            click.echo(f"❌ {type(e).__name__}: {e}", err=True)
            sys.exit(EXIT_USAGE)
    return wrapper


@click.group()
def cli():
    """Verify closed-form congruences for truncated binomial sums."""
    colorama_init()
    setup_logging()


@cli.command('sum')
@click.option('--h', 'h', type=int, required=True, help='Order h >= 1 of binom((h+1)k, k+d)')
@click.option('--m', 'm', type=str, required=True, help='Nonzero rational m, e.g. 7 or -1/3')
@click.option('--p', 'p', type=int, required=True, help='Prime p')
@click.option('--a', 'a', type=int, default=1, show_default=True, help='Exponent a >= 1')
@click.option('--d', 'd', type=int, default=0, show_default=True, help='Offset with -h < d <= h p^a')
@click.option('--method', type=click.Choice(['fast', 'roots', 'oracle']), default='fast', show_default=True)
@click.option('--budget', type=int, default=None, help='Oracle term budget')
@click.option('--workers', type=int, default=None, help='Oracle worker processes')
@exit_codes
def sum_command(h, m, p, a, d, method, budget, workers):
    """Print sum_{k < p^a} binom((h+1)k, k+d) / m^k mod p."""
    pp = PrimePowerModulus(p, a)
    m_num, m_den = parse_rational(m)
    if method == 'oracle':
        desc = SumDescriptor(h, m_num, m_den, d=d)
        value = direct_sum(desc, pp, budget or oracle_config.budget, workers or default_workers())
    else:
        spec = RecurrenceSpec.build(h, m_num, m_den, pp.p)
        route = sum_fast if method == 'fast' else sum_via_roots
        value = route(spec, d, pp.a)
    logger.debug(f"sum h={h} m={m} d={d} mod {pp} via {method}: {value}")
    click.echo(str(value))


def _sweep_values(config_path, theorems, p, pmin, pmax, a, amax, c_values, t_values, d, budget,
                  workers, output_format, out):
    values = load_config_file(config_path) if config_path else {}
    flags = {
        'theorems': list(theorems) or None,
        'pmin': p if p is not None else pmin,
        'pmax': p if p is not None else pmax,
        'amin': a,
        'amax': amax if amax is not None else a,
        'c_values': list(c_values) or None,
        't_values': list(t_values) or None,
        'd_values': d,
        'budget': budget,
        'workers': workers,
        'output_format': output_format,
        'out': out,
    }
    values.update({key: value for key, value in flags.items() if value is not None})
    return values


@cli.command('verify')
@click.option('--theorem', 'theorems', multiple=True, help='Theorem id (repeatable), default all')
@click.option('--p', 'p', type=int, default=None, help='Single prime, overrides --pmin/--pmax')
@click.option('--pmin', type=int, default=None, help=f'Smallest prime [{sweep_defaults.pmin}]')
@click.option('--pmax', type=int, default=None, help=f'Largest prime [{sweep_defaults.pmax}]')
@click.option('--a', 'a', type=int, default=None, help='Smallest exponent a')
@click.option('--amax', type=int, default=None, help='Largest exponent a')
@click.option('--c', 'c_values', multiple=True, help='Rational c for T1.1 / T3.2 (repeatable)')
@click.option('--t', 't_values', type=int, multiple=True, help='Integer t for T1.3 (repeatable)')
@click.option('--d', 'd', type=str, default=None, help="Offsets: 'all', '0,1' or 'lo:hi'")
@click.option('--budget', type=int, default=None, help='Oracle term budget per sum')
@click.option('--workers', type=int, default=None, help='Parallel worker processes')
@click.option('--format', 'output_format', type=click.Choice(['jsonl', 'csv']), default=None)
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='Record file, default stdout')
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), default=None,
              help='key = value sweep file')
@click.option('--quiet', is_flag=True, help='No progress bar')
@exit_codes
def verify_command(theorems, p, pmin, pmax, a, amax, c_values, t_values, d, budget, workers,
                   output_format, out, config_path, quiet):
    """Check every prediction against the recurrence and the brute-force oracle."""
    values = _sweep_values(config_path, theorems, p, pmin, pmax, a, amax, c_values, t_values, d,
                           budget, workers, output_format, out)
    config = SweepConfig(**values)
    logger.info(f"🚀 verify {', '.join(map(str, config.theorems))} over p in "
                f"{config.pmin}..{config.pmax}, a in {config.amin}..{config.amax}")

    if config.out:
        directory = os.path.dirname(config.out)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(config.out, 'w', encoding='utf-8', newline='') as handle:
            records = ReportWriter(handle, config.output_format).write_all(run_sweep(config, not quiet))
        logger.info(f"Records saved to {config.out}")
        click.echo(render_summary(records))
    else:
        writer = ReportWriter(click.get_text_stream('stdout'), config.output_format)
        records = writer.write_all(run_sweep(config, not quiet))
        click.echo(render_summary(records), err=True)

    mismatches = [r for r in records if r.mismatch]
    if mismatches:
        click.echo(f"❌ {len(mismatches)} mismatching rows", err=True)
        sys.exit(EXIT_MISMATCH)
    click.echo(f"✅ {len(records)} rows, no mismatches", err=True)


@cli.command('classify')
@click.option('--c', 'c', type=str, required=True, help='Rational c')
@click.option('--p', 'p', type=int, required=True, help='Prime p != 3')
@click.option('--a', 'a', type=int, default=1, show_default=True)
@exit_codes
def classify_command(c, p, a):
    """Print the cubic class of c modulo p^a."""
    pp = PrimePowerModulus(p, a)
    c_num, c_den = parse_rational(c)
    cls = classify(c_num, c_den, pp)
    click.echo(str(cls))
    if a == 1 and p > 3 and cls is not CubicClass.UNDEFINED:
        try:
            in_c0 = sun_c0_criterion(c_num, c_den, p)
        except DegenerateC as e:
            click.echo(f"criterion: n/a ({e})")
            return
        agrees = in_c0 == (cls is CubicClass.C0)
        click.echo(f"criterion: {'C0' if in_c0 else 'not C0'} {'✅ agrees' if agrees else '❌ disagrees'}")


@cli.command('scan')
@click.option('--h', 'h', type=int, required=True)
@click.option('--m', 'm_values', type=str, multiple=True, required=True, help='Rational m (repeatable)')
@click.option('--pmin', type=int, default=5, show_default=True)
@click.option('--pmax', type=int, default=200, show_default=True)
@click.option('--a', 'a', type=int, default=1, show_default=True)
@click.option('--d', 'd', type=int, default=0, show_default=True)
@exit_codes
def scan_command(h, m_values, pmin, pmax, a, d):
    """Look for m whose sums are constant or keyed by p^a mod a small modulus."""
    primes = [int(q) for q in primerange(pmin, pmax + 1)]
    if not primes:
        raise click.UsageError(f"no primes in {pmin}..{pmax}")
    m_list = [item.strip() for value in m_values for item in value.split(',') if item.strip()]
    results = scan(h, m_list, primes, d=d, a=a)
    click.echo(render_scan(results))


if __name__ == '__main__':
    cli()
