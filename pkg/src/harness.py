"""
Verification Harness
Sweeps predictor vs recurrence vs brute force over (theorem, p, a) grids,
writes JSONL/CSV verdicts and scans m values for class-keyed behaviour
"""

import json
import logging
import time
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from math import gcd
from typing import Any, Dict, Iterable, Iterator, List, Literal, Optional, Sequence, TextIO, Tuple, Union

import pandas as pd
from colorama import Fore, Style
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from sympy import integer_nthroot, primerange
from sympy.ntheory.modular import crt
from tabulate import tabulate
from tqdm import tqdm

from config.advanced_settings import FEATURES, oracle_config, scan_config, sweep_defaults
from src.exceptions import ConfigFileError
from src.linrec import RecurrenceSpec, sum_fast
from src.modarith import PrimePowerModulus, parse_rational
from src.polyfield import PolyFp, catalan_characteristic, count_roots, discriminant
from src.theorems import THEOREM_PARAMS, Prediction, TheoremId, predict

logger = logging.getLogger(__name__)


@dataclass
class CongruenceRecord:
    """One verdict row: a prediction checked against the fast and brute-force routes"""
    theorem: str
    p: int
    a: int
    params: str  # JSON object, sorted keys
    label: str
    predicted: Optional[str] = None
    fast: Optional[str] = None
    oracle: Optional[str] = None
    match_pf: Optional[bool] = None
    match_po: Optional[bool] = None
    applicable: bool = True
    reason: str = ''
    note: str = ''
    oracle_skipped: str = ''
    elapsed_ms_predict: Optional[float] = None
    elapsed_ms_fast: Optional[float] = None
    elapsed_ms_oracle: Optional[float] = None

    @property
    def mismatch(self) -> bool:
        return self.match_pf is False or self.match_po is False

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


RECORD_FIELDS = [f.name for f in fields(CongruenceRecord)]
TIMING_FIELDS = ('elapsed_ms_predict', 'elapsed_ms_fast', 'elapsed_ms_oracle')


def _default_theorems() -> List[TheoremId]:
    return [t for t in TheoremId if t is not TheoremId.R5_1 or FEATURES['remark_quartic_rows']]


def _split(value: str) -> List[str]:
    return [item.strip() for item in str(value).split(',') if item.strip()]


def _int_range(text: str) -> Tuple[int, int]:
    lo, _, hi = text.partition(':')
    return int(lo), int(hi or lo)


def parse_d_values(value: Union[str, Sequence, None]) -> Optional[Union[str, List[int]]]:
    """'all', a comma list such as '0,1,-1' or an inclusive range 'lo:hi'"""
    if value is None or isinstance(value, list):
        return value
    text = str(value).strip()
    if text.lower() == 'all':
        return 'all'
    values: List[int] = []
    for item in _split(text):
        if ':' in item:
            lo, hi = _int_range(item)
            values.extend(range(lo, hi + 1))
        else:
            values.append(int(item))
    return values


class SweepConfig(BaseModel):
    """Validated sweep configuration; any violation surfaces as a pydantic ValidationError"""
    model_config = ConfigDict(extra='forbid')

    theorems: List[TheoremId] = Field(default_factory=_default_theorems, min_length=1)
    pmin: int = Field(default=sweep_defaults.pmin, ge=2)
    pmax: int = sweep_defaults.pmax
    amin: int = Field(default=sweep_defaults.amin, ge=1)
    amax: int = sweep_defaults.amax
    c_values: List[str] = Field(default_factory=lambda: list(sweep_defaults.c_values), min_length=1)
    t_values: List[int] = Field(default_factory=lambda: list(sweep_defaults.t_values), min_length=1)
    d_values: Optional[Union[Literal['all'], List[int]]] = None
    budget: int = Field(default=oracle_config.budget, ge=1)
    workers: int = Field(default_factory=lambda: sweep_defaults.workers, ge=1)
    output_format: Literal['jsonl', 'csv'] = sweep_defaults.output_format
    out: Optional[str] = None

    @field_validator('theorems', mode='before')
    @classmethod
    def _parse_theorems(cls, value):
        items = _split(value) if isinstance(value, str) else list(value)
        return [TheoremId.parse(item) for item in items]

    @field_validator('c_values', 't_values', mode='before')
    @classmethod
    def _parse_lists(cls, value):
        return _split(value) if isinstance(value, str) else [str(v) for v in value]

    @field_validator('c_values')
    @classmethod
    def _check_rationals(cls, value: List[str]) -> List[str]:
        for item in value:
            parse_rational(item)
        return value

    @field_validator('d_values', mode='before')
    @classmethod
    def _parse_d(cls, value):
        return parse_d_values(value)

    @model_validator(mode='after')
    def _check_ranges(self) -> 'SweepConfig':
        if self.pmin > self.pmax:
            raise ValueError(f"empty prime range {self.pmin}..{self.pmax}")
        if self.amin > self.amax:
            raise ValueError(f"empty exponent range {self.amin}..{self.amax}")
        if not self.primes:
            raise ValueError(f"no primes in {self.pmin}..{self.pmax}")
        return self

    @property
    def primes(self) -> List[int]:
        return [int(p) for p in primerange(self.pmin, self.pmax + 1)]

    @property
    def exponents(self) -> List[int]:
        return list(range(self.amin, self.amax + 1))


# config-file key -> SweepConfig field(s)
_CONFIG_ALIASES = {
    'theorem': 'theorems',
    'c': 'c_values',
    't': 't_values',
    'd': 'd_values',
    'format': 'output_format',
}


def load_config_file(path: str) -> Dict[str, Any]:
    """
    Read `key = value` lines (# starts a comment) into SweepConfig field values.

    p and a accept inclusive ranges lo:hi; list values are comma separated.
    """
    values: Dict[str, Any] = {}
    with open(path, 'r', encoding='utf-8') as handle:
        for number, raw in enumerate(handle, 1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition('=')
            if not sep:
                raise ConfigFileError(f"{path}:{number}: expected key = value, got {raw.strip()!r}")
            key, value = key.strip().lower(), value.strip()
            if key in ('p', 'a'):
                try:
                    lo, hi = _int_range(value)
                except ValueError:
                    raise ConfigFileError(f"{path}:{number}: bad range {value!r}") from None
                values[f"{key}min"], values[f"{key}max"] = lo, hi
            else:
                values[_CONFIG_ALIASES.get(key, key)] = value
    logger.debug(f"Loaded {len(values)} settings from {path}")
    return values


def _json_param(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple, range)):
        return [_json_param(v) for v in value]
    return value


def params_text(params: Dict[str, Any]) -> str:
    return json.dumps({k: _json_param(v) for k, v in params.items()}, sort_keys=True)


def _ms(start: float) -> float:
    return round((time.perf_counter() - start) * 1000, 3)


def check_prediction(prediction: Prediction, pp: PrimePowerModulus, budget: int,
                     predict_ms: Optional[float] = None, workers: int = 1) -> CongruenceRecord:
    """Run the fast and (budget permitting) brute-force routes against one prediction"""
    record = CongruenceRecord(
        theorem=str(prediction.theorem), p=pp.p, a=pp.a, params=params_text(prediction.params),
        label=prediction.label, applicable=prediction.applicable, reason=prediction.reason,
        note=prediction.note, elapsed_ms_predict=predict_ms,
    )
    if not prediction.applicable:
        return record
    target = prediction.target
    record.predicted = str(prediction.value)

    start = time.perf_counter()
    fast = target.fast(pp)
    record.elapsed_ms_fast = _ms(start)
    record.fast = str(fast)
    record.match_pf = prediction.matches(fast)

    cost = target.cost(pp)
    if cost > budget:
        record.oracle_skipped = f"{cost} terms exceed budget {budget}"
        return record
    start = time.perf_counter()
    oracle = target.direct(pp, budget, workers)
    record.elapsed_ms_oracle = _ms(start)
    record.oracle = str(oracle)
    record.match_po = prediction.matches(oracle)
    return record


def evaluate_cell(theorem: TheoremId, p: int, a: int, params: Dict[str, Any],
                  budget: int, workers: int = 1) -> List[CongruenceRecord]:
    """All records of one (theorem, p, a, params) cell, in prediction order"""
    pp = PrimePowerModulus(p, a)
    start = time.perf_counter()
    predictions = predict(theorem, pp, params)
    share = round(_ms(start) / max(len(predictions), 1), 3)
    return [check_prediction(prediction, pp, budget, share, workers) for prediction in predictions]


Cell = Tuple[TheoremId, int, int, Dict[str, Any]]


class SweepRunner:
    """Orchestrates a sweep: builds the cell grid, fans cells out, yields records in grid order"""

    def __init__(self, config: SweepConfig, progress: bool = True):
        self.config = config
        self.progress = progress
        self.logger = logging.getLogger(__name__)

    def param_grid(self, theorem: TheoremId) -> List[Dict[str, Any]]:
        names = THEOREM_PARAMS.get(theorem, ())
        base: Dict[str, Any] = {}
        if 'd' in names and self.config.d_values is not None:
            base['d'] = self.config.d_values
        if 'c' in names:
            ordered = sorted({Fraction(*parse_rational(c)) for c in self.config.c_values})
            return [{**base, 'c': c} for c in ordered]
        if 't' in names:
            return [{**base, 't': t} for t in sorted(set(self.config.t_values))]
        return [base]

    def cells(self) -> List[Cell]:
        grid = []
        for theorem in self.config.theorems:
            params_list = self.param_grid(theorem)
            for p in self.config.primes:
                for a in self.config.exponents:
                    for params in params_list:
                        grid.append((theorem, p, a, params))
        return grid

    def run(self) -> Iterator[CongruenceRecord]:
        cells = self.cells()
        budget = self.config.budget
        self.logger.info(f"Sweeping {len(cells)} cells with {self.config.workers} workers")
        if self.config.workers > 1 and len(cells) > 1:
            results = Parallel(n_jobs=self.config.workers, backend=oracle_config.backend,
                               return_as='generator')(
                delayed(evaluate_cell)(theorem, p, a, params, budget) for theorem, p, a, params in cells
            )
        else:
            # serial cells: the oracle stripes across the workers instead
            workers = self.config.workers
            results = (evaluate_cell(theorem, p, a, params, budget, workers)
                       for theorem, p, a, params in cells)
        progress = tqdm(results, total=len(cells), desc='cells', unit='cell', disable=not self.progress)
        for (theorem, p, a, params), records in zip(cells, progress):
            self._log_cell(theorem, p, a, params, records)
            yield from records

    def _log_cell(self, theorem, p, a, params, records: List[CongruenceRecord]):
        applicable = sum(r.applicable for r in records)
        self.logger.info(f"{theorem} p={p} a={a} {params_text(params)}: "
                         f"{applicable}/{len(records)} applicable")
        for record in records:
            if record.mismatch:
                self.logger.warning(f"Mismatch {record.theorem} p={p} a={a} {record.label}: "
                                    f"predicted {record.predicted}, fast {record.fast}, "
                                    f"oracle {record.oracle}")
            if record.oracle_skipped:
                self.logger.info(f"Oracle skipped for {record.label} at p={p} a={a}: {record.oracle_skipped}")
            self.logger.debug(f"{record.label}: predict {record.elapsed_ms_predict} ms, "
                              f"fast {record.elapsed_ms_fast} ms, oracle {record.elapsed_ms_oracle} ms")


def run_sweep(config: SweepConfig, progress: bool = True) -> Iterator[CongruenceRecord]:
    """Records for every cell, ordered by theorem, then p, then a, then params"""
    return SweepRunner(config, progress).run()


def records_frame(records: Sequence[CongruenceRecord]) -> pd.DataFrame:
    return pd.DataFrame([r.to_dict() for r in records], columns=RECORD_FIELDS)


class ReportWriter:
    """
    The single sink for sweep records.

    Batches are rendered through pandas: CSV keeps one fixed header, JSONL writes
    one object per record with residues as decimal strings.
    """

    def __init__(self, stream: TextIO, output_format: str = 'jsonl'):
        if output_format not in ('jsonl', 'csv'):
            raise ValueError(f"unsupported output format {output_format!r}")
        self.stream = stream
        self.output_format = output_format
        self.header_written = False
        self.count = 0
        self.logger = logging.getLogger(__name__)

    def write(self, records: Sequence[CongruenceRecord]):
        if not records:
            return
        frame = records_frame(records)
        if self.output_format == 'csv':
            text = frame.to_csv(index=False, header=not self.header_written, lineterminator='\n')
            self.header_written = True
        else:
            text = frame.to_json(orient='records', lines=True)
            text = text.rstrip('\n') + '\n'
        self.stream.write(text)
        self.stream.flush()
        self.count += len(records)

    def write_all(self, records: Iterable[CongruenceRecord], batch: int = 64) -> List[CongruenceRecord]:
        """Stream records in batches; returns everything written for the summary"""
        written: List[CongruenceRecord] = []
        pending: List[CongruenceRecord] = []
        for record in records:
            pending.append(record)
            if len(pending) >= batch:
                self.write(pending)
                written.extend(pending)
                pending = []
        self.write(pending)
        written.extend(pending)
        self.logger.info(f"Wrote {self.count} records as {self.output_format}")
        return written


def _verdict(failed: int, checked: int) -> str:
    if failed:
        return f"{Fore.RED}FAIL{Style.RESET_ALL}"
    if not checked:
        return f"{Fore.YELLOW}n/a{Style.RESET_ALL}"
    return f"{Fore.GREEN}PASS{Style.RESET_ALL}"


def summarize(records: Sequence[CongruenceRecord]) -> pd.DataFrame:
    """Per-theorem counts of applicable rows, route matches and skips"""
    frame = records_frame(records)
    if frame.empty:
        return pd.DataFrame(columns=['theorem', 'rows', 'applicable', 'fast_ok', 'oracle_ok',
                                     'mismatches', 'oracle_skipped'])
    frame['mismatch'] = (frame['match_pf'] == False) | (frame['match_po'] == False)  # noqa: E712
    grouped = frame.groupby('theorem', sort=False)
    return pd.DataFrame({
        'rows': grouped.size(),
        'applicable': grouped['applicable'].sum(),
        'fast_ok': grouped['match_pf'].apply(lambda s: int((s == True).sum())),  # noqa: E712
        'oracle_ok': grouped['match_po'].apply(lambda s: int((s == True).sum())),  # noqa: E712
        'mismatches': grouped['mismatch'].sum(),
        'oracle_skipped': grouped['oracle_skipped'].apply(lambda s: int((s != '').sum())),
    }).reset_index()


def render_summary(records: Sequence[CongruenceRecord]) -> str:
    summary = summarize(records)
    rows = []
    for row in summary.itertuples(index=False):
        checked = int(row.fast_ok) + int(row.mismatches)
        rows.append([row.theorem, int(row.rows), int(row.applicable), int(row.fast_ok),
                     int(row.oracle_ok), int(row.oracle_skipped), int(row.mismatches),
                     _verdict(int(row.mismatches), checked)])
    headers = ['theorem', 'rows', 'applicable', 'fast ok', 'oracle ok', 'oracle skipped',
               'mismatches', 'verdict']
    return tabulate(rows, headers=headers, tablefmt='github')


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------

def rational_reconstruction(residue: int, modulus: int, bound: int) -> Optional[Fraction]:
    """a/b = residue mod modulus with |a|, |b| <= bound, or None"""
    r0, r1 = modulus, residue % modulus
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or gcd(s1, modulus) != 1:
        return None
    value = Fraction(r1, s1)
    if value.numerator * pow(value.denominator, -1, modulus) % modulus != residue % modulus:
        return None
    return value


@dataclass
class ScanResult:
    """Values of one truncated sum across primes and the residue class key they follow, if any"""
    h: int
    m: str
    d: int
    a: int
    values: Dict[int, int] = field(default_factory=dict)  # p -> signed residue
    root_counts: Dict[int, int] = field(default_factory=dict)  # p -> roots of the characteristic
    excluded: List[int] = field(default_factory=list)
    key_modulus: Optional[int] = None
    class_values: Dict[int, str] = field(default_factory=dict)  # p^a mod key -> rational

    @property
    def flagged(self) -> bool:
        return self.key_modulus is not None


def bad_primes(h: int, m_num: int, m_den: int, primes: Iterable[int]) -> List[int]:
    """Primes dividing m's numerator or denominator or disc((1+x)^(h+1) - m x^h)"""
    disc = discriminant(catalan_characteristic(h, m_num, m_den))
    return [p for p in primes if m_num % p == 0 or m_den % p == 0 or (disc and disc % p == 0)]


def _reconstruct_class(pairs: List[Tuple[int, int]], cap: int) -> Optional[Fraction]:
    moduli = [p for p, _ in pairs]
    value, modulus = crt(moduli, [v % p for p, v in pairs])
    bound = min(cap, integer_nthroot(int(modulus) // 2, 3)[0])
    return rational_reconstruction(int(value), int(modulus), bound)


def find_key_modulus(values: Dict[int, int], a: int = 1,
                     max_modulus: Optional[int] = None,
                     cap: Optional[int] = None) -> Tuple[Optional[int], Dict[int, str]]:
    """
    Smallest q such that, grouping primes by p^a mod q, every group holds at least
    two primes and its residues lift by CRT to one small rational.
    """
    max_modulus = max_modulus or scan_config.max_key_modulus
    cap = cap or scan_config.height_cap
    for q in range(1, max_modulus + 1):
        groups: Dict[int, List[Tuple[int, int]]] = {}
        for p, v in values.items():
            groups.setdefault(pow(p, a, q) if q > 1 else 0, []).append((p, v))
        if not groups or any(len(pairs) < 2 for pairs in groups.values()):
            continue
        lifted = {key: _reconstruct_class(pairs, cap) for key, pairs in sorted(groups.items())}
        if all(v is not None for v in lifted.values()):
            return q, {key: str(v) for key, v in lifted.items()}
    return None, {}


def scan(h: int, m_values: Sequence[Union[str, Tuple[int, int]]], primes: Sequence[int],
         d: int = 0, a: int = 1) -> List[ScanResult]:
    """
    Evaluate sum_{k < p^a} binom((h+1)k, k+d)/m^k over the primes for each m and
    look for constant or class-keyed behaviour.
    """
    results = []
    for m in m_values:
        m_num, m_den = parse_rational(m) if isinstance(m, str) else m
        excluded = bad_primes(h, m_num, m_den, primes)
        characteristic = catalan_characteristic(h, m_num, m_den)
        result = ScanResult(h, str(Fraction(m_num, m_den)), d, a, excluded=excluded)
        for p in primes:
            if p in excluded:
                continue
            spec = RecurrenceSpec.build(h, m_num, m_den, p)
            result.values[p] = sum_fast(spec, d, a).signed()
            result.root_counts[p] = count_roots(PolyFp.from_ints(characteristic, p))
        result.key_modulus, result.class_values = find_key_modulus(result.values, a)
        logger.info(f"scan h={h} m={result.m} d={d}: key modulus {result.key_modulus}, "
                    f"{len(result.values)} primes, {len(excluded)} excluded")
        results.append(result)
    return results


def render_scan(results: Sequence[ScanResult]) -> str:
    rows = []
    for result in results:
        classes = ', '.join(f"{k}:{v}" for k, v in result.class_values.items())
        flag = f"{Fore.GREEN}flagged{Style.RESET_ALL}" if result.flagged else 'none'
        split = sum(1 for count in result.root_counts.values() if count == result.h + 1)
        rows.append([result.h, result.m, result.d, len(result.values), split, ' '.join(map(str, result.excluded)),
                     result.key_modulus or '-', classes or '-', flag])
    headers = ['h', 'm', 'd', 'primes', 'split', 'excluded', 'key mod', 'class values', 'pattern']
    return tabulate(rows, headers=headers, tablefmt='github')
