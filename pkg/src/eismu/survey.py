"""Survey over prime levels N = 1 mod p with a resumable JSON-lines cache."""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass
from pathlib import Path

from .arith import SetupParams, primes_congruent_to_one
from .criteria import full_report
from .errors import CacheCorruptError, ValidationError
from .modsym import Undetermined, class_count, localize_level, modsym_precision, mu_sum_from_block

CACHE_ENV = "EISMU_CACHE_DIR"
ROW_FIELDS = ("N", "p", "k0", "principal", "up_gen", "merel_ok", "rank", "class_count",
              "mu_sum_w2", "wall_time_ms")
OUTPUT_FIELDS = ROW_FIELDS[:-1]


@dataclass(frozen=True)
class SurveyRow:
    N: int
    p: int
    k0: int
    principal: bool
    up_gen: bool
    merel_ok: bool
    rank: int | None
    class_count: int | str | None
    mu_sum_w2: int | None
    wall_time_ms: int

    def __post_init__(self):
        if self.rank is not None and self.rank < 1:
            raise ValidationError(f"N={self.N}: rank {self.rank} contradicts the existence of a congruent cusp form")
        if self.mu_sum_w2 is not None and not self.up_gen:
            raise ValidationError(f"N={self.N}: weight-2 mu-sum reported without U_p - 1 generation")

    @property
    def key(self):
        return (self.N, self.p, self.k0)

    def to_json(self, with_time=True) -> dict:
        d = asdict(self)
        if not with_time:
            d.pop("wall_time_ms")
        return d

    @classmethod
    def from_json(cls, d: dict) -> "SurveyRow":
        missing = [f for f in ROW_FIELDS if f not in d]
        if missing:
            raise ValueError(f"missing fields {missing}")
        return cls(**{f: d[f] for f in ROW_FIELDS})


def compute_row(N: int, p: int, k0: int, with_rank: bool, M: int | None = None) -> SurveyRow:
    start = time.perf_counter()
    params = SetupParams(N, p, k0)
    report = full_report(params)
    rank = count = mu = None
    if with_rank:
        data = localize_level(params, M)
        rank = data.dimension
        cc = class_count(data)
        count = "undetermined" if cc is Undetermined else cc
        if report.up_minus_one_generates:
            mu = mu_sum_from_block(data)
    elapsed = int(round(1000 * (time.perf_counter() - start)))
    return SurveyRow(N, p, k0, report.principal, report.up_minus_one_generates, report.merel_ok,
                     rank, count, mu, elapsed)


def _compute_row_args(args):
    return compute_row(*args)


def default_cache_path(p: int, k0: int) -> Path:
    base = os.environ.get(CACHE_ENV)
    root = Path(base) if base else Path.home() / ".cache" / "eismu"
    return root / f"survey_p{p}_k{k0}.jsonl"


def load_cache(path) -> dict:
    """Rows keyed by (N, p, k0); later lines win.

    A final line without a newline is an interrupted append and is cut off;
    any other unparsable line is fatal.
    """
    path = Path(path)
    if not path.exists():
        return {}
    raw = path.read_bytes()
    lines = raw.split(b"\n")
    rows = {}
    truncate_at = None
    offset = 0
    for number, line in enumerate(lines, start=1):
        is_last = number == len(lines)
        if is_last and not line:
            break
        try:
            row = SurveyRow.from_json(json.loads(line.decode("utf-8")))
        except (ValueError, TypeError, UnicodeDecodeError) as exc:
            if is_last:
                truncate_at = offset
                break
            raise CacheCorruptError(str(path), number, exc) from None
        rows[row.key] = row
        offset += len(line) + 1
    if truncate_at is not None:
        with open(path, "r+b") as fh:
            fh.truncate(truncate_at)
    return rows


def append_row(fh, row: SurveyRow) -> None:
    fh.write(json.dumps(row.to_json(), sort_keys=True) + "\n")
    fh.flush()
    os.fsync(fh.fileno())


def run_survey(p: int, k0: int, max_N: int, with_rank: bool = False, jobs: int = 1,
               cache_path=None, M: int | None = None, progress=None) -> list:
    """All rows for primes N < max_N with N = 1 mod p, sorted by N."""
    if with_rank and k0 != 2:
        raise ValidationError("rank computations use weight-2 symbols and need k0 = 2")
    if M is None:
        M = modsym_precision(p)
    levels = primes_congruent_to_one(p, max_N)
    done = load_cache(cache_path) if cache_path else {}

    def usable(row):
        return row is not None and (row.rank is not None or not with_rank)

    todo = [N for N in levels if not usable(done.get((N, p, k0)))]
    fh = None
    if cache_path:
        Path(cache_path).parent.mkdir(parents=True, exist_ok=True)
        fh = open(cache_path, "a", encoding="utf-8")
    try:
        if jobs <= 1 or len(todo) <= 1:
            for N in todo:
                row = compute_row(N, p, k0, with_rank, M)
                done[row.key] = row
                if fh:
                    append_row(fh, row)
                if progress:
                    progress(row)
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                # largest levels first so the slow ones do not straggle
                futures = [pool.submit(_compute_row_args, (N, p, k0, with_rank, M))
                           for N in sorted(todo, reverse=True)]
                for fut in as_completed(futures):
                    row = fut.result()
                    done[row.key] = row
                    if fh:
                        append_row(fh, row)
                    if progress:
                        progress(row)
    finally:
        if fh:
            fh.close()
    return [done[(N, p, k0)] for N in levels]


def summarize(rows) -> dict:
    ranked = [r for r in rows if r.rank is not None]
    return {
        "levels": len(rows),
        "principal": sum(r.principal for r in rows),
        "up_gen": sum(r.up_gen for r in rows),
        "merel_ok": sum(r.merel_ok for r in rows),
        "ranked": len(ranked),
        "rank_gt_1": sum(r.rank > 1 for r in ranked),
        "multi_class": sum(isinstance(r.class_count, int) and r.class_count > 1 for r in ranked),
        "undetermined": sum(r.class_count == "undetermined" for r in ranked),
    }


def render(rows, fmt: str = "jsonl") -> str:
    """Deterministic rendering: rows sorted by N, timings omitted."""
    rows = sorted(rows, key=lambda r: r.key)
    if fmt == "jsonl":
        return "".join(json.dumps(r.to_json(with_time=False), sort_keys=True) + "\n" for r in rows)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=OUTPUT_FIELDS, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: ("" if v is None else v) for k, v in r.to_json(with_time=False).items()})
        return buf.getvalue()
    raise ValidationError(f"unknown format {fmt!r}")
