"""
Verification Report
===================
Every check gets a record. Every record gets a status. Exit code follows.
"""

import asyncio
import json
import logging
import time
from dataclasses import dataclass, asdict, field
from typing import Callable, Dict, List, Optional, Sequence, Union

logger = logging.getLogger(__name__)

PASS = 'pass'
PASS_MOD_CONSTRAINT = 'pass-mod-constraint'
FAIL = 'fail'
MEASURED = 'measured'
STATUSES = (PASS, PASS_MOD_CONSTRAINT, FAIL, MEASURED)


@dataclass
class CheckRecord:
    id: str
    ref: str
    status: str
    residual: Optional[str] = None
    measured: Optional[str] = None
    model: Optional[str] = None
    mode: Optional[str] = None
    ms: float = 0.0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status '{self.status}'")

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def to_dict(self) -> Dict:
        data = asdict(self)
        return {key: value for key, value in data.items() if value is not None}


def passed(holds: bool, needed_reduction: bool = False) -> str:
    if not holds:
        return FAIL
    return PASS_MOD_CONSTRAINT if needed_reduction else PASS


@dataclass
class VerificationReport:
    suite: str
    checks: List[CheckRecord] = field(default_factory=list)

    def add(self, record: CheckRecord) -> CheckRecord:
        if any(existing.id == record.id for existing in self.checks):
            raise ValueError(f"duplicate check id '{record.id}'")
        self.checks.append(record)
        logger.debug("%s: %s -> %s", self.suite, record.id, record.status)
        return record

    def extend(self, records: Sequence[CheckRecord]):
        for record in records:
            self.add(record)

    def merge(self, other: 'VerificationReport'):
        """Fold another suite in, its name prefixed to ids that lack it"""
        prefix = f"{other.suite}/"
        for record in other.checks:
            check_id = record.id if record.id.startswith(prefix) else prefix + record.id
            self.add(CheckRecord(**{**asdict(record), 'id': check_id}))

    @property
    def failures(self) -> List[CheckRecord]:
        return [record for record in self.checks if record.failed]

    @property
    def exit_code(self) -> int:
        return 1 if self.failures else 0

    def counts(self) -> Dict[str, int]:
        return {status: sum(1 for r in self.checks if r.status == status) for status in STATUSES}

    def to_json(self) -> str:
        data = {'suite': self.suite, 'checks': [record.to_dict() for record in self.checks]}
        return json.dumps(data, indent=2) + '\n'

    @classmethod
    def from_json(cls, text: str) -> 'VerificationReport':
        data = json.loads(text)
        return cls(data['suite'], [CheckRecord(**record) for record in data['checks']])

    def save(self, path: str):
        with open(path, 'w') as f:
            f.write(self.to_json())
        logger.info("report written to %s", path)


CheckFn = Callable[[], Union[CheckRecord, List[CheckRecord]]]


def timed(check: CheckFn) -> List[CheckRecord]:
    """Run one check or battery, stamping the wall time on every record it yields"""
    start = time.perf_counter()
    result = check()
    records = result if isinstance(result, list) else [result]
    elapsed = round((time.perf_counter() - start) * 1000.0, 3)
    for record in records:
        record.ms = elapsed
    return records


async def _gather_checks(checks: Sequence[CheckFn], workers: int) -> List[List[CheckRecord]]:
    semaphore = asyncio.Semaphore(workers)

    async def run(check: CheckFn) -> List[CheckRecord]:
        async with semaphore:
            return await asyncio.to_thread(timed, check)

    tasks = [run(check) for check in checks]
    return list(await asyncio.gather(*tasks))


def run_checks(checks: Sequence[CheckFn], workers: int = 0) -> List[CheckRecord]:
    """Evaluate checks, in threads when workers > 0; order follows input"""
    if workers <= 0 or len(checks) < 2:
        batches = [timed(check) for check in checks]
    else:
        batches = asyncio.run(_gather_checks(checks, workers))
    return [record for batch in batches for record in batch]
