"""
Saturable Battery Simulator - Sweep Execution

Runs one point function over every parameter point of a RunConfig. Points are
independent: they go to a process pool, a failing point is logged and recorded without
stopping the others, and results come back to the caller (the single writer) in
sweep order.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from core.errors import BatteryError

logger = logging.getLogger(__name__)

PointFunction = Callable[..., Any]


@dataclass
class PointOutcome:
    index: int
    coords: Dict[str, Any]
    value: Any = None
    error: Optional[str] = None
    error_type: Optional[str] = None
    exit_code: int = 0

    @property
    def ok(self) -> bool:
        return self.error is None

    def failure_record(self) -> Dict[str, Any]:
        return {"point": self.coords, "error": self.error, "error_type": self.error_type}


@dataclass
class SweepResult:
    outcomes: List[PointOutcome] = field(default_factory=list)

    @property
    def succeeded(self) -> List[PointOutcome]:
        return [o for o in self.outcomes if o.ok]

    @property
    def failed(self) -> List[PointOutcome]:
        return [o for o in self.outcomes if not o.ok]

    @property
    def exit_code(self) -> int:
        """0 if all points ran, 3 if some failed, else the code of the first failure."""
        if not self.failed:
            return 0
        if self.succeeded:
            return 3
        return self.failed[0].exit_code


def _run_point(task: Tuple[int, Dict[str, Any], PointFunction, Any, tuple]) -> PointOutcome:
    index, coords, fn, payload, args = task
    try:
        return PointOutcome(index=index, coords=coords, value=fn(payload, *args))
    except BatteryError as e:
        logger.error(f"Sweep point {coords} failed: {e}", exc_info=True)
        return PointOutcome(index=index, coords=coords, error=str(e),
                            error_type=type(e).__name__, exit_code=e.exit_code)
    except Exception as e:
        # unexpected failures count as numerical ones for this point only
        logger.error(f"Sweep point {coords} failed unexpectedly: {e}", exc_info=True)
        return PointOutcome(index=index, coords=coords, error=str(e),
                            error_type=type(e).__name__, exit_code=BatteryError.exit_code)


def run_sweep(
    fn: PointFunction,
    points: Sequence[Tuple[Dict[str, Any], Any]],
    args: tuple = (),
    jobs: int = 1,
) -> SweepResult:
    """Evaluate fn(payload, *args) on every (coords, payload) point.

    fn must be a module-level function so that it can be sent to worker processes.
    With jobs == 1 or a single point everything runs in the calling process.
    """
    tasks = [(i, coords, fn, payload, args) for i, (coords, payload) in enumerate(points)]
    logger.info(f"🔄 Sweep of {len(tasks)} point(s) with {fn.__name__} on {min(jobs, len(tasks)) or 1} worker(s)")

    if jobs <= 1 or len(tasks) <= 1:
        outcomes = [_run_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            outcomes = list(executor.map(_run_point, tasks))

    result = SweepResult(outcomes=sorted(outcomes, key=lambda o: o.index))
    if result.failed:
        logger.warning(f"⚠️ {len(result.failed)} of {len(tasks)} sweep point(s) failed")
    else:
        logger.info(f"✅ Sweep finished: {len(tasks)} point(s)")
    return result
