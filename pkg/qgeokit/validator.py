# qgeokit/validator.py
# Check records: one measured residual against one tolerance, with pass/fail rules.
import math
from typing import Optional, Tuple


def validate_record(rec: dict) -> Tuple[bool, str]:
    r = rec.get("residual")
    if r is None or not math.isfinite(r):
        return False, "RESIDUAL: not a finite number"
    tol = rec["tolerance"]
    if rec.get("bound", "upper") == "lower":
        if not r > tol:
            return False, f"BELOW_BOUND: {r:.3e} <= {tol:.3e}"
        return True, "OK"
    if r > tol:
        return False, f"ABOVE_TOLERANCE: {r:.3e} > {tol:.3e}"
    low = rec.get("low")
    if low is not None and r < low:
        return False, f"BELOW_INTERVAL: {r:.3e} < {low:.3e}"
    return True, "OK"


def make_record(name: str, tag: str, residual: Optional[float], tolerance: float, bound: str = "upper",
                low: Optional[float] = None, detail: Optional[str] = None) -> dict:
    """A report record; "upper" passes when residual <= tolerance, "lower" when residual > tolerance."""
    rec = {
        "name": name,
        "tag": tag,
        "residual": None if residual is None else float(residual),
        "tolerance": float(tolerance),
        "bound": bound,
        "low": low,
    }
    ok, msg = validate_record(rec)
    rec["passed"] = ok
    if ok:
        rec["detail"] = detail
    else:
        rec["detail"] = f"{msg}; {detail}" if detail else msg
    return rec


def crash_record(name: str, err: BaseException) -> dict:
    return {
        "name": name,
        "tag": "crash",
        "residual": None,
        "tolerance": 0.0,
        "bound": "upper",
        "low": None,
        "passed": False,
        "detail": f"{type(err).__name__}: {err}",
    }
