# qgeokit/summarizer.py
from typing import Any, Dict, List


def summarize_records(records: List[dict]) -> Dict[str, Any]:
    failed = [r["name"] for r in records if not r["passed"]]
    return {
        "total": len(records),
        "passed": len(records) - len(failed),
        "failed": len(failed),
        # an empty suite checked nothing
        "ok": bool(records) and not failed,
        "failed_names": failed,
    }


def build_report(command: str, seed: int, alpha: float, records: List[dict]) -> Dict[str, Any]:
    ordered = sorted(records, key=lambda r: r["name"])
    return {
        "command": command,
        "seed": seed,
        "alpha": alpha,
        "records": ordered,
        "summary": summarize_records(ordered),
    }
