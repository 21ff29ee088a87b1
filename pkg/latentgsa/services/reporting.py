"""
Report files: index tables, metadata sidecars, sweep tables and the summary.

Nothing written here depends on wall time, so identical runs give identical
bytes. Timings go to their own file.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import pandas as pd

from latentgsa.models.schemas import (
    AUCSummary,
    ErrorRecord,
    ReportSidecar,
    SensitivityReport,
    WideningTest,
)

FLOAT_FORMAT = "%.10g"
METHOD_ORDER = ("sobol_independent", "sobol_grouped", "kucherenko", "latent")

ReferenceFn = Callable[[str, str, float], Optional[dict]]


def run_stem(model: str, method: str, rho: Optional[float]) -> str:
    if rho is None:
        return f"{model}_{method}"
    return f"{model}_{method}_rho{rho:+.2f}"


def _write_csv(df: pd.DataFrame, path: Path) -> Path:
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def _write_json(payload, path: Path) -> Path:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def indices_frame(report: SensitivityReport) -> pd.DataFrame:
    rows = []
    for fi in report.indices:
        main_ci = fi.main_ci or (math.nan, math.nan)
        total_ci = fi.total_ci or (math.nan, math.nan)
        rows.append({
            "factor": fi.factor,
            "main": fi.main,
            "main_lo": main_ci[0],
            "main_hi": main_ci[1],
            "total": fi.total,
            "total_lo": total_ci[0],
            "total_hi": total_ci[1],
        })
    return pd.DataFrame(rows)


def write_report(report: SensitivityReport, out_dir: Path) -> list[Path]:
    """Index CSV, JSON sidecar and, when present, the convergence CSV."""
    meta = report.metadata
    stem = run_stem(meta.model, meta.method, meta.rho)
    written = [_write_csv(indices_frame(report), out_dir / f"{stem}.csv")]

    sidecar = ReportSidecar.from_report(report).model_dump(mode="json")
    written.append(_write_json(sidecar, out_dir / f"{stem}.json"))

    if report.convergence:
        conv = pd.DataFrame([p.model_dump() for p in report.convergence])
        written.append(_write_csv(conv, out_dir / f"{stem}_convergence.csv"))
    return written


def write_error(record: ErrorRecord, out_dir: Path) -> Path:
    stem = run_stem(record.model, record.method, record.rho)
    return _write_json(record.model_dump(mode="json"), out_dir / f"{stem}_error.json")


def sweep_frame(reports: Iterable[SensitivityReport]) -> pd.DataFrame:
    """One row per (rho, method, factor, index)."""
    rows = []
    for r in reports:
        for fi in r.indices:
            for index, value, ci in (("main", fi.main, fi.main_ci), ("total", fi.total, fi.total_ci)):
                lo, hi = ci or (math.nan, math.nan)
                rows.append({
                    "rho": r.metadata.rho if r.metadata.rho is not None else math.nan,
                    "method": r.metadata.method,
                    "factor": fi.factor,
                    "index": index,
                    "value": value,
                    "lo": lo,
                    "hi": hi,
                })
    return pd.DataFrame(rows, columns=["rho", "method", "factor", "index", "value", "lo", "hi"])


def write_sweep(reports: Sequence[SensitivityReport], model: str, out_dir: Path) -> Path:
    return _write_csv(sweep_frame(reports), out_dir / f"{model}_sweep.csv")


SCHEMAS = {
    "report": ReportSidecar,
    "error": ErrorRecord,
    "widening": WideningTest,
}


def write_schema(out_dir: Path) -> Path:
    """JSON schema of every JSON file this module writes, keyed by kind."""
    schema = {kind: model.model_json_schema() for kind, model in SCHEMAS.items()}
    return _write_json(schema, out_dir / "report.schema.json")


def write_timings(timings: dict[str, float], out_dir: Path) -> Path:
    return _write_json({k: round(v, 3) for k, v in timings.items()}, out_dir / "timings.json")


def _cell(value: float, ci) -> str:
    if ci is None:
        return f"{value:.3f}"
    return f"{value:.3f} ({ci[0]:.3f}, {ci[1]:.3f})"


def _table(header: list[str], rows: list[list[str]]) -> list[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines.extend("| " + " | ".join(r) + " |" for r in rows)
    return lines


def _section(reports: list[SensitivityReport], reference: Optional[ReferenceFn]) -> list[str]:
    reports = sorted(reports, key=lambda r: METHOD_ORDER.index(r.metadata.method))
    factors: list[str] = []
    for r in reports:
        factors.extend(f for f in r.metadata.factors if f not in factors)

    header = ["factor"]
    for r in reports:
        header += [f"{r.metadata.method} S", f"{r.metadata.method} ST"]

    rows = []
    for f in factors:
        row = [f]
        for r in reports:
            fi = r.by_factor().get(f)
            row += [_cell(fi.main, fi.main_ci), _cell(fi.total, fi.total_ci)] if fi else ["", ""]
        rows.append(row)
    lines = _table(header, rows)

    if reference is not None:
        refs = [(r.metadata.method, reference(r.metadata.model, r.metadata.method, r.metadata.rho or 0.0))
                for r in reports]
        refs = [(m, ref) for m, ref in refs if ref]
        if refs:
            ref_rows = []
            for f in factors:
                row = [f]
                for _, ref in refs:
                    main, total = ref.get(f, (None, None))
                    row += ["" if main is None else f"{main:.3f}", "" if total is None else f"{total:.3f}"]
                ref_rows.append(row)
            ref_header = ["factor"]
            for m, _ in refs:
                ref_header += [f"{m} S ref", f"{m} ST ref"]
            lines += ["", "Analytic reference:", ""] + _table(ref_header, ref_rows)
    return lines


def write_summary(
    reports: Sequence[SensitivityReport],
    out_dir: Path,
    reference: Optional[ReferenceFn] = None,
) -> Path:
    """
    Markdown summary: one table per (model, rho), methods as column pairs.

    Bootstrap percentiles are shown in brackets. Runs without a correlation
    (independent Sobol) appear in every rho section of their model.
    """
    by_key: dict[tuple[str, Optional[float]], list[SensitivityReport]] = {}
    uncorrelated: dict[str, list[SensitivityReport]] = {}
    for r in reports:
        if r.metadata.rho is None:
            uncorrelated.setdefault(r.metadata.model, []).append(r)
        else:
            by_key.setdefault((r.metadata.model, r.metadata.rho), []).append(r)
    for model, rs in uncorrelated.items():
        if not any(m == model for m, _ in by_key):
            by_key[(model, None)] = []

    lines = ["# Sensitivity indices", ""]
    for (model, rho) in sorted(by_key, key=lambda k: (k[0], -math.inf if k[1] is None else k[1])):
        section = by_key[(model, rho)] + uncorrelated.get(model, [])
        n = section[0].metadata.n
        title = f"## {model}" + ("" if rho is None else f", rho = {rho:g}")
        lines += [title, "", f"n = {n}", ""]
        lines += _section(section, reference)
        lines.append("")
    path = out_dir / "summary.md"
    path.write_text("\n".join(lines))
    return path


# --------------------------------------------------
# Population
# --------------------------------------------------
def write_population_auc(frame: pd.DataFrame, out_dir: Path) -> Path:
    return _write_csv(frame, out_dir / "population_auc.csv")


def write_bands(bands: pd.DataFrame, mode: str, out_dir: Path) -> Path:
    return _write_csv(bands, out_dir / f"population_bands_{mode}.csv")


def write_profiles(profiles: pd.DataFrame, mode: str, out_dir: Path) -> Path:
    return _write_csv(profiles, out_dir / f"population_profiles_{mode}.csv")


def write_auc_summary(summaries: Sequence[AUCSummary], out_dir: Path) -> Path:
    return _write_csv(pd.DataFrame([s.model_dump() for s in summaries]), out_dir / "auc_summary.csv")


def write_widening(test: WideningTest, out_dir: Path) -> Path:
    return _write_json(test.model_dump(mode="json"), out_dir / "widening_test.json")
