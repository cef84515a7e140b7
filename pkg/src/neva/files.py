"""File formats and result serialization.

JSON is the canonical input format for networks and scenarios; results are
emitted as CSV (fixed, documented columns) or JSON rows mirroring the same
fields.  Liability edges are oriented debtor -> creditor; the loader builds
the claim matrix as the transpose, so a file edge ``{"debtor": "B",
"creditor": "A"}`` makes bank A the lender.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .analysis import (DiscountComparison, LimitSeries, MonteCarloResult,
                       StressResult)
from .network import FinancialNetwork
from .solver import SolveConfig, SolveReport
from .valuation import (SpecError, ValuationSpec, debtrank_interbank,
                        en_interbank, exante_en_gbm_interbank,
                        exante_en_uniform_interbank, furfine_interbank,
                        rv_interbank)

__all__ = [
    "FileFormatError",
    "load_network",
    "network_to_dict",
    "dump_network",
    "Scenario",
    "load_scenario",
    "CurveTable",
    "evaluate_curves",
    "serialize_results",
    "write_output",
]

log = logging.getLogger("neva")

SCENARIO_KINDS = ("solve", "stress", "limit_maturity", "limit_beta", "curve",
                  "mc_global")


class FileFormatError(ValueError):
    """Raised for unparsable or schema-violating input files."""


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON at line {exc.lineno}, "
                              f"column {exc.colno}: {exc.msg}") from exc


def _require(mapping, key, context, types=None):
    if not isinstance(mapping, dict) or key not in mapping:
        raise FileFormatError(f"{context}: missing field {key!r}")
    value = mapping[key]
    if types is not None and not isinstance(value, types):
        raise FileFormatError(f"{context}.{key}: expected {types}, got {type(value).__name__}")
    return value


def _number(mapping, key, context) -> float:
    value = _require(mapping, key, context)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FileFormatError(f"{context}.{key}: expected a number, got {value!r}")
    return float(value)


def load_network(path) -> FinancialNetwork:
    """Read a network JSON file and return the validated network.

    Duplicate (debtor, creditor) edges are summed with a warning; negative
    amounts, self-loans and unknown bank ids are rejected with the offending
    entry named.
    """
    data = _load_json(path)
    banks = _require(data, "banks", str(path), list)
    if not banks:
        raise FileFormatError(f"{path}: banks list is empty")
    ids = []
    external_assets = []
    external_liabilities = []
    for k, bank in enumerate(banks):
        context = f"{path}: banks[{k}]"
        ids.append(str(_require(bank, "id", context)))
        external_assets.append(_number(bank, "external_assets", context))
        external_liabilities.append(_number(bank, "external_liabilities", context))
    if len(set(ids)) != len(ids):
        dupes = sorted({b for b in ids if ids.count(b) > 1})
        raise FileFormatError(f"{path}: duplicate bank ids {dupes}")
    index = {b: k for k, b in enumerate(ids)}
    n = len(ids)
    liabilities = np.zeros((n, n))
    seen = set()
    for k, edge in enumerate(data.get("liabilities", [])):
        context = f"{path}: liabilities[{k}]"
        debtor = str(_require(edge, "debtor", context))
        creditor = str(_require(edge, "creditor", context))
        amount = _number(edge, "amount", context)
        for bank in (debtor, creditor):
            if bank not in index:
                raise FileFormatError(f"{context}: unknown bank id {bank!r}")
        if debtor == creditor:
            raise FileFormatError(f"{context}: self-loan {debtor!r} -> {creditor!r}")
        if amount < 0 or not np.isfinite(amount):
            raise FileFormatError(
                f"{context}: edge {debtor!r} -> {creditor!r} has invalid amount {amount}")
        if (debtor, creditor) in seen:
            log.warning("%s: duplicate edge %s -> %s; amounts summed",
                        path, debtor, creditor)
        seen.add((debtor, creditor))
        liabilities[index[debtor], index[creditor]] += amount
    return FinancialNetwork(ids, external_assets, external_liabilities, liabilities)


def network_to_dict(net: FinancialNetwork) -> dict:
    banks = [
        {"id": bank, "external_assets": float(net.external_assets[k]),
         "external_liabilities": float(net.external_liabilities[k])}
        for k, bank in enumerate(net.bank_ids)
    ]
    edges = [
        {"debtor": net.bank_ids[i], "creditor": net.bank_ids[j],
         "amount": float(net.interbank_liabilities[i, j])}
        for i in range(net.n) for j in range(net.n)
        if net.interbank_liabilities[i, j] > 0
    ]
    return {"banks": banks, "liabilities": edges}


def dump_network(net: FinancialNetwork, path) -> None:
    write_output(json.dumps(network_to_dict(net), indent=2) + "\n", path)


def _parse_valuation(block, context) -> ValuationSpec:
    interbank = _require(block, "interbank", context, dict)
    kind = _require(interbank, "kind", f"{context}.interbank")
    external = block.get("external", {"kind": "unit"})
    if not isinstance(external, dict):
        raise FileFormatError(f"{context}.external: expected an object")
    ext_kind = external.get("kind", "unit")
    fields = {"interbank_kind": kind, "external_kind": ext_kind}
    if ext_kind == "rogers_veraart":
        fields["alpha"] = _number(external, "alpha", f"{context}.external")
    for name in ("beta", "recovery", "maturity"):
        if name in interbank:
            fields[name] = _number(interbank, name, f"{context}.interbank")
    if "sigma" in interbank:
        sigma = interbank["sigma"]
        fields["sigma"] = (tuple(float(s) for s in sigma)
                           if isinstance(sigma, list) else float(sigma))
    try:
        return ValuationSpec(**fields)
    except (SpecError, TypeError) as exc:
        raise FileFormatError(f"{context}: {exc}") from exc


def _parse_solver(block, context) -> SolveConfig:
    if block is None:
        return SolveConfig()
    fields = {}
    if "epsilon" in block:
        fields["epsilon"] = _number(block, "epsilon", context)
    if "max_iterations" in block:
        fields["max_iterations"] = int(_number(block, "max_iterations", context))
    if "start" in block:
        fields["start"] = _require(block, "start", context, str)
    try:
        return SolveConfig(**fields)
    except ValueError as exc:
        raise FileFormatError(f"{context}: {exc}") from exc


def _parse_grid(value, context) -> list:
    if isinstance(value, list):
        return [float(v) for v in value]
    if isinstance(value, dict):
        lo = _number(value, "min", context)
        hi = _number(value, "max", context)
        points = int(_number(value, "points", context))
        if points < 2 or hi <= lo:
            raise FileFormatError(f"{context}: need points >= 2 and max > min")
        return list(np.linspace(lo, hi, points))
    raise FileFormatError(f"{context}: expected a list or a min/max/points object")


CURVE_FAMILY_FIELDS = {
    "eisenberg_noe": ("obligations",),
    "rogers_veraart": ("beta", "obligations"),
    "furfine": ("recovery",),
    "linear_debtrank": ("book_equity",),
    "exante_en_gbm": ("external_assets", "sigma", "maturity", "obligations", "beta"),
    "exante_en_uniform": ("book_equity", "obligations", "beta"),
}


@dataclass(frozen=True)
class Scenario:
    """Parsed scenario file: a valuation spec (when the scenario uses one),
    solver controls, the scenario kind and its kind-specific parameters."""

    kind: str
    valuation: Optional[ValuationSpec]
    solver: SolveConfig
    params: dict


def load_scenario(path) -> Scenario:
    data = _load_json(path)
    block = _require(data, "scenario", str(path), dict)
    kind = _require(block, "kind", f"{path}: scenario")
    if kind not in SCENARIO_KINDS:
        raise FileFormatError(f"{path}: unknown scenario kind {kind!r}")
    solver = _parse_solver(data.get("solver"), f"{path}: solver")
    valuation = None
    if kind in ("solve", "stress"):
        if "valuation" not in data:
            raise FileFormatError(f"{path}: scenario kind {kind!r} needs a valuation block")
        valuation = _parse_valuation(data["valuation"], f"{path}: valuation")
    context = f"{path}: scenario"
    params: dict = {}
    if kind == "stress":
        grid = _parse_grid(_require(block, "alpha_grid", context), f"{context}.alpha_grid")
        if any(a < 0 or a > 1 for a in grid):
            raise FileFormatError(f"{context}.alpha_grid: shocks must lie in [0, 1]")
        params["alpha_grid"] = grid
    elif kind == "limit_maturity":
        params["sigma"] = _number(block, "sigma", context)
        params["tau_sequence"] = _parse_grid(_require(block, "tau_sequence", context),
                                             f"{context}.tau_sequence")
        params["beta"] = float(block.get("beta", 1.0))
    elif kind == "limit_beta":
        params["beta_sequence"] = _parse_grid(_require(block, "beta_sequence", context),
                                              f"{context}.beta_sequence")
    elif kind == "curve":
        params["equity_grid"] = _parse_grid(_require(block, "equity_grid", context),
                                            f"{context}.equity_grid")
        families = _require(block, "families", context, list)
        parsed = []
        for k, fam in enumerate(families):
            fcontext = f"{context}.families[{k}]"
            name = _require(fam, "family", fcontext)
            if name not in CURVE_FAMILY_FIELDS:
                raise FileFormatError(f"{fcontext}: unknown family {name!r}")
            entry = {"family": name}
            for field_name in CURVE_FAMILY_FIELDS[name]:
                entry[field_name] = _number(fam, field_name, fcontext)
            if name == "rogers_veraart":
                entry["lender_equity"] = float(fam.get("lender_equity", 0.0))
            parsed.append(entry)
        params["families"] = parsed
    elif kind == "mc_global":
        params["sigma"] = _number(block, "sigma", context)
        params["tau"] = _number(block, "tau", context)
        params["beta"] = float(block.get("beta", 1.0))
        params["samples"] = int(_number(block, "samples", context))
        params["seed"] = int(block.get("seed", 0))
    return Scenario(kind=kind, valuation=valuation, solver=solver, params=params)


@dataclass(frozen=True)
class CurveTable:
    """Rows of (family label, equity, factor value)."""

    rows: tuple


def evaluate_curves(families: list, grid) -> CurveTable:
    """Evaluate standalone factor curves over an equity grid.

    Each family entry carries its own balance-sheet constants, so curves can
    be drawn without a network (e.g. to compare valuation rules directly).
    """
    grid = np.asarray(grid, dtype=float)
    rows = []
    for fam in families:
        name = fam["family"]
        if name == "eisenberg_noe":
            values = en_interbank(grid, fam["obligations"])
        elif name == "rogers_veraart":
            values = rv_interbank(fam.get("lender_equity", 0.0), grid,
                                  fam["beta"], fam["obligations"])
        elif name == "furfine":
            values = furfine_interbank(grid, fam["recovery"])
        elif name == "linear_debtrank":
            values = debtrank_interbank(grid, fam["book_equity"])
        elif name == "exante_en_gbm":
            values = exante_en_gbm_interbank(grid, fam["external_assets"],
                                             fam["sigma"], fam["maturity"],
                                             fam["obligations"], fam["beta"])
        elif name == "exante_en_uniform":
            values = exante_en_uniform_interbank(grid, fam["book_equity"],
                                                 fam["obligations"], fam["beta"])
        else:
            raise SpecError(f"unknown curve family {name!r}")
        values = np.broadcast_to(np.asarray(values, dtype=float), grid.shape)
        rows.extend((name, float(e), float(v)) for e, v in zip(grid, values))
    return CurveTable(rows=tuple(rows))


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if value is None:
        return ""
    return str(value)


def _csv(header, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buffer.getvalue()


def _json_rows(kind, rows, header, extra=None) -> str:
    payload = {"kind": kind}
    if extra:
        payload.update(extra)
    payload["rows"] = [dict(zip(header, row)) for row in rows]
    return json.dumps(payload, indent=2) + "\n"


def _solve_rows(net: FinancialNetwork, report: SolveReport):
    book = net.book_equity()
    header = ("bank_id", "book_equity", "equity", "defaulted", "iterations")
    rows = [
        (bank, float(book[k]), float(report.solution[k]),
         bool(report.solution[k] < 0), report.iterations)
        for k, bank in enumerate(net.bank_ids)
    ]
    extra = {"converged": report.converged, "residual": report.residual,
             "kind_of_solution": report.kind, "warnings": list(report.warnings)}
    return header, rows, extra


def _stress_rows(net: FinancialNetwork, results):
    header = ("alpha", "bank_id", "delta_equity", "network_effect")
    rows = []
    for res in results:
        alpha = res.alpha if res.alpha is not None else float(np.max(res.shock))
        for k, bank in enumerate(net.bank_ids):
            rows.append((float(alpha), bank, float(res.delta_equity[k]),
                         res.network_effect))
    rows.sort(key=lambda row: (row[0], row[1]))
    extra = {"converged": all(r.report.converged for r in results)}
    return header, rows, extra


def _curve_rows(table: CurveTable):
    return ("family", "equity", "value"), list(table.rows), None


def _limit_rows(net: FinancialNetwork, series: LimitSeries):
    header = ("parameter", "bank_id", "equity", "deviation")
    rows = []
    for p, equity, deviation in zip(series.parameters, series.equities,
                                    series.deviations):
        for k, bank in enumerate(net.bank_ids):
            rows.append((float(p), bank, float(equity[k]), float(deviation)))
    extra = {"parameter_name": series.parameter_name, "partial": series.partial,
             "reference": [float(v) for v in series.reference],
             "notes": list(series.notes)}
    return header, rows, extra


def _mc_rows(net: FinancialNetwork, result: MonteCarloResult):
    header = ("bank_id", "mean_equity", "std_error", "samples", "dropped")
    rows = [
        (bank, float(result.mean[k]), float(result.std_error[k]),
         result.samples, result.dropped)
        for k, bank in enumerate(net.bank_ids)
    ]
    extra = {"seed": result.seed, "valid": result.valid}
    return header, rows, extra


def _discount_rows(net: FinancialNetwork, results):
    header = ("alpha", "lender", "borrower", "merton_discount",
              "network_discount", "difference")
    rows = []
    for res in results:
        alpha = res.alpha if res.alpha is not None else float(np.max(res.shock))
        for e, (i, j) in enumerate(res.edges):
            network = float(res.network[e]) if res.network is not None else None
            diff = float(res.difference[e]) if res.difference is not None else None
            rows.append((float(alpha), net.bank_ids[i], net.bank_ids[j],
                         float(res.merton[e]), network, diff))
    extra = {"converged": all(r.converged for r in results)}
    return header, rows, extra


def serialize_results(result, fmt: str = "csv",
                      net: Optional[FinancialNetwork] = None) -> str:
    """Render a result object as CSV or JSON text.

    CSV columns are fixed per result kind (see README); JSON mirrors the
    same rows.  Floats are printed with 17 significant digits so parsing the
    output recovers them exactly.
    """
    if fmt not in ("csv", "json"):
        raise FileFormatError(f"unknown output format {fmt!r}")
    if isinstance(result, SolveReport):
        kind, parts = "solve", _solve_rows(net, result)
    elif isinstance(result, CurveTable):
        kind, parts = "curve", _curve_rows(result)
    elif isinstance(result, LimitSeries):
        kind, parts = "limit", _limit_rows(net, result)
    elif isinstance(result, MonteCarloResult):
        kind, parts = "mc_global", _mc_rows(net, result)
    elif isinstance(result, (list, tuple)) and result and isinstance(result[0], StressResult):
        kind, parts = "stress", _stress_rows(net, result)
    elif isinstance(result, (list, tuple)) and result and isinstance(result[0], DiscountComparison):
        kind, parts = "discount", _discount_rows(net, result)
    else:
        raise FileFormatError(f"cannot serialize {type(result).__name__}")
    header, rows, extra = parts
    if fmt == "csv":
        return _csv(header, rows)
    return _json_rows(kind, rows, header, extra)


def write_output(text: str, path=None) -> None:
    """Write to stdout, or atomically to a file (write-then-rename) so a
    failed run never leaves a partial file behind."""
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".neva-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
