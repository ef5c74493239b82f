"""CSV and JSON writers with deterministic formatting.

Identical inputs produce byte-identical files apart from the timestamp
comment, which ``timestamp=False`` suppresses.  Column sets are part of the
external interface and must not drift.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

from .constants import CONSTANTS

SCHEMA_VERSION = 1


def _timestamp_line() -> str:
    return f"# generated: {datetime.now(timezone.utc).isoformat()}"


def _fmt(x) -> str:
    if x is None:
        return "n/a"
    if isinstance(x, float):
        return f"{x:.10e}"
    return str(x)


def _coefficient_header(table) -> list[str]:
    """Fit coefficients in both unit systems, as CSV comment lines."""
    eh = CONSTANTS.hartree_neV
    nm = CONSTANTS.bohr_nm
    lines = []
    for label, value, power in (("C3", table.c3, 3), ("C4", table.c4, 4),
                                ("C5", table.c5, 5)):
        if value is None:
            continue
        lines.append(
            f"# {label}_Eh_a0{power} = {value:.6e} ; "
            f"{label}_neV_nm{power} = {value * eh * nm**power:.6e}"
        )
    return lines


def potential_table_csv(table, path, include_ratio: bool = False,
                        timestamp: bool = True) -> None:
    lines = []
    if timestamp:
        lines.append(_timestamp_line())
    lines.append(f"# mirror: {table.label}")
    lines.extend(_coefficient_header(table))
    cols = "z_a0,z_nm,V_Eh,V_neV"
    if include_ratio:
        cols += ",V_over_Vstar"
    lines.append(cols)
    eh = CONSTANTS.hartree_neV
    nm = CONSTANTS.bohr_nm
    ratio = table.ratio_to_retarded() if include_ratio else None
    for i, (z, v) in enumerate(zip(table.z, table.V)):
        row = f"{z:.10e},{z * nm:.10e},{v:.10e},{v * eh:.10e}"
        if include_ratio:
            row += f",{ratio[i]:.10e}"
        lines.append(row)
    Path(path).write_text("\n".join(lines) + "\n")


def potential_table_json(table, include_ratio: bool = False) -> dict:
    eh = CONSTANTS.hartree_neV
    nm = CONSTANTS.bohr_nm
    out = {
        "schema_version": SCHEMA_VERSION,
        "mirror": table.label,
        "fit": {
            "C3_Eh_a03": table.c3,
            "C4_Eh_a04": table.c4,
            "C5_Eh_a05": table.c5,
            "C3_neV_nm3": None if table.c3 is None else table.c3 * eh * nm**3,
            "C4_neV_nm4": None if table.c4 is None else table.c4 * eh * nm**4,
            "C5_neV_nm5": None if table.c5 is None else table.c5 * eh * nm**5,
            "near_exponent": table.asymptotics.near_exponent,
            "far_exponent": table.asymptotics.far_exponent,
        },
        "columns": ["z_a0", "z_nm", "V_Eh", "V_neV"],
        "rows": [
            [z, z * nm, v, v * eh] for z, v in zip(table.z, table.V)
        ],
    }
    if include_ratio:
        out["columns"].append("V_over_Vstar")
        for row, q in zip(out["rows"], table.ratio_to_retarded()):
            row.append(float(q))
    return out


def sweep_csv(points, path, timestamp: bool = True) -> None:
    lines = []
    if timestamp:
        lines.append(_timestamp_line())
    lines.append("h_m,E_neV,refl_prob,loss,re_r,im_r,flux_drift")
    errors = []
    for pt in points:
        e_nev = pt.energy_au * CONSTANTS.hartree_neV
        h = pt.height_m if pt.height_m is not None else \
            e_nev / CONSTANTS.mg
        if pt.result is None:
            lines.append(f"{h:.10e},{e_nev:.10e},nan,nan,nan,nan,nan")
            errors.append(f"# error at h_m={h:.6e}: {pt.error}")
        else:
            r = pt.result
            lines.append(
                f"{h:.10e},{e_nev:.10e},{r.probability:.10e},{r.loss:.10e},"
                f"{r.r.real:.10e},{r.r.imag:.10e},{r.flux_drift:.10e}"
            )
    lines.extend(errors)
    Path(path).write_text("\n".join(lines) + "\n")


def sweep_json(points) -> dict:
    rows = []
    errors = []
    for pt in points:
        e_nev = pt.energy_au * CONSTANTS.hartree_neV
        h = pt.height_m if pt.height_m is not None else e_nev / CONSTANTS.mg
        if pt.result is None:
            rows.append([h, e_nev, None, None, None, None, None])
            errors.append({"h_m": h, "error": pt.error})
        else:
            r = pt.result
            rows.append([h, e_nev, r.probability, r.loss,
                         r.r.real, r.r.imag, r.flux_drift])
    return {
        "schema_version": SCHEMA_VERSION,
        "columns": ["h_m", "E_neV", "refl_prob", "loss",
                    "re_r", "im_r", "flux_drift"],
        "rows": rows,
        "errors": errors,
    }


def lifetime_csv(rows, path, timestamp: bool = True) -> None:
    """rows: iterable of (material, porosity or None, im_a_nm, lifetime_s)."""
    lines = []
    if timestamp:
        lines.append(_timestamp_line())
    lines.append("material,porosity,im_a_nm,lifetime_s")
    for material, porosity, im_a_nm, tau in rows:
        lines.append(
            f"{material},{'' if porosity is None else f'{porosity:g}'},"
            f"{im_a_nm:.10e},{tau:.10e}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def lifetime_json(rows) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "columns": ["material", "porosity", "im_a_nm", "lifetime_s"],
        "rows": [[m, p, a, t] for m, p, a, t in rows],
    }


def badlands_csv(z, profiles, peaks, path, timestamp: bool = True) -> None:
    """profiles: dict height_m -> Q array on z; peaks: height_m -> (z*, Q*)."""
    lines = []
    if timestamp:
        lines.append(_timestamp_line())
    for h, (pz, pq) in peaks.items():
        lines.append(f"# peak h_m={h:g}: z_a0={pz:.6e} Q={pq:.6e}")
    heights = list(profiles)
    lines.append("z_a0," + ",".join(f"Q_h_m_{h:g}" for h in heights))
    for i, zi in enumerate(z):
        lines.append(f"{zi:.10e}," +
                     ",".join(f"{profiles[h][i]:.10e}" for h in heights))
    Path(path).write_text("\n".join(lines) + "\n")


def badlands_json(z, profiles, peaks) -> dict:
    heights = list(profiles)
    return {
        "schema_version": SCHEMA_VERSION,
        "peaks": {f"{h:g}": {"z_a0": pz, "Q": pq}
                  for h, (pz, pq) in peaks.items()},
        "columns": ["z_a0"] + [f"Q_h_m_{h:g}" for h in heights],
        "rows": [[float(z[i])] + [float(profiles[h][i]) for h in heights]
                 for i in range(len(z))],
    }


def comparison_csv(rows, path, timestamp: bool = True) -> None:
    """rows: dicts with target,row,quantity,computed,reference,tol,status,note."""
    lines = []
    if timestamp:
        lines.append(_timestamp_line())
    lines.append("target,row,quantity,computed,reference,tolerance,status,note")
    for r in rows:
        lines.append(
            f"{r['target']},{r['row']},{r['quantity']},{_fmt(r['computed'])},"
            f"{_fmt(r['reference'])},{r.get('tolerance', '')},"
            f"{r['status']},{r.get('note', '')}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def comparison_json(rows) -> dict:
    return {"schema_version": SCHEMA_VERSION, "cells": rows}


def write_json(payload: dict, path) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
