"""Evaluate a scenario and render the result.

`analyze` walks a validated scenario in declaration order and produces a
plain nested structure: alphabet entropies, per-stage metrics (each declared
stage under its source alphabet's own distribution), chained pipeline
metrics, route comparisons, judgment scores, and axis transition
classifications. Sections with nothing to say are omitted.

Rendering is deterministic byte for byte. The machine formats (json, csv)
carry full float precision and spell infinities "+inf"/"-inf"; the table
format rounds to four decimals for reading.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

from .alphabet import entropy
from .axis import detect_fork
from .costbenefit import (
    StageMetrics,
    compare_routes,
    pipeline_cost_benefit,
    stage_cost_benefit,
)
from .scenario import Scenario

_FORMATS = ("table", "json", "csv")


@dataclass
class Report:
    """Evaluated scenario results plus renderers for each output format."""

    scenario_id: str
    body: dict

    def render(self, format: str = "table") -> str:
        if format == "json":
            return self.to_json()
        if format == "csv":
            return self.to_csv()
        if format == "table":
            return self.to_table()
        raise ValueError(f"unknown format {format!r} (valid: {', '.join(_FORMATS)})")

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.body), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["section", "id", "metric", "value"])
        for section, rows in _flatten(self.body):
            for rid, metric, value in rows:
                writer.writerow([section, rid, metric, _machine(value)])
        return out.getvalue()

    def to_table(self) -> str:
        return _render_table(self.body)


def _jsonable(value):
    if isinstance(value, float):
        if math.isinf(value):
            return "+inf" if value > 0 else "-inf"
        return value
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _machine(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "+inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def _human(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if math.isinf(value):
            return "+inf" if value > 0 else "-inf"
        return f"{value:.4f}"
    return str(value)


_STAGE_FIELDS = (
    ("input_entropy_bits", lambda m: m.input_entropy),
    ("output_entropy_bits", lambda m: m.output_entropy),
    ("alphabet_compression_bits", lambda m: m.alphabet_compression),
    ("potential_distortion_bits", lambda m: m.potential_distortion),
    ("benefit_bits", lambda m: m.benefit),
    ("cost", lambda m: m.cost),
    ("ratio", lambda m: m.ratio),
)


def _stage_dict(m: StageMetrics) -> dict:
    out = {
        "stage": m.stage_id,
        "forward": m.forward_id,
        "from": m.input_alphabet,
        "to": m.output_alphabet,
    }
    for name, get in _STAGE_FIELDS:
        out[name] = get(m)
    return out


def analyze(scenario: Scenario, pipeline_id: str | None = None) -> Report:
    """Evaluate everything a scenario declares.

    With ``pipeline_id`` the pipeline and route sections are restricted to
    that pipeline; everything else is reported as usual.
    """
    if pipeline_id is not None and pipeline_id not in scenario.pipelines:
        raise ValueError(
            f"scenario '{scenario.id}' has no pipeline '{pipeline_id}'"
        )
    body: dict = {"scenario": scenario.id}

    if scenario.alphabets:
        body["alphabets"] = [
            {"id": a.id, "letters": a.n_letters, "entropy_bits": entropy(a)}
            for a in scenario.alphabets.values()
        ]

    if scenario.stages:
        rows = []
        for stage in scenario.stages.values():
            report = stage_cost_benefit(stage, stage.forward.source.pmf)
            rows.append(_stage_dict(report.stages[0]))
        body["stages"] = rows

    pipeline_reports: dict[str, object] = {}
    selected = [
        p
        for p in scenario.pipelines.values()
        if pipeline_id is None or p.id == pipeline_id
    ]
    if selected:
        rows = []
        for pipeline in selected:
            report = pipeline_cost_benefit(pipeline)
            pipeline_reports[pipeline.id] = report
            stages = []
            for i, m in enumerate(report.stages):
                d = _stage_dict(m)
                d["index"] = i
                stages.append(d)
            rows.append(
                {
                    "id": pipeline.id,
                    "stages": stages,
                    "input_entropy_bits": report.input_entropy,
                    "output_entropy_bits": report.output_entropy,
                    "benefit_bits": report.benefit,
                    "cost": report.cost,
                    "ratio": report.ratio,
                }
            )
        body["pipelines"] = rows

    routes = [
        r
        for r in scenario.direct_routes.values()
        if pipeline_id is None or r.pipeline_id == pipeline_id
    ]
    if routes:
        rows = []
        for route in routes:
            cmp = compare_routes(scenario.pipelines[route.pipeline_id], route.stage)
            row = {
                "id": route.id,
                "pipeline": cmp.pipeline_id,
                "direct_stage": cmp.direct_id,
                "compression_pipeline_bits": cmp.compression_pipeline,
                "compression_direct_bits": cmp.compression_direct,
                "compression_gap_bits": cmp.compression_gap,
                "compression_additive": cmp.compression_additive,
                "distortion_pipeline_bits": cmp.distortion_pipeline,
                "distortion_direct_bits": cmp.distortion_direct,
                "pipeline_cost": cmp.pipeline.cost,
                "direct_cost": cmp.direct.cost,
                "cost_premise_holds": cmp.cost_premise_holds,
                "distortion_premise_holds": cmp.distortion_premise_holds,
                "premises_satisfied": cmp.premises_satisfied,
                "pipeline_ratio": cmp.pipeline_ratio,
                "direct_ratio": cmp.direct_ratio,
                "pipeline_preferred": cmp.pipeline_preferred,
            }
            if not cmp.premises_satisfied:
                row["note"] = "premises not satisfied"
            rows.append(row)
        body["routes"] = rows

    if scenario.judgments:
        rows = []
        for j in scenario.judgments:
            row = {
                "id": j.id,
                "condition_a": j.condition_a,
                "condition_b": j.condition_b.value,
                "score": j.score,
            }
            if j.point_of_view is not None:
                pov = {
                    "action": j.point_of_view.action.value,
                    "target": j.point_of_view.target.value,
                }
                if j.point_of_view.refinement:
                    pov["refinement"] = j.point_of_view.refinement
                row["point_of_view"] = pov
            rows.append(row)
        body["judgments"] = rows

    if scenario.axes:
        rows = []
        for axis in scenario.axes.values():
            kinds = axis.transitions()
            rows.append(
                {
                    "id": axis.id,
                    "nodes": len(axis.nodes),
                    "transitions": [
                        {
                            "index": i,
                            "from": axis.nodes[i].id,
                            "to": axis.nodes[i + 1].id,
                            "kind": kind.value,
                        }
                        for i, kind in enumerate(kinds)
                    ],
                }
            )
        body["axes"] = rows
        forks = detect_fork(list(scenario.axes.values()))
        if forks:
            body["forks"] = [
                {
                    "axis_a": f.axis_a,
                    "axis_b": f.axis_b,
                    "shared_prefix": list(f.shared_prefix),
                    "fork_index": f.fork_index,
                }
                for f in forks
            ]

    return Report(scenario_id=scenario.id, body=body)


# ---- flat and tabular rendering -----------------------------------------


def _flatten(body: dict):
    """Yield (section, [(id, metric, value), ...]) pairs in body order."""
    for section in body:
        if section == "scenario":
            yield "scenario", [("-", "id", body["scenario"])]
        elif section == "alphabets":
            yield section, [
                (row["id"], key, row[key])
                for row in body[section]
                for key in ("letters", "entropy_bits")
            ]
        elif section == "stages":
            yield section, [
                (row["stage"], key, row[key])
                for row in body[section]
                for key, _ in _STAGE_FIELDS
            ]
        elif section == "pipelines":
            rows = []
            for p in body[section]:
                for s in p["stages"]:
                    rows.extend(
                        (f"{p['id']}[{s['index']}]", key, s[key])
                        for key, _ in _STAGE_FIELDS
                    )
                for key in (
                    "input_entropy_bits",
                    "output_entropy_bits",
                    "benefit_bits",
                    "cost",
                    "ratio",
                ):
                    rows.append((p["id"], key, p[key]))
            yield section, rows
        elif section == "routes":
            rows = []
            for r in body[section]:
                for key, value in r.items():
                    if key != "id":
                        rows.append((r["id"], key, value))
            yield section, rows
        elif section == "judgments":
            rows = []
            for j in body[section]:
                for key in ("condition_a", "condition_b", "score"):
                    rows.append((j["id"], key, j[key]))
            yield section, rows
        elif section == "axes":
            rows = []
            for a in body[section]:
                for t in a["transitions"]:
                    rows.append(
                        (
                            f"{a['id']}[{t['index']}]",
                            "transition",
                            f"{t['from']} -> {t['to']}: {t['kind']}",
                        )
                    )
            yield section, rows
        elif section == "forks":
            rows = []
            for f in body[section]:
                rows.append(
                    (
                        f"{f['axis_a']}|{f['axis_b']}",
                        "fork",
                        f"after {'/'.join(f['shared_prefix'])} at index {f['fork_index']}",
                    )
                )
            yield section, rows


def _format_columns(rows: list[list[str]], indent: str = "  ") -> list[str]:
    if not rows:
        return []
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return [
        indent + "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in rows
    ]


def _render_table(body: dict) -> str:
    lines: list[str] = [f"scenario: {body['scenario']}"]
    if "alphabets" in body:
        lines.append("")
        lines.append("alphabets")
        rows = [["id", "letters", "entropy_bits"]]
        rows += [
            [a["id"], str(a["letters"]), _human(a["entropy_bits"])]
            for a in body["alphabets"]
        ]
        lines += _format_columns(rows)
    if "stages" in body:
        lines.append("")
        lines.append("stages (each under its source alphabet's own distribution)")
        rows = [["id", "from", "to", "H_in", "H_out", "AC", "PD", "cost", "ratio"]]
        for s in body["stages"]:
            rows.append(
                [
                    s["stage"],
                    s["from"],
                    s["to"],
                    _human(s["input_entropy_bits"]),
                    _human(s["output_entropy_bits"]),
                    _human(s["alphabet_compression_bits"]),
                    _human(s["potential_distortion_bits"]),
                    _human(s["cost"]),
                    _human(s["ratio"]),
                ]
            )
        lines += _format_columns(rows)
    if "pipelines" in body:
        for p in body["pipelines"]:
            lines.append("")
            lines.append(f"pipeline {p['id']}")
            rows = [["step", "stage", "from", "to", "AC", "PD", "cost", "ratio"]]
            for s in p["stages"]:
                rows.append(
                    [
                        str(s["index"]),
                        s["stage"],
                        s["from"],
                        s["to"],
                        _human(s["alphabet_compression_bits"]),
                        _human(s["potential_distortion_bits"]),
                        _human(s["cost"]),
                        _human(s["ratio"]),
                    ]
                )
            lines += _format_columns(rows)
            lines.append(
                f"  combined: benefit {_human(p['benefit_bits'])} bits, "
                f"cost {_human(p['cost'])}, ratio {_human(p['ratio'])}"
            )
    if "routes" in body:
        lines.append("")
        lines.append("route comparisons")
        for r in body["routes"]:
            lines.append(
                f"  {r['id']}: pipeline {r['pipeline']} ratio "
                f"{_human(r['pipeline_ratio'])} vs direct {r['direct_stage']} ratio "
                f"{_human(r['direct_ratio'])}"
            )
            rows = [
                ["premise", "holds"],
                ["direct costs more", _human(r["cost_premise_holds"])],
                ["direct distorts more", _human(r["distortion_premise_holds"])],
                ["compression additive", _human(r["compression_additive"])],
            ]
            lines += _format_columns(rows, indent="    ")
            verdict = (
                "pipeline preferred" if r["pipeline_preferred"] else "direct preferred or tied"
            )
            if "note" in r:
                verdict += f" ({r['note']})"
            lines.append(f"    {verdict}")
    if "judgments" in body:
        lines.append("")
        lines.append("judgments")
        rows = [["id", "condition_a", "condition_b", "score"]]
        for j in body["judgments"]:
            rows.append(
                [
                    j["id"],
                    _human(j["condition_a"]),
                    j["condition_b"],
                    str(j["score"]),
                ]
            )
        lines += _format_columns(rows)
    if "axes" in body:
        lines.append("")
        lines.append("axes")
        for a in body["axes"]:
            lines.append(f"  {a['id']} ({a['nodes']} nodes)")
            for t in a["transitions"]:
                lines.append(
                    f"    [{t['index']}] {t['from']} -> {t['to']}: {t['kind']}"
                )
    if "forks" in body:
        lines.append("")
        lines.append("forks")
        for f in body["forks"]:
            lines.append(
                f"  {f['axis_a']} | {f['axis_b']}: shared "
                f"{'/'.join(f['shared_prefix'])}, diverge at index {f['fork_index']}"
            )
    return "\n".join(lines) + "\n"
