"""Command-line interface.

Subcommands: inscribe, diagnose, sweep, export-median.  Exit codes are the
only success/failure channel: 0 ok, 1 usage/IO/validation, 2 hypothesis
violation during inscribing, 3 diagnostics failure, 4 incomplete sweep.
stdout carries human-readable summaries; files carry data.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace

import numpy as np

from .bodies import Frame, frame_orthonormalize, gauge_eval, load_body
from .diagnostics import crosspolytope_condition_report
from .errors import HypothesisViolationError, InrhombError
from .median import median_heights_extended_batch, median_mesh
from .bodies import boundary_scale, project_coords
from .solver import SolverConfig, inscribe_rhomb, verify_rhomb
from .sweep import (direction_sweep, equalize_diagonals, givens_frame,
                    random_frame, sweep_summary)

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; 2 is taken
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _build_parser():
    p = _Parser(prog="inrhomb",
                description="Inscribed rhombs in strictly convex bodies")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--body", required=True, help="body JSON file")
        sp.add_argument("--frame", default="identity",
                        help="identity | seed:N | angles:a1,a2,... | matrix:PATH")
        sp.add_argument("--tol", type=float, default=None,
                        help="solver root tolerance / diagnostics tolerance")
        sp.add_argument("--resolution", type=int, default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--out", default=None, help="output file path")

    sp = sub.add_parser("inscribe", help="inscribe a rhomb in a direction frame")
    common(sp)

    sp = sub.add_parser("diagnose", help="probe the inscribing hypotheses")
    common(sp)

    sp = sub.add_parser("sweep", help="inscribe over seeded random frames")
    common(sp)
    sp.add_argument("--count", type=int, default=None)
    sp.add_argument("--equalize", action="store_true",
                    help="search for an equal-diagonal direction afterwards")

    sp = sub.add_parser("export-median", help="export median samples")
    common(sp)
    sp.add_argument("--format", dest="fmt", default=None,
                    choices=["json", "csv", "obj", "svg"])
    return p


def _parse_frame(spec, dim):
    if spec == "identity":
        return Frame.identity(dim)
    if spec.startswith("seed:"):
        return random_frame(dim, int(spec[5:]))
    if spec.startswith("angles:"):
        angles = [float(a) for a in spec[7:].split(",") if a.strip()]
        return givens_frame(dim, angles)
    if spec.startswith("matrix:"):
        with open(spec[7:], "r", encoding="utf-8") as fh:
            rows = json.load(fh)
        return frame_orthonormalize(np.asarray(rows, dtype=np.float64))
    raise _UsageError(f"unrecognised frame spec {spec!r}")


def _solver_config(args):
    cfg = SolverConfig()
    if args.tol is not None:
        cfg = replace(cfg, root_tol=args.tol)
    return cfg


def _write_json(path, obj):
    text = json.dumps(obj, indent=2)
    if path is None:
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_inscribe(args) -> int:
    body = load_body(args.body)
    frame = _parse_frame(args.frame, body.dim)
    config = _solver_config(args)
    try:
        rhomb, report = inscribe_rhomb(body, frame, config)
    except HypothesisViolationError as exc:
        print(f"inscribe failed: {exc}", file=sys.stderr)
        print("hint: run `inrhomb diagnose` on this body and frame to probe "
              "regularity and special corners", file=sys.stderr)
        return 2
    ver = verify_rhomb(body, rhomb, 1e-6)
    _write_json(args.out, rhomb.to_json(residuals=ver.residuals_json(),
                                        report=report))
    lam = ", ".join(f"{v:.9g}" for v in rhomb.half_diagonals)
    print(f"inscribed rhomb: method={report.method} "
          f"iterations={report.iterations} half_diagonals=[{lam}] "
          f"inscription_residual={ver.inscription:.3e}")
    return 0


def cmd_diagnose(args) -> int:
    body = load_body(args.body)
    frame = _parse_frame(args.frame, body.dim)
    resolution = args.resolution if args.resolution is not None else 12
    tol = args.tol if args.tol is not None else 1e-5
    report = crosspolytope_condition_report(body, frame, resolution, tol,
                                            seed=args.seed)
    _write_json(args.out, report.to_json())
    print(f"diagnostics: corners={len(report.special_corners)} "
          f"regularity_violations={len(report.regularity_violations)} "
          f"poles_ok={all(p.passed for p in report.pole_checks)} "
          f"certificates_ok={all(c.passed for c in report.certificates)}")
    return 0 if report.passed else 3


def _records_to_csv(path, records):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        dim = records[0].frame.dim
        head = (["seed"] +
                [f"frame_{i}{j}" for i in range(dim) for j in range(dim)] +
                [f"lambda_{i}" for i in range(dim)] +
                [f"center_{i}" for i in range(dim)] +
                ["residual", "converged"])
        w.writerow(head)
        for r in records:
            row = ([r.seed] + [repr(v) for v in r.frame.axes.flatten()] +
                   [repr(v) for v in r.half_diagonals] +
                   [repr(v) for v in r.center] +
                   [repr(r.residual), str(bool(r.converged))])
            w.writerow(row)


def cmd_sweep(args) -> int:
    body = load_body(args.body)
    if args.count is None or args.count < 1:
        raise _UsageError("sweep requires --count >= 1")
    config = _solver_config(args)
    records = direction_sweep(body, args.count, args.seed, config,
                              threads=max(1, args.threads))
    summary = sweep_summary(records)
    out = args.out if args.out is not None else "sweep.csv"
    _records_to_csv(out, records)
    summary_obj = {"count": summary.count,
                   "success_fraction": summary.success_fraction,
                   "spread_quartiles": list(summary.spread_quartiles)}
    if args.equalize:
        base = min((r for r in records if r.converged),
                   key=lambda r: r.spread, default=None)
        if base is not None:
            eq = equalize_diagonals(body, base.frame, config)
            summary_obj["equalize"] = {
                "converged": eq.converged, "spread": eq.spread,
                "iterations": eq.iterations,
                "frame": eq.frame.axes.tolist(),
                "half_diagonals": (eq.rhomb.half_diagonals.tolist()
                                   if eq.rhomb is not None else None)}
    _write_json(_summary_path(out), summary_obj)
    print(f"sweep: {summary.count} frames, success fraction "
          f"{summary.success_fraction:.3f}")
    return 0 if summary.success_fraction == 1.0 else 4


def _summary_path(csv_path):
    return (csv_path[:-4] if csv_path.endswith(".csv") else csv_path) + \
        ".summary.json"


# ---------------------------------------------------------------------------
# median exports


def _median_curve_2d(body, frame, axis, resolution):
    yc = project_coords(frame, body.translation, axis)
    rc = body.circumradius_bound()
    ys = np.linspace(yc[0] - rc, yc[0] + rc, resolution)[:, None]
    from .bodies import _fiber_solve, classify_status, DEFAULT_GEOMETRY
    from . import kernels
    bases, (status, tn, tp, tm, _) = _fiber_solve(body, frame, axis, ys,
                                                  DEFAULT_GEOMETRY)
    segs, cur = [], []
    v = frame.axes[axis]
    for i in range(ys.shape[0]):
        if status[i] == kernels.EMPTY or status[i] == kernels.BRACKET_ERROR:
            if len(cur) > 1:
                segs.append(cur)
            cur = []
            continue
        h = (0.5 * (tn[i] + tp[i]) if status[i] == kernels.CHORD else tm[i])
        cur.append(bases[i] + h * v)
    if len(cur) > 1:
        segs.append(cur)
    return segs


def _svg_pts(points, fmt="{:.6f}"):
    return " ".join(f"{fmt.format(p[0])},{fmt.format(-p[1])}" for p in points)


def write_median_svg(path, body, frame, resolution, config):
    outline = []
    z0 = body.interior_point
    for k in range(512):
        ang = 2.0 * np.pi * k / 512
        u = np.array([np.cos(ang), np.sin(ang)])
        outline.append(boundary_scale(body, z0, u))
    rhomb, _ = inscribe_rhomb(body, frame, config)
    rc = body.circumradius_bound(about=body.interior_point) + 0.1
    cx, cy = body.interior_point
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{cx - rc:.6f} {-cy - rc:.6f} {2 * rc:.6f} {2 * rc:.6f}">',
        f'<polygon points="{_svg_pts(outline)}" fill="none" '
        f'stroke="black" stroke-width="{rc / 200:.6f}"/>',
    ]
    for axis, colour in ((0, "crimson"), (1, "royalblue")):
        for seg in _median_curve_2d(body, frame, axis, resolution):
            lines.append(f'<polyline points="{_svg_pts(seg)}" fill="none" '
                         f'stroke="{colour}" stroke-width="{rc / 150:.6f}"/>')
    order = [rhomb.vertices[0], rhomb.vertices[2],
             rhomb.vertices[1], rhomb.vertices[3]]
    lines.append(f'<polygon points="{_svg_pts(order)}" fill="none" '
                 f'stroke="seagreen" stroke-width="{rc / 150:.6f}"/>')
    for i in (0, 1):
        seg = [rhomb.vertices[2 * i], rhomb.vertices[2 * i + 1]]
        lines.append(f'<polyline points="{_svg_pts(seg)}" fill="none" '
                     f'stroke="seagreen" stroke-dasharray="{rc / 60:.6f}" '
                     f'stroke-width="{rc / 300:.6f}"/>')
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_median_obj(path, body, frame, resolution):
    chunks = []
    offset = 1  # OBJ indices are 1-based
    for axis in range(body.dim):
        mesh = median_mesh(body, frame, axis, resolution)
        n = resolution
        idx = np.full(n * n, -1, dtype=int)
        verts = []
        for i, s in enumerate(mesh.samples):
            if s.point is not None:
                idx[i] = len(verts)
                verts.append(s.point)
        faces = []
        for r in range(n - 1):
            for c in range(n - 1):
                corners = [r * n + c, r * n + c + 1,
                           (r + 1) * n + c, (r + 1) * n + c + 1]
                ids = [idx[k] for k in corners]
                if any(k < 0 for k in ids):
                    continue  # cells touching the outside are omitted
                a, b, cc, dd = ids
                faces.append((a, b, dd))
                faces.append((a, dd, cc))
        chunks.append(f"g median_axis_{axis}")
        for v in verts:
            chunks.append("v " + " ".join(f"{x:.9f}" for x in v))
        for f in faces:
            chunks.append("f " + " ".join(str(offset + k) for k in f))
        offset += len(verts)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(chunks) + "\n")


def write_median_csv(path, body, frame, resolution):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        n_red = body.dim - 1
        w.writerow(["axis"] + [f"y_{j}" for j in range(n_red)] +
                   ["classification"] +
                   [f"point_{j}" for j in range(body.dim)])
        for axis in range(body.dim):
            mesh = median_mesh(body, frame, axis, resolution)
            for s in mesh.samples:
                pt = ([""] * body.dim if s.point is None
                      else [repr(v) for v in s.point])
                w.writerow([axis] + [repr(v) for v in s.y] +
                           [s.classification.kind] + pt)


def cmd_export_median(args) -> int:
    body = load_body(args.body)
    frame = _parse_frame(args.frame, body.dim)
    fmt = args.fmt if args.fmt is not None else "csv"
    resolution = args.resolution if args.resolution is not None else 33
    out = args.out if args.out is not None else f"median.{fmt}"
    if fmt == "svg" and body.dim != 2:
        raise _UsageError("svg export requires a two-dimensional body")
    if fmt == "obj" and body.dim != 3:
        raise _UsageError("obj export requires a three-dimensional body")
    if fmt == "svg":
        write_median_svg(out, body, frame, max(resolution, 65),
                         _solver_config(args))
    elif fmt == "obj":
        write_median_obj(out, body, frame, resolution)
    elif fmt == "csv":
        write_median_csv(out, body, frame, resolution)
    else:  # json: raw samples
        obj = []
        for axis in range(body.dim):
            mesh = median_mesh(body, frame, axis, resolution)
            obj.append({
                "axis": axis,
                "samples": [{"y": s.y.tolist(),
                             "classification": s.classification.kind,
                             "point": None if s.point is None
                             else s.point.tolist()}
                            for s in mesh.samples]})
        _write_json(out, obj)
    print(f"exported median samples ({fmt}) to {out}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "inscribe":
            return cmd_inscribe(args)
        if args.command == "diagnose":
            return cmd_diagnose(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        return cmd_export_median(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InrhombError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
