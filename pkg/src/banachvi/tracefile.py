"""CSV serialization of iterate traces.

Vectors are written as semicolon-joined coordinates with 17 significant
digits, which round-trips IEEE doubles exactly. Cells that do not apply to
an algorithm are left empty.
"""

import csv
import io

import numpy as np

HEADER = ["n", "x", "y", "z", "w", "u", "lambda", "step_norm", "xy_residual",
          "phi_to_solution"]


def fmt_float(v):
    return "" if v is None else "%.17g" % v


def fmt_vec(v):
    return "" if v is None else ";".join("%.17g" % c for c in np.atleast_1d(v))


def parse_vec(cell):
    return None if cell == "" else np.array([float(c) for c in cell.split(";")])


def parse_float(cell):
    return None if cell == "" else float(cell)


def trace_rows(trace):
    for r in trace.rows:
        yield [str(r.n), fmt_vec(r.x), fmt_vec(r.y), fmt_vec(r.z), fmt_vec(r.w),
               fmt_vec(r.u), fmt_float(r.lam), fmt_float(r.step_norm),
               fmt_float(r.xy_residual), fmt_float(r.phi_to_solution)]


def dumps(trace):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    w.writerows(trace_rows(trace))
    return buf.getvalue()


def write(trace, path):
    with open(path, "w", newline="") as fh:
        fh.write(dumps(trace))


def loads(text):
    """Parse a trace CSV into a list of dicts keyed by the header."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != HEADER:
        raise ValueError(f"unexpected trace header {header}")
    rows = []
    for cells in reader:
        d = dict(zip(header, cells))
        rows.append({
            "n": int(d["n"]),
            **{k: parse_vec(d[k]) for k in ("x", "y", "z", "w", "u")},
            **{k: parse_float(d[k]) for k in ("lambda", "step_norm", "xy_residual",
                                              "phi_to_solution")},
        })
    return rows


def read(path):
    with open(path, newline="") as fh:
        return loads(fh.read())


def dumps_compare(traces):
    """One CSV aligned by n with step_norm and phi_to_solution per algorithm."""
    header = ["n"]
    for t in traces:
        header += [f"{t.algorithm}_step_norm", f"{t.algorithm}_phi_to_solution"]
    n_max = max((t.iterations for t in traces), default=0)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for i in range(n_max):
        line = [str(i + 1)]
        for t in traces:
            if i < t.iterations:
                r = t.rows[i]
                line += [fmt_float(r.step_norm), fmt_float(r.phi_to_solution)]
            else:
                line += ["", ""]
        w.writerow(line)
    return buf.getvalue()
