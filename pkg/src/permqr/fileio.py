"""Text formats: matrix files, ensemble config files, and CSV reports.

Matrix file::

    4
    2.0 1.0 0.0 0.0
    ...

First line is the order N, followed by N whitespace-separated rows.  Blank
lines and ``#`` comments are ignored.

Config file: flat ``key = value`` lines with keys ``order``, ``count``,
``iterations``, ``class``, ``algorithms`` (comma list), ``seed``,
``threshold`` and ``out``.
"""

import numpy as np

from .ensemble import EnsembleConfig, EnsembleReport, MatrixClass
from .iteration import Algorithm
from .linalg import as_symmetric, off_diagonal_norm

CONFIG_KEYS = ("order", "count", "iterations", "class", "algorithms", "seed", "threshold", "out")


class FormatError(ValueError):
    """Malformed matrix, config or report file."""


def fmt(x):
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


def _content_lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_matrix(text):
    lines = list(_content_lines(text))
    if not lines:
        raise FormatError("empty matrix file")
    lineno, first = lines[0]
    try:
        n = int(first)
    except ValueError:
        raise FormatError(f"line {lineno}: expected the order N, got {first!r}") from None
    if n < 1:
        raise FormatError(f"line {lineno}: order must be positive")
    rows = lines[1:]
    if len(rows) != n:
        raise FormatError(f"expected {n} rows, found {len(rows)}")
    data = []
    for lineno, line in rows:
        try:
            row = [float(tok) for tok in line.split()]
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
        if len(row) != n:
            raise FormatError(f"line {lineno}: expected {n} entries, found {len(row)}")
        data.append(row)
    try:
        return as_symmetric(np.array(data))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def read_matrix(path):
    with open(path) as fh:
        return parse_matrix(fh.read())


def format_matrix(a):
    a = np.asarray(a, dtype=float)
    lines = [str(a.shape[0])]
    lines += [" ".join(fmt(x) for x in row) for row in a]
    return "\n".join(lines) + "\n"


def write_matrix(path, a):
    with open(path, "w") as fh:
        fh.write(format_matrix(a))


def parse_config(text):
    """Parse a config file into ``(EnsembleConfig, out_path_or_None)``."""
    raw = {}
    for lineno, line in _content_lines(text):
        if "=" not in line:
            raise FormatError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in CONFIG_KEYS:
            raise FormatError(f"line {lineno}: unknown key {key!r} (allowed: {', '.join(CONFIG_KEYS)})")
        if key in raw:
            raise FormatError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    kwargs = {}
    try:
        for key in ("order", "count", "iterations", "seed"):
            if key in raw:
                kwargs[key] = int(raw[key])
        if "threshold" in raw:
            kwargs["threshold"] = float(raw["threshold"])
        if "class" in raw:
            kwargs["matrix_class"] = MatrixClass.parse(raw["class"])
        if "algorithms" in raw:
            kwargs["algorithms"] = tuple(Algorithm.parse(tok) for tok in raw["algorithms"].split(",") if tok.strip())
        cfg = EnsembleConfig(**kwargs)
    except ValueError as exc:
        raise FormatError(f"invalid config: {exc}") from None
    return cfg, raw.get("out") or None


def read_config(path):
    with open(path) as fh:
        return parse_config(fh.read())


def format_report(report):
    cfg = report.config
    labels = report.labels
    out = [
        "# permqr ensemble report",
        f"# seed={cfg.seed}",
        f"# order={cfg.order}",
        f"# count={cfg.count}",
        f"# iterations={cfg.iterations}",
        f"# class={cfg.matrix_class.value}",
        f"# threshold={fmt(cfg.threshold)}",
        f"# algorithms={','.join(labels)}",
        f"# included={report.included}",
        f"# excluded={report.excluded}",
        f"# rejected={report.rejected}",
        "# failures=" + ",".join(f"{k}:{v}" for k, v in report.failures.items()),
        "k," + ",".join(labels),
    ]
    for k in range(cfg.iterations + 1):
        out.append(str(k) + "," + ",".join(fmt(report.means[lab][k]) for lab in labels))
    return "\n".join(out) + "\n"


def parse_report(text):
    """Inverse of :func:`format_report`."""
    meta = {}
    header = None
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                meta[key.strip()] = value.strip()
        elif header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    if header is None or header[0] != "k":
        raise FormatError("missing 'k,...' header row")
    labels = header[1:]
    cols = np.array([[float(x) for x in r[1:]] for r in rows]).reshape(len(rows), len(labels))
    failures = {}
    if meta.get("failures"):
        for item in meta["failures"].split(","):
            k, v = item.split(":")
            failures[k] = int(v)
    cfg = EnsembleConfig(
        order=int(meta["order"]),
        count=int(meta["count"]),
        iterations=int(meta["iterations"]),
        matrix_class=MatrixClass.parse(meta["class"]),
        algorithms=tuple(Algorithm.parse(lab) for lab in labels),
        seed=int(meta["seed"]),
        threshold=float(meta["threshold"]),
    )
    means = {lab: cols[:, i].copy() for i, lab in enumerate(labels)}
    return EnsembleReport(cfg, means, int(meta["included"]), int(meta["excluded"]),
                          int(meta["rejected"]), failures)


def format_trace(trace):
    """Per-iteration CSV for a single run: ``k,e_squared,off_diagonal_norm``."""
    out = [f"# algorithm={trace.algorithm.label}"]
    if trace.tag is not None:
        out.append(f"# tag={trace.tag}")
    if trace.failure is not None:
        out.append(f"# failure={trace.failure}")
    out.append("k,e_squared,off_diagonal_norm")
    for state, err in zip(trace.states, trace.errors):
        out.append(f"{state.k},{fmt(err)},{fmt(off_diagonal_norm(state.a))}")
    return "\n".join(out) + "\n"
