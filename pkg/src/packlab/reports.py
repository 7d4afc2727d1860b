"""Deterministic CSV reports, run manifests, and figure rendering.

CSV cells format floats to 17 significant digits with LF line endings and
a stable row order, so identical runs produce identical bytes.  The run id
hashes the command, the content-relevant parameters, and the input file
digests (not the output location); every report row carries it.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def fmt_value(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_value(x) for x in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    tool_version: str
    parameters: dict = field(default_factory=dict)
    inputs: list = field(default_factory=list)    # (digest, path) pairs
    outputs: list = field(default_factory=list)   # (digest, path) pairs

    def add_input(self, path) -> None:
        self.inputs.append((sha256_file(path), os.path.basename(str(path))))

    def add_output(self, path) -> None:
        self.outputs.append((sha256_file(path), os.path.basename(str(path))))

    def run_id(self) -> str:
        h = hashlib.sha256()
        h.update(f"command {self.command}\n".encode())
        h.update(f"tool packlab {self.tool_version}\n".encode())
        for k in sorted(self.parameters):
            h.update(f"param {k}={self.parameters[k]}\n".encode())
        for digest, name in sorted(self.inputs):
            h.update(f"input {digest} {name}\n".encode())
        return h.hexdigest()[:16]

    def write(self, path) -> None:
        lines = [
            "manifest 1",
            f"command {self.command}",
            f"tool packlab {self.tool_version}",
        ]
        for k in sorted(self.parameters):
            lines.append(f"param {k}={self.parameters[k]}")
        for digest, name in sorted(self.inputs):
            lines.append(f"input {digest} {name}")
        lines.append(f"run_id {self.run_id()}")
        for digest, name in sorted(self.outputs):
            lines.append(f"output {digest} {name}")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def _save(fig, path):
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def figure_loglog_fit(path, xs, ys, fit, xlabel, ylabel, title) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(xs, ys, "o", color="tab:blue")
    grid = [min(xs), max(xs)]
    ax.loglog(grid, [fit.predict(x) for x in grid], "-", color="tab:orange",
              label=f"slope {fit.exponent:.3f} (r2 {fit.r_squared:.4f})")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def figure_series(path, xs, ys, xlabel, ylabel, title, logx=False, logy=False) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(xs, ys, "o-", color="tab:blue")
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


def figure_scatter(path, xs, ys, xlabel, ylabel, title, hline=None,
                   staircase=None, logx=False, logy=False) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(xs, ys, ".", color="tab:blue", alpha=0.7)
    if staircase:
        sx, sy = zip(*staircase)
        ax.step(sx, sy, where="post", color="tab:orange", label="lower envelope")
        ax.legend()
    if hline is not None:
        ax.axhline(hline, color="tab:red", linestyle="--")
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)
