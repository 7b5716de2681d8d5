# cli/io.py
"""
CLI 的文件边界：信道 JSON、CSV 数据表与运行清单 (RunManifest)。
数值模块不接触文件，所有序列化都集中在这里。
"""
import csv
import json
import logging
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from eit_secrecy import __version__
from eit_secrecy.channels import WiretapChannel
from eit_secrecy.core.errors import ChannelFileError
from eit_secrecy.probability import Pmf, TransitionMatrix, to_units

logger = logging.getLogger(__name__)

CSV_SCHEMA = "v1"


class ChannelFile(BaseModel):
    """信道文件：矩阵按行存储，行对应输出符号（output-major）。"""

    nx: int = Field(ge=2)
    ny: int = Field(ge=2)
    nz: int = Field(ge=2)
    px: list[float]
    bob: list[list[float]]
    eve: list[list[float]]

    @model_validator(mode="after")
    def _shapes(self):
        if len(self.px) != self.nx:
            raise ValueError(f"px has {len(self.px)} entries, expected nx={self.nx}")
        for label, rows, n_out in (("bob", self.bob, self.ny), ("eve", self.eve, self.nz)):
            if len(rows) != n_out or any(len(row) != self.nx for row in rows):
                raise ValueError(f"{label} must be a {n_out}x{self.nx} matrix (outputs x inputs)")
        return self

    @classmethod
    def from_channel(cls, wc: WiretapChannel) -> "ChannelFile":
        return cls(
            nx=wc.nx, ny=wc.ny, nz=wc.nz,
            px=wc.px.probs.tolist(), bob=wc.bob.entries.tolist(), eve=wc.eve.entries.tolist(),
        )

    def to_channel(self) -> WiretapChannel:
        return WiretapChannel(
            px=Pmf(np.array(self.px)),
            bob=TransitionMatrix(np.array(self.bob)),
            eve=TransitionMatrix(np.array(self.eve)),
        )


def load_channel(path: str | Path) -> WiretapChannel:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ChannelFileError(f"cannot read channel file {path}: {e}") from e
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise ChannelFileError(f"{path}: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    try:
        model = ChannelFile.model_validate(payload)
    except ValidationError as e:
        raise ChannelFileError(f"{path}: invalid channel description: {e}") from e
    return model.to_channel()


def save_channel(wc: WiretapChannel, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(ChannelFile.from_channel(wc).model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info("✅ Channel written to %s", path)
    return path


class RunManifest(BaseModel):
    command: str
    params: dict[str, Any] = Field(default_factory=dict)
    version: str = __version__
    seeds: dict[str, int] = Field(default_factory=dict)
    outputs: list[str] = Field(default_factory=list)
    created_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))


def write_manifest(manifest: RunManifest, out_dir: str | Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{manifest.command.replace(' ', '_')}_manifest.json"
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return "nan" if math.isnan(value) else format(float(value), ".12g")
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def in_units(rows: list[dict[str, Any]], columns: tuple[str, ...], units: str) -> list[dict[str, Any]]:
    """把指定列从 nats 换算到输出单位；只在写文件前调用。"""
    out = []
    for row in rows:
        row = dict(row)
        for key in columns:
            if isinstance(row.get(key), (int, float)) and not isinstance(row[key], bool):
                row[key] = to_units(float(row[key]), units)
        out.append(row)
    return out


def write_csv(rows: list[dict[str, Any]], path: str | Path) -> Path:
    """首行为带时间戳的注释，其后是表头与数据，浮点数保留 12 位有效数字。"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header: list[str] = []
    for row in rows:
        header.extend(key for key in row if key not in header)
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"# generated {stamp} schema={CSV_SCHEMA}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(row.get(key)) for key in header])
    logger.info("✅ Wrote %d rows to %s", len(rows), path)
    return path


def run_params(args) -> dict[str, Any]:
    """argparse 命名空间 → 可写入清单的参数字典。"""
    out = {}
    for key, value in sorted(vars(args).items()):
        if callable(value):
            continue
        out[key] = str(value) if isinstance(value, Path) else value
    return out


def finish_run(
    args,
    command: str,
    tables: dict[str, list[dict[str, Any]]],
    seeds: dict[str, int] | None = None,
) -> list[Path]:
    """把若干数据表写成 <output-dir>/<name>.csv，并在同一目录写运行清单。"""
    out_dir = Path(args.output_dir)
    paths = [write_csv(rows, out_dir / f"{name}.csv") for name, rows in tables.items()]
    manifest = RunManifest(
        command=command, params=run_params(args), seeds=seeds or {}, outputs=[str(p) for p in paths]
    )
    write_manifest(manifest, out_dir)
    return paths
