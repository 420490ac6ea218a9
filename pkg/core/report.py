"""
报告输出
文本报告为 YAML 文档 (12 位有效数字)，可被材料文件解析器读回；表格输出为 CSV (LF 换行)。
输出中不含时间戳等易变信息，相同输入产生逐字节相同的结果。
"""
import csv
import io
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import yaml

from core.tensor_core import Coupling3, StiffnessVoigt, Tensor4Full

SIGNIFICANT_DIGITS = 12


def round_float(x: float) -> float:
    value = float(f"{float(x):.{SIGNIFICANT_DIGITS}g}")
    # 避免输出 -0.0
    return 0.0 if value == 0.0 else value


def to_plain(value: Any) -> Any:
    """转换为 YAML 可序列化的纯 Python 数据"""
    if isinstance(value, StiffnessVoigt):
        return to_plain(value.entries)
    if isinstance(value, Coupling3):
        return to_plain(value.entries)
    if isinstance(value, Tensor4Full):
        return to_plain(value.matrix)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return round_float(value)
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    return value


def format_cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(round_float(value))
    return str(value)


def csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buffer.getvalue()


def _flatten(prefix: str, value: Any, out: List[List[Any]]) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append([prefix, value])


@dataclass
class Report:
    """命令回显、输入摘要、结果、诊断与退出状态"""
    command: str
    inputs: List[Dict[str, str]] = field(default_factory=list)
    results: Dict[str, Any] = field(default_factory=dict)
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    status: int = 0
    table: Optional[List[List[Any]]] = None
    table_header: Optional[List[str]] = None

    def add_input(self, path: str, digest: str) -> None:
        self.inputs.append({"path": path, "sha256": digest})

    def to_dict(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {"command": self.command, "inputs": self.inputs}
        doc.update(self.results)
        if self.table is not None:
            doc["table"] = {"header": self.table_header, "rows": self.table}
        doc["diagnostics"] = self.diagnostics
        doc["status"] = self.status
        return to_plain(doc)

    def to_text(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None, allow_unicode=True)

    def to_csv(self) -> str:
        """有表格时输出表格，否则输出扁平化的 key,value 行"""
        if self.table is not None:
            return csv_text(self.table_header, self.table)
        rows: List[List[Any]] = []
        _flatten("", self.to_dict(), rows)
        return csv_text(["key", "value"], rows)

    def render(self, output: str) -> str:
        return self.to_csv() if output == "csv" else self.to_text()
