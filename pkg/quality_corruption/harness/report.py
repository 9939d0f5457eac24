# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import csv
import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union
from . import harness_mapping
from ..exceptions import ConfigurationError, SchemaError
from ..metrics import metrics_mapping

logger = logging.getLogger(__name__)

_METADATA_PREFIX = '# metadata: '


def _columns(rows: Sequence[dict]) -> List[str]:
    columns = list(metrics_mapping.report_columns)
    present = set().union(*(row.keys() for row in rows))
    columns.extend(column for column in harness_mapping.report_extra_columns if column in present)
    return columns


def _plain(value):
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def _typed(column: str, value):
    kind = harness_mapping.report_column_types.get(column, str)
    if value is None or value == '':
        return math.nan if kind is float else None
    if kind is bool:
        return value if isinstance(value, bool) else value == 'True'
    return kind(value)


def sort_key(row: dict) -> Tuple[str, str, float]:
    return (str(row['model']), str(row['norm']), float(row['eps']))


def render_table(rows: Sequence[dict]) -> str:
    """Text table with one line per row, sorted by (model, norm, eps)."""
    header = [title for title, _, _ in metrics_mapping.text_table_columns]
    lines = []
    for row in sorted(rows, key=sort_key):
        line = []
        for _, column, pattern in metrics_mapping.text_table_columns:
            value = row.get(column)
            if value is None or (isinstance(value, float) and math.isnan(value)):
                line.append('n/a')
            else:
                line.append(pattern.format(value))
        lines.append(line)
    widths = [max(len(cell) for cell in column) for column in zip(header, *lines)]
    rendered = ['  '.join(cell.ljust(width) for cell, width in zip(header, widths)).rstrip()]
    rendered.append('  '.join('-' * width for width in widths))
    rendered.extend('  '.join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip() for line in lines)
    return '\n'.join(rendered) + '\n'


class ReportWriter():
    def __init__(self, rows: Sequence[dict], metadata: Optional[dict] = None):
        if not rows:
            raise ConfigurationError('Cannot write a report without rows.')
        self._rows = list(rows)
        self._metadata = metadata or {}
        self._columns = _columns(self._rows)

    def write(self, path: Union[str, Path], fmt: Optional[str] = None) -> Path:
        path = Path(path)
        fmt = fmt or path.suffix.lstrip('.')
        if fmt not in harness_mapping.report_formats:
            raise ConfigurationError(f'Unknown report format: {fmt}')
        path.parent.mkdir(parents=True, exist_ok=True)
        getattr(self, harness_mapping.report_formats[fmt])(path)
        logger.info('Wrote %d report rows to %s', len(self._rows), path)
        return path

    def _write_csv(self, path: Path):
        with open(path, 'wt', encoding='utf-8', newline='') as f:
            f.write(f'{_METADATA_PREFIX}{json.dumps(self._metadata, sort_keys=True)}\n')
            writer = csv.DictWriter(f, fieldnames=self._columns, extrasaction='ignore')
            writer.writeheader()
            for row in self._rows:
                writer.writerow({column: _plain(row.get(column)) for column in self._columns})

    def _write_json(self, path: Path):
        document = {
            'metadata': self._metadata,
            'columns': self._columns,
            'rows': [{column: _plain(row.get(column)) for column in self._columns} for row in self._rows]
        }
        with open(path, 'wt', encoding='utf-8') as f:
            json.dump(document, f, indent=2, sort_keys=True)

    def _write_text(self, path: Path):
        with open(path, 'wt', encoding='utf-8') as f:
            for key in sorted(self._metadata):
                f.write(f'# {key}: {json.dumps(self._metadata[key], sort_keys=True)}\n')
            f.write(render_table(self._rows))


def emit_report(rows: Sequence[dict], path: Union[str, Path], fmt: Optional[str] = None,
                metadata: Optional[dict] = None) -> Path:
    return ReportWriter(rows, metadata).write(path, fmt)


def read_report(path: Union[str, Path]) -> Tuple[dict, List[Dict[str, object]]]:
    """Metadata and typed rows of a CSV or JSON report."""
    path = Path(path)
    if path.suffix == '.json':
        with open(path, 'rt', encoding='utf-8') as f:
            document = json.load(f)
        if 'rows' not in document:
            raise SchemaError(f'{path} is not a report')
        rows = document['rows']
        metadata = document.get('metadata', {})
    else:
        with open(path, 'rt', encoding='utf-8', newline='') as f:
            first = f.readline()
            if not first.startswith(_METADATA_PREFIX):
                raise SchemaError(f'{path} misses its metadata line')
            metadata = json.loads(first[len(_METADATA_PREFIX):])
            rows = list(csv.DictReader(f))
    typed = []
    for index, row in enumerate(rows):
        missing = [column for column in metrics_mapping.report_columns if column not in row]
        if missing:
            raise SchemaError(f'report row misses {missing}', index)
        typed.append({column: _typed(column, value) for column, value in row.items()})
    return metadata, typed
