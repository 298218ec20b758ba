import csv
from io import StringIO
import logging
import math
from typing import Optional

from django.core.files.base import ContentFile
from django.core.files.storage import FileSystemStorage, Storage, storages
import numpy as np

from .constants import SUMMARY_COLUMNS
from .runners import ExperimentReport, Table


logger = logging.getLogger(__name__)


def format_value(value) -> str:
    """Locale-free text for a CSV cell; floats keep their shortest round-trip form."""
    if value is None:
        return ''
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return repr(value)
    return str(value)


def json_safe(summary: dict) -> dict:
    """Summary values for a JSONField: non-finite floats become their CSV text."""
    safe = {}
    for key, value in summary.items():
        if isinstance(value, np.generic):
            value = value.item()
        if isinstance(value, float) and not math.isfinite(value):
            value = format_value(value)
        safe[key] = value
    return safe


def render_table(columns: list, rows: list) -> str:
    buffer = StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(column)) for column in columns])
    return buffer.getvalue()


def table_file_name(name: str, table: Table) -> str:
    return f'{name}_{table.name}.csv' if table.name else f'{name}.csv'


def report_storage(output: Optional[str] = None) -> Storage:
    if output:
        return FileSystemStorage(location=output)
    return storages['reports']


def _save(storage: Storage, file_name: str, content: str) -> str:
    # reruns overwrite instead of getting a suffixed name
    if storage.exists(file_name):
        storage.delete(file_name)
    return storage.save(file_name, ContentFile(content.encode('utf-8')))


def write_report(report: ExperimentReport, output: Optional[str] = None) -> list[str]:
    """Writes every table and the summary as UTF-8 CSV; returns the stored names."""
    storage = report_storage(output)
    written = []
    for table in report.tables:
        file_name = table_file_name(report.name, table)
        written.append(_save(storage, file_name, render_table(table.columns, table.rows)))

    summary = [{'quantity': key, 'value': value} for key, value in report.summary.items()]
    written.append(
        _save(storage, f'{report.name}_summary.csv', render_table(SUMMARY_COLUMNS, summary))
    )

    logger.info(f'wrote {len(written)} CSV files for {report.name} to {storage.location}')
    return written
