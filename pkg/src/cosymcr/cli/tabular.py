import os
import re
import json
import hashlib
import logging
import numbers

import pandas as pd

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ("csv", "parquet", "jsonl")


class ReportTabulator:
    """
    Collects the verdicts of ``verify`` and ``estimate-kmn`` runs in one table.

    Every check record (check name, passed, max residual, worst point) and every
    fitted (κ, μ, ν) point becomes a row tagged with the command, structure and
    source it came from.
    """

    def __init__(self, depth_cutoff=3, output_format="csv", output_dir="data"):
        """
        :param depth_cutoff: Nesting level below which record fields (residual families, notes) stay JSON text.
        :param output_format: One of csv, parquet or jsonl.
        :param output_dir: Base directory; tables go to its ``tabular`` subdirectory.
        """
        if output_format.lower() not in OUTPUT_FORMATS:
            raise ValueError(f"Unsupported output format '{output_format}'.")
        self.depth_cutoff = depth_cutoff
        self.output_format = output_format.lower()
        self.output_dir = os.path.join(output_dir, "tabular")

    def flatten(self, obj, parent_key="", depth=0):
        """
        Column values for one check or fitted-point record. The worst point becomes
        point.0, point.1, ...; undetermined names are joined with commas.
        """
        if isinstance(obj, dict) and depth < self.depth_cutoff:
            row = {}
            for key, value in obj.items():
                new_key = f"{parent_key}.{key}" if parent_key else str(key)
                row.update(self.flatten(value, new_key, depth + 1))
            return row
        if isinstance(obj, list) and all(isinstance(v, numbers.Number) and not isinstance(v, bool) for v in obj):
            return {f"{parent_key}.{k}": v for k, v in enumerate(obj)}
        if isinstance(obj, list) and all(isinstance(v, str) for v in obj):
            return {parent_key: ",".join(obj)}
        if isinstance(obj, (dict, list)):
            return {parent_key: json.dumps(obj, sort_keys=True)}
        return {parent_key: obj}

    def rows(self, report):
        """Rows of one report: its 'checks' or 'points' records, tagged with the report's context."""
        context = {
            "command": report.get("command"),
            "structure": report.get("structure"),
            "source": report.get("source"),
        }
        records = report.get("checks") or report.get("points") or []
        return [dict(context, **self.flatten(record)) for record in records]

    def table_name(self, reports):
        """report_<structures>_<digest>, the digest taken over each row's check name, verdict and max residual."""
        structures = sorted({str(report.get("structure") or "unnamed") for report in reports})
        label = re.sub(r"[^A-Za-z0-9]+", "-", "+".join(structures)).strip("-")[:48] or "unnamed"
        verdicts = [
            [record.get("name", "kmn_point"), record.get("passed"), str(record.get("max_residual", record.get("residual")))]
            for report in reports
            for record in report.get("checks") or report.get("points") or []
        ]
        digest = hashlib.sha1(json.dumps(verdicts).encode()).hexdigest()[:12]
        return f"report_{label}_{digest}.{self.output_format}"

    def to_frame(self, reports):
        df = pd.DataFrame([row for report in reports for row in self.rows(report)])
        for column in df.columns:
            if df[column].dtype == object:
                df[column] = _normalise_column(df[column])
        return df

    def convert(self, json_paths):
        """
        Write the rows of every readable report file to one table. Missing files
        are skipped with a warning.
        :return: Path of the written table.
        """
        if not json_paths:
            raise ValueError("No input report files provided.")

        reports = []
        valid_paths = []
        for json_path in json_paths:
            if not json_path or not os.path.exists(json_path):
                logger.warning("Skipping missing report %s", json_path)
                continue
            valid_paths.append(json_path)
            with open(json_path, "r") as file:
                data = json.load(file)
            if "checks" not in data and "points" not in data:
                raise ValueError(f"Invalid report format in {json_path}: neither 'checks' nor 'points' present.")
            reports.append(data)

        if not valid_paths:
            raise ValueError("None of the input report files exist.")

        df = self.to_frame(reports)
        if df.empty:
            df = pd.DataFrame([{}])

        os.makedirs(self.output_dir, exist_ok=True)
        output_path = os.path.join(self.output_dir, self.table_name(reports))

        if self.output_format == "csv":
            df.to_csv(output_path, index=False)
        elif self.output_format == "parquet":
            df.to_parquet(output_path, index=False)
        else:
            df.to_json(output_path, orient="records", lines=True)

        logger.info("Wrote %d rows to %s", len(df), output_path)
        return output_path


def _normalise_column(series):
    """Numeric where possible ('inf' included), otherwise text with missing values kept."""
    try:
        return pd.to_numeric(series)
    except (ValueError, TypeError):
        return series.map(lambda value: value if value is None or isinstance(value, str) else json.dumps(value))
