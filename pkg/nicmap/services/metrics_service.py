import csv
import io
import logging
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

from pydantic import ValidationError

from nicmap.core.exceptions import ReportError, SchemaError
from nicmap.core.logging_config import log_report
from nicmap.core.units import ns_to_ms, ns_to_s
from nicmap.models.simulation import RawResults, ServerKind
from nicmap.schemas.metrics_schema import ComparisonDocument, Improvement, MetricName, MetricsReport
from nicmap.schemas.run_schema import OutputFormat, WaitingScope

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["workload", "strategy", "total_waiting_ms", "workload_finish_s", "total_job_finish_s"]
BEST_BASELINE = "best"


class MetricsService:

    @staticmethod
    def aggregate(
        raw: RawResults,
        workload: str = "",
        strategy: str = "",
        scope: WaitingScope = WaitingScope.ALL,
    ) -> MetricsReport:
        """Fold one run into waiting, finish times and per-server utilization."""
        total_waiting = 0
        utilization: Dict[str, float] = {}
        peak_queue: Dict[str, int] = {}
        for key, server in raw.servers.items():
            if not (scope is WaitingScope.NIC_MEM and key.kind is ServerKind.CACHE):
                total_waiting += server.waiting_total
            utilization[server.label] = server.busy_total / raw.horizon if raw.horizon else 0.0
            peak_queue[server.label] = server.peak_queue

        per_job: Dict[int, int] = {job: 0 for job in raw.jobs}
        for (job, _), finished in raw.completion.items():
            if finished > per_job[job]:
                per_job[job] = finished

        return MetricsReport(
            workload=workload,
            strategy=strategy,
            total_waiting=total_waiting,
            per_job_finish=per_job,
            workload_finish=max(per_job.values(), default=0),
            total_job_finish=sum(per_job.values()),
            per_server_utilization=utilization,
            peak_queue=peak_queue,
            messages=raw.message_count,
        )

    @staticmethod
    def improvement(new: MetricsReport, baseline: MetricsReport, metric: MetricName) -> Optional[float]:
        """Percent reduction of `metric` against the baseline; None when the baseline is 0."""
        reference = baseline.metric(metric)
        if reference == 0:
            return None
        return 100.0 * (reference - new.metric(metric)) / reference

    @staticmethod
    def improvement_table(reports: Sequence[MetricsReport], candidate: str = "new") -> List[Improvement]:
        """Candidate against every other strategy of the same workload, and against the best of them."""
        by_workload: Dict[str, List[MetricsReport]] = defaultdict(list)
        for report in reports:
            by_workload[report.workload].append(report)

        table: List[Improvement] = []
        for workload in sorted(by_workload):
            group = by_workload[workload]
            mine = next((r for r in group if r.strategy == candidate), None)
            baselines = sorted((r for r in group if r.strategy != candidate), key=lambda r: r.strategy)
            if mine is None or not baselines:
                continue
            for metric in MetricName:
                for baseline in baselines:
                    table.append(Improvement(
                        metric=metric,
                        candidate=candidate,
                        baseline=baseline.strategy,
                        percent=MetricsService.improvement(mine, baseline, metric),
                    ))
                best = min(baselines, key=lambda r: (r.metric(metric), r.strategy))
                table.append(Improvement(
                    metric=metric,
                    candidate=candidate,
                    baseline=BEST_BASELINE,
                    percent=MetricsService.improvement(mine, best, metric),
                ))
        return table

    @staticmethod
    def render_improvements(improvements: Sequence[Improvement]) -> str:
        lines = []
        for item in improvements:
            value = "n/a" if item.percent is None else f"{item.percent:+.2f}%"
            lines.append(f"{item.metric.value:<17} {item.candidate} vs {item.baseline:<8} {value}")
        return "\n".join(lines)

    @staticmethod
    def to_csv(reports: Sequence[MetricsReport]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for report in reports:
            writer.writerow([
                report.workload,
                report.strategy,
                f"{ns_to_ms(report.total_waiting):.6f}",
                f"{ns_to_s(report.workload_finish):.9f}",
                f"{ns_to_s(report.total_job_finish):.9f}",
            ])
        return buffer.getvalue()

    @staticmethod
    def emit(
        reports: Sequence[MetricsReport],
        fmt: OutputFormat = OutputFormat.CSV,
        sink: Union[str, Path, None] = None,
        improvements: Optional[Sequence[Improvement]] = None,
    ) -> str:
        """Render the reports as CSV or JSON; write them to `sink` when one is given."""
        if not reports:
            raise ValueError("at least one report is needed")
        fmt = OutputFormat(fmt)
        if fmt is OutputFormat.CSV:
            document = MetricsService.to_csv(reports)
        else:
            comparison = ComparisonDocument(reports=list(reports), improvements=list(improvements or []))
            document = comparison.model_dump_json(indent=2) + "\n"

        if sink is not None:
            try:
                Path(sink).write_text(document, encoding="utf-8")
            except OSError as e:
                raise ReportError(str(sink), e.strerror or str(e)) from e
            log_report(str(sink), len(reports), fmt.value)
        return document

    @staticmethod
    def load_reports(document: Union[str, Path, dict]) -> ComparisonDocument:
        """Parse a JSON comparison document (text, path or mapping)."""
        source = None
        if isinstance(document, Path) or (isinstance(document, str) and not document.lstrip().startswith("{")):
            source = str(document)
            try:
                document = Path(document).read_text(encoding="utf-8")
            except OSError as e:
                raise SchemaError("", f"cannot read report: {e.strerror or e}", source) from e
        try:
            if isinstance(document, str):
                return ComparisonDocument.model_validate_json(document)
            return ComparisonDocument.model_validate(document)
        except ValidationError as e:
            raise SchemaError.from_validation(e, source) from e
