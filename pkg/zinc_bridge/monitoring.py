from typing import List, Optional, Type, cast

from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile
from prometheus_client.context_managers import ExceptionCounter
from prometheus_client.metrics import MetricWrapperBase

from zinc_bridge.utils import Timer

NAMESPACE = "zinc_bridge"
RELATIVE_ERROR_BUCKETS = (1e-6, 1e-3, 1e-1, 1.0, 10.0, float("inf"))


class Monitor:
    def __init__(self, namespace: str = NAMESPACE) -> None:
        self.namespace = namespace
        self.registry = CollectorRegistry()

    def _create_metric(
        self,
        metric_class: Type[MetricWrapperBase],
        name: str,
        documentation: str,
        labelnames: Optional[List[str]] = None,
        **kwargs: object,
    ) -> MetricWrapperBase:
        return metric_class(
            name=name,
            namespace=self.namespace,
            documentation=documentation,
            labelnames=labelnames or [],
            registry=self.registry,
            **kwargs,
        )

    def count_exceptions(self, subcommand: str) -> ExceptionCounter:
        if not hasattr(self, "_exception_counter"):
            self._exception_counter = self._create_metric(
                Counter,
                "exception_total",
                "Total number of failed runs",
                ["subcommand"],
            )
        return cast(
            Counter, self._exception_counter.labels(subcommand)
        ).count_exceptions()

    def time_stage(self, stage: str) -> Timer:
        if not hasattr(self, "_stage_duration"):
            self._stage_duration = self._create_metric(
                Histogram,
                "stage_duration_seconds",
                "Pipeline stage duration in seconds",
                ["stage"],
            )

        def observe(duration: float) -> None:
            cast(Histogram, self._stage_duration.labels(stage)).observe(duration)

        return Timer(observe)

    def observe_verdict(self, verdict: str, delta: Optional[float] = None) -> None:
        if not hasattr(self, "_verdicts"):
            self._verdicts = self._create_metric(
                Counter, "verdict_total", "Oracle verdicts by class", ["verdict"]
            )
            self._relative_error = self._create_metric(
                Histogram,
                "relative_error",
                "Relative error between reference and candidate optima",
                buckets=RELATIVE_ERROR_BUCKETS,
            )
        cast(Counter, self._verdicts.labels(verdict)).inc()
        if delta is not None:
            cast(Histogram, self._relative_error).observe(delta)

    def write(self, path: str) -> None:
        write_to_textfile(path, self.registry)
