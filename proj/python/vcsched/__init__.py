from ._core import (
    breakpoint_distance,
    contact_survival,
    generate_dag,
    metrics_csv_header,
    path_loss,
    run_single_trial,
    run_sweep,
    transmission_time,
)

__all__ = [
    "breakpoint_distance",
    "contact_survival",
    "generate_dag",
    "metrics_csv_header",
    "path_loss",
    "run_single_trial",
    "run_sweep",
    "transmission_time",
]
