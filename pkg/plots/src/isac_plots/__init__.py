"""Chart rendering for feedback-design sweep CSVs."""

from .render import (
    EmptyDataError,
    PlotSpec,
    SchemaError,
    group_series,
    load_table,
    render,
)

__version__ = "0.1.0"
