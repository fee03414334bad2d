from .sessions import (
    ExperimentSettings,
    ExploreSettings,
    PointerEvent,
    SessionCore,
    SessionError,
    SessionRegistry,
    quantize_pointer_events,
    tick_ms,
)

__all__ = [
    "ExperimentSettings",
    "ExploreSettings",
    "PointerEvent",
    "SessionCore",
    "SessionError",
    "SessionRegistry",
    "quantize_pointer_events",
    "tick_ms",
]
