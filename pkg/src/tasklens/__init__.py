"""tasklens: batch analytics for code-completion telemetry logs.

Ingests JSONL event logs from an Ansible-task completion service and reports
usage profiles, N-day retention, acceptance and strong-acceptance rates,
line-level edit analysis of accepted suggestions, module-edit categories, and
user-feedback aggregates.
"""

from .config import BadConfig, Config, load_config
from .events import (
    RawEvent,
    UserTimeline,
    build_timelines,
    deduplicate,
    local_date,
    parse_event_line,
    read_events,
)
from .gestalt import (
    MatchingBlock,
    SimilarityRatio,
    edit_fraction,
    find_longest_match,
    matching_blocks,
    similarity_ratio,
)
from .metrics import (
    AcceptanceSummary,
    RetentionCurve,
    TemporalProfile,
    acceptance_summary,
    retention_curve,
    returning_user_cohort,
    strong_acceptance_rate,
    temporal_profile,
)
from .report import AnalysisReport, render_report, run_pipeline
from .taskparse import AnsibleTask, ModuleName, parse_module_name, parse_tasks, short_name

__version__ = "0.1.0"

__all__ = [
    "AcceptanceSummary",
    "AnalysisReport",
    "AnsibleTask",
    "BadConfig",
    "Config",
    "MatchingBlock",
    "ModuleName",
    "RawEvent",
    "RetentionCurve",
    "SimilarityRatio",
    "TemporalProfile",
    "UserTimeline",
    "acceptance_summary",
    "build_timelines",
    "deduplicate",
    "edit_fraction",
    "find_longest_match",
    "load_config",
    "local_date",
    "matching_blocks",
    "parse_event_line",
    "parse_module_name",
    "parse_tasks",
    "read_events",
    "render_report",
    "retention_curve",
    "returning_user_cohort",
    "run_pipeline",
    "short_name",
    "similarity_ratio",
    "strong_acceptance_rate",
    "temporal_profile",
]
