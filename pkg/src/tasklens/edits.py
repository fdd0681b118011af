"""Join suggestion/action/content events into outcomes and classify the edits.

Each suggestion event is joined with its action (by suggestion id) and, for
accepted suggestions, the nearest subsequent content snapshot of the same
user.  The committed form of the task is located in that snapshot, diffed
line-wise against the shown task body, and the outcome classified by edit
fraction.  The user-authored name line never counts toward the diff.
"""

from __future__ import annotations

from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .config import Config
from .events import EventKind, RawEvent, UserAction, UserTimeline
from .gestalt import edit_fraction as gestalt_edit_fraction
from .gestalt import similarity_ratio
from .taskparse import (
    AnsibleTask,
    NotATaskShape,
    TaskParseError,
    canonical_options,
    parse_tasks,
    short_name,
)

# Directive keys whose addition counts as YAML reorganization.
REORG_DIRECTIVE_KEYS = frozenset({"block", "tags", "register", "loop", "become"})

COMMAND_SHELL_MODULES = frozenset({"command", "shell"})


class Category(Enum):
    FULLY_ACCEPTED = "fully_accepted"
    MINOR_EDIT = "minor_edit"
    MAJOR_EDIT = "major_edit"
    DELETED_AFTER_ACCEPT = "deleted_after_accept"
    UNRESOLVED = "unresolved"
    REJECTED = "rejected"
    IGNORED = "ignored"


class MinorSubcategory(Enum):
    VALUE_ONLY = "value_only"
    KEY_ONLY = "key_only"
    KEY_AND_VALUE = "key_and_value"
    OPTION_ADDED = "option_added"
    OPTION_REMOVED = "option_removed"
    MIXED = "mixed"


class ModuleEditTag(Enum):
    FQCN_SHORTENED = "fqcn_shortened"
    REORGANIZATION = "reorganization"
    COMMAND_SHELL = "command_shell"
    SIMILAR_MODULE = "similar_module"
    OTHER = "other"


@dataclass(slots=True)
class SuggestionOutcome:
    suggestion_id: str
    user_id: str
    shown_task: AnsibleTask
    decision: UserAction
    suggestion_lines: int
    suggestion_tokens: int
    committed_doc: str | None = None
    committed_task: AnsibleTask | None = None
    edit_fraction: float | None = None
    category: Category | None = None
    module_changed: bool = False
    minor_subcategory: MinorSubcategory | None = None
    module_edit_tags: frozenset[ModuleEditTag] = frozenset()
    doc_unparseable: bool = False


@dataclass
class PairingResult:
    outcomes: list[SuggestionOutcome]
    orphan_actions: int
    unparseable_suggestions: int


class TaskCache:
    """Memoizes parse_tasks per exact text; telemetry repeats texts heavily."""

    def __init__(self, directive_keys: tuple[str, ...]):
        self._directive_keys = directive_keys
        self._hits: dict[str, tuple[AnsibleTask, ...] | TaskParseError] = {}
        self._shown: dict[tuple[str, str | None], AnsibleTask | TaskParseError] = {}

    def parse(self, text: str) -> tuple[AnsibleTask, ...]:
        cached = self._hits.get(text)
        if cached is None:
            try:
                cached = tuple(parse_tasks(text, self._directive_keys))
            except TaskParseError as exc:
                cached = exc
            self._hits[text] = cached
        if isinstance(cached, TaskParseError):
            raise cached
        return cached

    def shown_task(self, text: str, name: str | None) -> AnsibleTask:
        """The single task of a suggestion text, with the prompt name attached."""
        key = (text, name)
        cached = self._shown.get(key)
        if cached is None:
            try:
                tasks = self.parse(text)
                if len(tasks) != 1:
                    raise NotATaskShape("suggestion text must hold exactly one task")
                task = tasks[0]
                if task.name is None and name is not None:
                    task = task.with_name(name)
                cached = task
            except TaskParseError as exc:
                cached = exc
            self._shown[key] = cached
        if isinstance(cached, TaskParseError):
            raise cached
        return cached


def name_from_prompt(prompt: str) -> str | None:
    """Extract the task name from a prompt line like ``- name: Install nginx``."""
    stripped = prompt.strip()
    if stripped.startswith("-"):
        stripped = stripped[1:].lstrip()
    if stripped.startswith("name:"):
        stripped = stripped[len("name:"):].strip()
    return stripped or None


def pair_outcomes(
    timeline: UserTimeline,
    config: Config | None = None,
    cache: TaskCache | None = None,
) -> PairingResult:
    """Pre-classification pairing of suggestions with actions and content.

    Suggestions with no action are Ignored; actions whose suggestion id never
    appears are counted as orphans.  Suggestion texts that do not parse as
    exactly one task are dropped and counted.
    """
    config = config or Config()
    cache = cache or TaskCache(config.directive_keys)

    prompts: dict[str, str] = {}
    actions: dict[str, tuple[UserAction, int]] = {}  # sid -> (action, event index)
    contents: list[tuple[int, RawEvent]] = []
    suggestions: list[tuple[int, RawEvent]] = []
    suggestion_ids: set[str] = set()

    for idx, event in enumerate(timeline.events):
        if event.kind is EventKind.SUGGESTION:
            suggestions.append((idx, event))
            suggestion_ids.add(event.payload.suggestion_id)
        elif event.kind is EventKind.COMPLETION:
            prompts.setdefault(event.payload.suggestion_id, event.payload.prompt)
        elif event.kind is EventKind.ACTION:
            actions.setdefault(event.payload.suggestion_id, (event.payload.action, idx))
        elif event.kind is EventKind.CONTENT:
            contents.append((idx, event))

    orphan_actions = sum(1 for sid in actions if sid not in suggestion_ids)
    content_indices = [idx for idx, _ in contents]

    outcomes: list[SuggestionOutcome] = []
    unparseable = 0
    for sugg_idx, event in suggestions:
        payload = event.payload
        prompt = prompts.get(payload.suggestion_id)
        prompt_name = name_from_prompt(prompt) if prompt is not None else None
        try:
            shown = cache.shown_task(payload.suggestion_text, prompt_name)
        except TaskParseError:
            unparseable += 1
            continue

        action_entry = actions.get(payload.suggestion_id)
        decision = action_entry[0] if action_entry else UserAction.IGNORED
        committed_doc = None
        if decision is UserAction.ACCEPTED:
            after = action_entry[1] if action_entry else sugg_idx
            pos = bisect_left(content_indices, after)
            if pos < len(contents):
                committed_doc = contents[pos][1].payload.document_text

        outcomes.append(
            SuggestionOutcome(
                suggestion_id=payload.suggestion_id,
                user_id=timeline.user_id,
                shown_task=shown,
                decision=decision,
                suggestion_lines=payload.line_count,
                suggestion_tokens=payload.token_count,
                committed_doc=committed_doc,
            )
        )
    return PairingResult(outcomes, orphan_actions, unparseable)


def match_committed_task(
    shown: AnsibleTask,
    doc_tasks: tuple[AnsibleTask, ...] | list[AnsibleTask],
    rename_match_floor: float = 0.3,
) -> AnsibleTask | None:
    """Locate the committed form of a shown task in a document snapshot.

    Name equality wins (the name is user-authored, so it survives body edits);
    otherwise the best line-similarity candidate above the floor.  None means
    the task is absent, i.e. deleted after acceptance.
    """
    if shown.name is not None:
        for task in doc_tasks:
            if task.name == shown.name:
                return task
    shown_lines = [line.rstrip() for line in shown.raw_lines]
    best: AnsibleTask | None = None
    best_ratio = 0.0
    for task in doc_tasks:
        ratio = similarity_ratio(shown_lines, [line.rstrip() for line in task.raw_lines]).value
        if ratio > best_ratio:
            best, best_ratio = task, ratio
    if best is not None and best_ratio >= rename_match_floor:
        return best
    return None


def classify_outcome(
    outcome: SuggestionOutcome,
    config: Config | None = None,
    cache: TaskCache | None = None,
) -> SuggestionOutcome:
    """Fill category, edit fraction, subcategory and module-edit tags in place."""
    config = config or Config()
    cache = cache or TaskCache(config.directive_keys)

    if outcome.decision is UserAction.REJECTED:
        outcome.category = Category.REJECTED
        return outcome
    if outcome.decision is UserAction.IGNORED:
        outcome.category = Category.IGNORED
        return outcome

    if outcome.committed_doc is None:
        outcome.category = Category.UNRESOLVED
        return outcome
    try:
        doc_tasks = cache.parse(outcome.committed_doc)
    except TaskParseError:
        outcome.category = Category.UNRESOLVED
        outcome.doc_unparseable = True
        return outcome

    shown = outcome.shown_task
    committed = match_committed_task(shown, doc_tasks, config.rename_match_floor)
    if committed is None:
        outcome.category = Category.DELETED_AFTER_ACCEPT
        return outcome

    shown_body = shown.body_lines()
    committed_body = committed.body_lines()
    fraction = (
        0.0 if shown_body == committed_body
        else gestalt_edit_fraction(shown_body, committed_body)
    )
    shown_short = short_name(shown.module) if shown.module else None
    committed_short = short_name(committed.module) if committed.module else None
    module_changed = shown_short != committed_short

    if fraction == 0.0:
        category = Category.FULLY_ACCEPTED
    elif fraction < config.minor_major_threshold:
        category = Category.MINOR_EDIT
    else:
        category = Category.MAJOR_EDIT

    outcome.committed_task = committed
    outcome.edit_fraction = fraction
    outcome.category = category
    outcome.module_changed = module_changed
    if category is Category.MINOR_EDIT and not module_changed:
        outcome.minor_subcategory = minor_subcategory(shown, committed)
    if shown.module != committed.module:
        outcome.module_edit_tags = module_edit_tags(shown, committed, config)
    return outcome


def minor_subcategory(shown: AnsibleTask, committed: AnsibleTask) -> MinorSubcategory | None:
    """Which parts of the options map moved: values, keys, both, or the set itself.

    None when the options are structurally identical (the edit was cosmetic or
    outside the module body).
    """
    before = canonical_options(shown)
    after = canonical_options(committed)
    added = set(after) - set(before)
    removed = set(before) - set(after)
    common_changed = {k for k in set(before) & set(after) if before[k] != after[k]}

    if not added and not removed:
        return MinorSubcategory.VALUE_ONLY if common_changed else None
    if added and removed:
        if len(added) != len(removed) or common_changed:
            return MinorSubcategory.MIXED
        if Counter(after[k] for k in added) == Counter(before[k] for k in removed):
            return MinorSubcategory.KEY_ONLY
        return MinorSubcategory.KEY_AND_VALUE
    if common_changed:
        return MinorSubcategory.MIXED
    return MinorSubcategory.OPTION_ADDED if added else MinorSubcategory.OPTION_REMOVED


def module_edit_tags(
    shown: AnsibleTask, committed: AnsibleTask, config: Config | None = None
) -> frozenset[ModuleEditTag]:
    """Tag a module-level edit; tags may overlap, 'other' only stands alone."""
    config = config or Config()
    tags: set[ModuleEditTag] = set()
    s_mod, c_mod = shown.module, committed.module
    s_short = short_name(s_mod) if s_mod else None
    c_short = short_name(c_mod) if c_mod else None

    if (
        s_mod is not None
        and c_mod is not None
        and c_mod.segments != s_mod.segments
        and c_mod.segments == (short_name(s_mod),)
    ):
        tags.add(ModuleEditTag.FQCN_SHORTENED)

    added_directives = set(committed.directives) - set(shown.directives)
    if added_directives & REORG_DIRECTIVE_KEYS:
        tags.add(ModuleEditTag.REORGANIZATION)

    module_changed = s_short != c_short
    if module_changed and s_short is not None and c_short is not None:
        if s_short in COMMAND_SHELL_MODULES or c_short in COMMAND_SHELL_MODULES:
            tags.add(ModuleEditTag.COMMAND_SHELL)
        for cls in config.similar_modules:
            if s_short in cls and c_short in cls:
                tags.add(ModuleEditTag.SIMILAR_MODULE)
                break
    if module_changed and not tags:
        tags.add(ModuleEditTag.OTHER)
    return frozenset(tags)


@dataclass
class TimelineAnalysis:
    user_id: str
    outcomes: list[SuggestionOutcome]
    orphan_actions: int
    unparseable_suggestions: int
    unparseable_documents: int = 0


def analyze_timeline(
    timeline: UserTimeline,
    config: Config | None = None,
    cache: TaskCache | None = None,
) -> TimelineAnalysis:
    """pair + classify for one user; the per-worker unit of parallel fan-out."""
    config = config or Config()
    cache = cache or TaskCache(config.directive_keys)
    paired = pair_outcomes(timeline, config, cache)
    classified = [classify_outcome(o, config, cache) for o in paired.outcomes]
    return TimelineAnalysis(
        user_id=timeline.user_id,
        outcomes=classified,
        orphan_actions=paired.orphan_actions,
        unparseable_suggestions=paired.unparseable_suggestions,
        unparseable_documents=sum(1 for o in classified if o.doc_unparseable),
    )
