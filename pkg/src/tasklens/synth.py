"""Synthetic JSONL event-log generators.

These plant logs whose classified outcomes land on exact target counts, which
is how the acceptance suite checks the analytics arithmetic end to end.  All
generators are deterministic: same arguments, same bytes.

Every generated user gets a warm-up completion on a day before their real
activity, so the whole population lands in the returning-user cohort that the
edit analysis is restricted to.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable

UTC = timezone.utc
BASE_DAY = datetime(2023, 6, 1, 8, 0, 0, tzinfo=UTC)


def write_log(path: str | Path, lines: Iterable[str]) -> Path:
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _completion(e: str, u: str, t: str, s: str, prompt_json: str) -> str:
    return (
        f'{{"event_id":"{e}","user_id":"{u}","ts":"{t}","type":"completion",'
        f'"suggestion_id":"{s}","prompt":{prompt_json},"context":""}}'
    )


def _suggestion(e: str, u: str, t: str, s: str, text_json: str, lines: int, tokens: int) -> str:
    return (
        f'{{"event_id":"{e}","user_id":"{u}","ts":"{t}","type":"suggestion",'
        f'"suggestion_id":"{s}","text":{text_json},"lines":{lines},"tokens":{tokens}}}'
    )


def _action(e: str, u: str, t: str, s: str, action: str) -> str:
    return (
        f'{{"event_id":"{e}","user_id":"{u}","ts":"{t}","type":"action",'
        f'"suggestion_id":"{s}","action":"{action}"}}'
    )


def _content(e: str, u: str, t: str, s: str, document_json: str) -> str:
    return (
        f'{{"event_id":"{e}","user_id":"{u}","ts":"{t}","type":"content",'
        f'"suggestion_id":"{s}","document":{document_json}}}'
    )


def _feedback(e: str, u: str, t: str, stars: int, comment_json: str, label: str | None) -> str:
    label_part = f',"label":"{label}"' if label is not None else ""
    return (
        f'{{"event_id":"{e}","user_id":"{u}","ts":"{t}","type":"feedback",'
        f'"stars":{stars},"comment":{comment_json}{label_part}}}'
    )


@dataclass(frozen=True)
class OutcomeTemplate:
    """One plantable suggestion outcome: the shown text and what came of it."""

    key: str
    name: str
    suggestion_text: str
    action: str | None  # None -> no action event (ignored)
    document: str | None  # None -> no content event
    emit_completion: bool = True  # prompts only matter for accepted outcomes

    @property
    def prompt(self) -> str:
        return f"- name: {self.name}"


def _template_parts(template: OutcomeTemplate):
    text_json = json.dumps(template.suggestion_text)
    return (
        json.dumps(template.prompt),
        text_json,
        len(template.suggestion_text.splitlines()),
        json.dumps(template.document) if template.document is not None else None,
    )


class _LogBuilder:
    """Interleaves per-user event streams with strictly increasing user clocks."""

    def __init__(self, n_users: int, base: datetime, user_prefix: str = "u"):
        self.lines: list[str] = []
        self._eid = 0
        self._sid = 0
        self._prefix = user_prefix
        self._users = [f"{user_prefix}{i:05d}" for i in range(n_users)]
        self._clocks = {u: base for u in self._users}
        self._next_user = 0

    def _stamp(self, user: str) -> str:
        ts = self._clocks[user]
        self._clocks[user] = ts + timedelta(seconds=1)
        return ts.isoformat()

    def next_event_id(self) -> str:
        self._eid += 1
        return f"{self._prefix}-e{self._eid:07d}"

    def next_suggestion_id(self) -> str:
        self._sid += 1
        return f"{self._prefix}-s{self._sid:07d}"

    def pick_user(self) -> str:
        user = self._users[self._next_user]
        self._next_user = (self._next_user + 1) % len(self._users)
        return user

    def warmups(self, day_offset: int = -1, prompt: str = "- name: warm up"):
        """One completion per user on an extra day; makes everyone returning."""
        prompt_json = json.dumps(prompt)
        for user in self._users:
            ts = (self._clocks[user] + timedelta(days=day_offset)).isoformat()
            self.lines.append(
                _completion(self.next_event_id(), user, ts, f"warm-{user}", prompt_json)
            )

    def add_outcome(self, template: OutcomeTemplate, parts, user: str | None = None):
        prompt_json, text_json, n_lines, document_json = parts
        user = user or self.pick_user()
        sid = self.next_suggestion_id()
        if template.emit_completion:
            self.lines.append(
                _completion(self.next_event_id(), user, self._stamp(user), sid, prompt_json)
            )
        self.lines.append(
            _suggestion(
                self.next_event_id(), user, self._stamp(user), sid, text_json, n_lines, 20
            )
        )
        if template.action is not None:
            self.lines.append(
                _action(self.next_event_id(), user, self._stamp(user), sid, template.action)
            )
        if template.document is not None:
            self.lines.append(
                _content(self.next_event_id(), user, self._stamp(user), sid, document_json)
            )


# --- edit-analysis fixture -------------------------------------------------

_SHOWN_BODY = """\
ansible.builtin.copy:
  src: files/app.conf
  dest: /etc/app.conf
  owner: root
  group: root
  mode: '0644'"""


def _doc_for(name: str, body_lines: list[str]) -> str:
    out = [f"- name: {name}"]
    out.extend("  " + line for line in body_lines)
    return "\n".join(out)


def _swap_line(body: str, index: int, replacement: str) -> str:
    lines = body.splitlines()
    lines[index] = replacement
    return "\n".join(lines)


_MAJOR_BODY = """\
ansible.builtin.copy:
  content: '{{ rendered_payload }}'
  remote_src: true
  backup: true
  force: false
  validate: test -r %s"""


def edit_outcome_templates() -> dict[str, OutcomeTemplate]:
    name = "deploy app config"
    committed_same = _doc_for(name, _SHOWN_BODY.splitlines())
    committed_minor = _doc_for(
        name, _swap_line(_SHOWN_BODY, 2, "  dest: /etc/app-v2.conf").splitlines()
    )
    committed_module = _doc_for(
        name, _swap_line(_SHOWN_BODY, 0, "ansible.builtin.template:").splitlines()
    )
    committed_major = _doc_for(name, _MAJOR_BODY.splitlines())
    return {
        "fully": OutcomeTemplate("fully", name, _SHOWN_BODY, "accepted", committed_same),
        "minor": OutcomeTemplate("minor", name, _SHOWN_BODY, "accepted", committed_minor),
        "minor_module": OutcomeTemplate(
            "minor_module", name, _SHOWN_BODY, "accepted", committed_module
        ),
        "major": OutcomeTemplate("major", name, _SHOWN_BODY, "accepted", committed_major),
        "deleted": OutcomeTemplate("deleted", name, _SHOWN_BODY, "accepted", ""),
        "rejected": OutcomeTemplate(
            "rejected", name, _SHOWN_BODY, "rejected", None, emit_completion=False
        ),
        "ignored": OutcomeTemplate(
            "ignored", name, _SHOWN_BODY, None, None, emit_completion=False
        ),
        "unresolved": OutcomeTemplate("unresolved", name, _SHOWN_BODY, "accepted", None),
    }


@dataclass(frozen=True)
class EditMix:
    fully: int
    minor: int
    minor_module: int
    major: int
    deleted: int
    rejected: int = 0
    ignored: int = 0
    unresolved: int = 0

    @property
    def accepted(self) -> int:
        return (
            self.fully + self.minor + self.minor_module + self.major + self.deleted
            + self.unresolved
        )

    @property
    def total(self) -> int:
        return self.accepted + self.rejected + self.ignored


# Mix matching the headline edit-analysis counts the suite reproduces.
TABLE_MIX = EditMix(
    fully=24811,
    minor=5672,
    minor_module=306,
    major=2713,
    deleted=7436,
    rejected=62099 - 40938,
)


def edit_analysis_lines(mix: EditMix, n_users: int = 64, base: datetime = BASE_DAY) -> list[str]:
    """Log whose classified outcomes hit the mix counts exactly."""
    templates = edit_outcome_templates()
    builder = _LogBuilder(n_users, base)
    builder.warmups()
    schedule = (
        ("fully", mix.fully),
        ("minor", mix.minor),
        ("minor_module", mix.minor_module),
        ("major", mix.major),
        ("deleted", mix.deleted),
        ("rejected", mix.rejected),
        ("ignored", mix.ignored),
    )
    for key, count in schedule:
        template = templates[key]
        parts = _template_parts(template)
        for _ in range(count):
            builder.add_outcome(template, parts)
    # unresolved outcomes go to dedicated users: any later content event of the
    # same user would otherwise resolve them
    if mix.unresolved:
        extra = _LogBuilder(
            max(1, mix.unresolved // 50), base, user_prefix="unres-u"
        )
        extra.warmups()
        template = templates["unresolved"]
        parts = _template_parts(template)
        for _ in range(mix.unresolved):
            extra.add_outcome(template, parts)
        builder.lines.extend(extra.lines)
    return builder.lines


# --- module-edit-tag fixture -------------------------------------------------

def _tag_body(module: str, options: list[str]) -> str:
    return "\n".join([f"{module}:"] + [f"  {opt}" for opt in options])


def _tag_doc(name: str, module: str, options: list[str], register: bool = False) -> str:
    lines = [f"- name: {name}", f"  {module}:"]
    lines.extend(f"    {opt}" for opt in options)
    if register:
        lines.append("  register: task_result")
    return "\n".join(lines)


def module_tag_templates() -> dict[str, OutcomeTemplate]:
    debug_opts = ["msg: deployment finished", "verbosity: 1", "var: state", "pretty: true", "extra: note"]
    copy_opts = ["src: files/motd", "dest: /etc/motd", "owner: root", "group: root", "mode: '0644'"]
    cmd_opts = ["cmd: make build", "chdir: /srv/app", "creates: out.bin", "stdin: ''", "strip_empty_ends: true"]
    yum_opts = ["name: nginx", "state: present", "update_cache: true", "enablerepo: epel", "disable_gpg_check: false"]
    line_opts = ["path: /etc/hosts", "line: 10.0.0.5 db", "state: present", "create: true", "backup: true"]

    def tpl(key: str, shown_module: str, opts: list[str], committed_module: str, register=False):
        name = f"tag fixture {key}"
        return OutcomeTemplate(
            key,
            name,
            _tag_body(shown_module, opts),
            "accepted",
            _tag_doc(name, committed_module, opts, register=register),
        )

    return {
        "fqcn": tpl("fqcn", "ansible.builtin.debug", debug_opts, "debug"),
        "reorg": tpl("reorg", "ansible.builtin.copy", copy_opts, "ansible.builtin.file", register=True),
        "cmdshell": tpl("cmdshell", "ansible.builtin.command", cmd_opts, "ansible.builtin.shell"),
        "similar": tpl("similar", "ansible.builtin.yum", yum_opts, "ansible.builtin.dnf"),
        "other": tpl("other", "ansible.builtin.lineinfile", line_opts, "ansible.builtin.blockinfile"),
        "fqcn_reorg": tpl("fqcn_reorg", "ansible.builtin.debug", debug_opts, "debug", register=True),
    }


# Singles plus one overlap batch; totals per tag:
# fqcn 225+121=346, reorg 90+121=211, cmdshell 352, similar 336, other 586.
MODULE_TAG_SCHEDULE = (
    ("fqcn", 225),
    ("reorg", 90),
    ("cmdshell", 352),
    ("similar", 336),
    ("other", 586),
    ("fqcn_reorg", 121),
)

MODULE_TAG_CONFIG_YAML = "similar_modules:\n  - [yum, dnf, package]\n"


def module_tag_lines(
    schedule=MODULE_TAG_SCHEDULE, n_users: int = 30, base: datetime = BASE_DAY
) -> list[str]:
    templates = module_tag_templates()
    builder = _LogBuilder(n_users, base, user_prefix="tagu")
    builder.warmups()
    for key, count in schedule:
        template = templates[key]
        parts = _template_parts(template)
        for _ in range(count):
            builder.add_outcome(template, parts)
    return builder.lines


# --- cohort / retention fixtures ---------------------------------------------

def cohort_lines(
    total_users: int, returning_users: int, base: datetime = BASE_DAY
) -> list[str]:
    """total_users one-day users, of whom returning_users come back next day."""
    lines = []
    prompt_json = json.dumps("- name: probe")
    eid = 0
    for i in range(total_users):
        user = f"cu{i:05d}"
        eid += 1
        lines.append(
            _completion(f"e{eid:07d}", user, base.isoformat(), f"c-{user}-0", prompt_json)
        )
        if i < returning_users:
            eid += 1
            ts = (base + timedelta(days=1)).isoformat()
            lines.append(_completion(f"e{eid:07d}", user, ts, f"c-{user}-1", prompt_json))
    return lines


def retention_lines(
    n_users: int, day1_returners: int, base: datetime = BASE_DAY
) -> list[str]:
    """Everyone active on day 0; the first day1_returners also active on day 1."""
    return cohort_lines(n_users, day1_returners, base)


# --- feedback fixtures --------------------------------------------------------

def feedback_lines(
    star_counts: dict[int, int] | None = None,
    negative_labels: dict[str, int] | None = None,
    positive_labels: dict[str, int] | None = None,
    base: datetime = BASE_DAY,
) -> list[str]:
    """Feedback events with exact star and per-label counts.

    Labeled negative comments get 1 star, labeled positive ones 5 stars, so
    label counts flow into the matching polarity distribution untouched.
    """
    lines: list[str] = []
    eid = 0
    ts = base
    comment_json = json.dumps("planted feedback")

    def emit(stars: int, label: str | None):
        nonlocal eid, ts
        eid += 1
        user = f"fb{eid:06d}"
        lines.append(_feedback(f"e{eid:07d}", user, ts.isoformat(), stars, comment_json, label))
        ts = ts + timedelta(seconds=1)

    for stars, count in sorted((star_counts or {}).items()):
        for _ in range(count):
            emit(stars, None)
    for label, count in sorted((negative_labels or {}).items()):
        for _ in range(count):
            emit(1, label)
    for label, count in sorted((positive_labels or {}).items()):
        for _ in range(count):
            emit(5, label)
    return lines


# --- large mixed fixture --------------------------------------------------------

def mixed_lines(target_events: int = 100_000, n_users: int = 200, base: datetime = BASE_DAY) -> list[str]:
    """A busy, dirty log: every outcome path, duplicates, orphans, bad lines.

    Deterministic; at least target_events lines.
    """
    templates = edit_outcome_templates()
    keys = ("fully", "minor", "minor_module", "major", "deleted", "rejected", "ignored")
    weights = (10, 4, 1, 2, 3, 5, 1)
    parts = {key: _template_parts(templates[key]) for key in keys}
    builder = _LogBuilder(n_users, base, user_prefix="mix")
    builder.warmups()

    rotation: list[str] = []
    for key, weight in zip(keys, weights):
        rotation.extend([key] * weight)

    outcome_budget = (target_events - len(builder.lines) - 2_500) // 4
    day = 0
    for i in range(outcome_budget):
        key = rotation[i % len(rotation)]
        template = templates[key]
        user = builder.pick_user()
        if i % 4096 == 0:
            day += 1
            # march the whole population forward a day now and then
            for u in builder._clocks:
                builder._clocks[u] += timedelta(days=1)
        builder.add_outcome(template, parts[key], user=user)
        if i % 97 == 0:  # telemetry retry: byte-equal payload inside the window
            sid = f"{builder._prefix}-s{builder._sid:07d}"
            prompt_json, text_json, n_lines, _ = parts[key]
            builder.lines.append(
                _suggestion(
                    builder.next_event_id(), user, builder._stamp(user), sid,
                    text_json, n_lines, 20,
                )
            )
        if i % 211 == 0:  # action without a matching suggestion
            builder.lines.append(
                _action(
                    builder.next_event_id(), user, builder._stamp(user),
                    f"orphan-{i}", "accepted",
                )
            )

    # unresolved users: accepted suggestions, no content events at all
    unresolved = _LogBuilder(4, base, user_prefix="mix-unres")
    unresolved.warmups()
    unresolved_parts = _template_parts(templates["unresolved"])
    for _ in range(120):
        unresolved.add_outcome(templates["unresolved"], unresolved_parts)
    builder.lines.extend(unresolved.lines)

    # suggestion text that is not a task, and a committed doc that is not YAML
    bad_suggestion = OutcomeTemplate(
        "bad_suggestion", "odd suggestion", "plain prose, not a task",
        "accepted", "- name: odd suggestion\n  debug:\n    msg: hi",
    )
    bad_document = OutcomeTemplate(
        "bad_document", "odd document", _SHOWN_BODY, "accepted", "key: [unclosed",
    )
    for template, count in ((bad_suggestion, 30), (bad_document, 25)):
        parts_bad = _template_parts(template)
        for _ in range(count):
            builder.add_outcome(template, parts_bad)

    # feedback traffic
    builder.lines.extend(
        feedback_lines(
            star_counts={1: 60, 2: 76, 3: 79, 4: 142, 5: 143},
            negative_labels={"cannot_get_to_work": 40, "poor_suggestions": 12},
            positive_labels={"productivity": 55, "accuracy": 25},
            base=base + timedelta(days=2),
        )
    )

    # malformed lines: bad json, missing fields, naive timestamp, bad kind
    for i in range(60):
        builder.lines.append('{"event_id": "broken-%d"' % i)
    builder.lines.append('{"event_id":"m1","user_id":"mix00000"}')
    builder.lines.append(
        '{"event_id":"m2","user_id":"mix00000","ts":"2023-06-01T00:00:00","type":"completion",'
        '"suggestion_id":"x","prompt":"p","context":""}'
    )
    builder.lines.append(
        '{"event_id":"m3","user_id":"mix00000","ts":"2023-06-01T00:00:00+00:00","type":"mystery"}'
    )

    # pad with completions to reach the target line count
    prompt_json = json.dumps("- name: padding probe")
    while len(builder.lines) < target_events:
        user = builder.pick_user()
        builder.lines.append(
            _completion(
                builder.next_event_id(), user, builder._stamp(user),
                f"pad-{builder.next_event_id()}", prompt_json,
            )
        )
    return builder.lines
