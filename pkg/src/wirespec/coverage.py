"""Coverage bookkeeping for test traversals.

Goals are: every transition of the tested actor's LTS, every field of
every message/record type the actor can exchange, the presence AND the
absence of every optional field, and every constant of every referenced
enum.  A field counts as covered once it occurs in some exchanged
message; an absent optional field feeds the separate absence goal.
"""

from __future__ import annotations

from .lts import IOLTS
from .resolve import ResolvedSpec, RType
from .values import ABSENT, EnumVal, ListVal, RecordVal


class Coverage:
    def __init__(self, spec: ResolvedSpec, actor: IOLTS):
        self.spec = spec
        self.transitions = {e: 0 for e in actor.edges}
        self.fields = {}
        self.optional = {}  # (type, field) -> [present, absent]
        self.enums = {}
        for msg in actor.message_types():
            self._add_record_goals(msg, set())

    def _add_record_goals(self, record_name: str, seen: set):
        if record_name in seen:
            return
        seen.add(record_name)
        record = self.spec.records[record_name]
        for fld in record.fields:
            self.fields.setdefault((record_name, fld.name), 0)
            self._add_type_goals(record_name, fld.name, fld.type, seen)

    def _add_type_goals(self, record_name: str, field_name: str, rtype: RType, seen: set):
        if rtype.base == "Optional":
            self.optional.setdefault((record_name, field_name), [0, 0])
            self._add_type_goals(record_name, field_name, rtype.args["subject"], seen)
        elif rtype.base == "Record":
            self._add_record_goals(rtype.record, seen)
        elif rtype.base == "List":
            self._add_type_goals(record_name, field_name, rtype.args["elem"], seen)
        elif rtype.base == "Enum":
            enum = self.spec.enums[rtype.enum]
            for constant in enum.constants:
                self.enums.setdefault((rtype.enum, constant), 0)

    # --- recording ------------------------------------------------------------

    def hit_edges(self, edges) -> None:
        for e in edges:
            self.transitions[e] += 1

    def record_message(self, value: RecordVal) -> None:
        record = self.spec.records[value.type_name]
        for fld in record.fields:
            v = value.get(fld.name)
            key = (record.name, fld.name)
            if v is ABSENT:
                self.optional.setdefault(key, [0, 0])[1] += 1
                continue
            if fld.type.base == "Optional":
                self.optional.setdefault(key, [0, 0])[0] += 1
            self.fields[key] = self.fields.get(key, 0) + 1
            self._record_value(v)

    def _record_value(self, v) -> None:
        if isinstance(v, RecordVal):
            self.record_message(v)
        elif isinstance(v, ListVal):
            for item in v.items:
                self._record_value(item)
        elif isinstance(v, EnumVal):
            key = (v.enum, v.constant)
            self.enums[key] = self.enums.get(key, 0) + 1

    # --- summaries ------------------------------------------------------------

    def summary(self) -> dict:
        out = {}
        for name, table in (
            ("transitions", self.transitions),
            ("fields", self.fields),
            ("enums", self.enums),
        ):
            hit = sum(1 for c in table.values() if c > 0)
            out[name] = (hit, len(table))
        goals = 2 * len(self.optional)
        hit = sum((1 if p > 0 else 0) + (1 if a > 0 else 0) for p, a in self.optional.values())
        out["optional-goals"] = (hit, goals)
        return out

    def uncovered_transitions(self) -> list:
        return [e for e, c in self.transitions.items() if c == 0]
