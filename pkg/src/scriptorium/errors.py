"""Exception types shared across the engine.

Every error the HTTP layer maps to a status code lives here, so the
service module can translate by isinstance checks alone.
"""

from __future__ import annotations


class ScriptoriumError(Exception):
    """Base class for all engine errors."""

    code = "error"


class EmptyTerm(ScriptoriumError):
    """Nothing remains of a label surface after normalization."""

    code = "empty_term"


class ParseError(ScriptoriumError):
    code = "parse_error"

    def __init__(self, path: str, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class DanglingReference(ScriptoriumError):
    """An entity references ids that do not resolve."""

    code = "dangling_reference"

    def __init__(self, unresolved: list[str]):
        super().__init__("unresolved references: " + ", ".join(sorted(unresolved)))
        self.unresolved = list(unresolved)


class NoVector(ScriptoriumError):
    """No vector can be produced for the requested entity."""

    code = "no_vector"


class EmptySpace(ScriptoriumError):
    code = "empty_space"


class KeyMissing(ScriptoriumError):
    code = "key_missing"

    def __init__(self, key: str, space_name: str):
        super().__init__(f"key {key!r} not present in space {space_name!r}")
        self.key = key
        self.space_name = space_name


class EmptySelection(ScriptoriumError):
    code = "empty_selection"


class EmptyInput(ScriptoriumError):
    code = "empty_input"


class UnknownSnapshot(ScriptoriumError):
    code = "unknown_snapshot"


class NotASubset(ScriptoriumError):
    code = "not_a_subset"


class UnknownImage(ScriptoriumError):
    code = "unknown_image"


class UnknownLabel(ScriptoriumError):
    code = "unknown_label"


class NoOpChange(ScriptoriumError):
    """Mutation that would not change state (e.g. re-adding a label)."""

    code = "no_op_change"


class DuplicateLabel(ScriptoriumError):
    code = "duplicate_label"

    def __init__(self, normalized: str, existing_id: str):
        super().__init__(f"label normalizing to {normalized!r} already exists as {existing_id}")
        self.normalized = normalized
        self.existing_id = existing_id


class UnknownNode(ScriptoriumError):
    code = "unknown_node"


class SelfLoop(ScriptoriumError):
    code = "self_loop"


class DuplicateEdge(ScriptoriumError):
    code = "duplicate_edge"


class UnknownEdge(ScriptoriumError):
    code = "unknown_edge"


class CycleDetected(ScriptoriumError):
    """Defensive: a supposedly acyclic edge set contains a cycle."""

    code = "cycle_detected"


class CorruptLog(ScriptoriumError):
    code = "corrupt_log"

    def __init__(self, seq: int, message: str):
        super().__init__(f"history log corrupt at seq {seq}: {message}")
        self.seq = seq
