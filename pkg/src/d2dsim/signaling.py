"""Connection-setup signaling for network-assisted D2D, as message traces.

Two topologies: both ends under one base station (eight numbered steps) or
split across two (ten steps).  A trace is a sequence of steps, each carrying
zero or more messages plus internal notes (RRC transitions, scheduler
verdicts).  Traces are deterministic and serialize to a stable text form so
goldens can be compared byte for byte.

Discovery runs model A ("here I am" announcements) or model B (solicitation);
the trace structure is identical, only the model annotation differs.  The
announcing end retries up to `max_retries` times after the first attempt and
times out afterwards.  Only an end with cell coverage may carry the service
request; a pair end without coverage learns its resource grant through a
single sidelink forward after the grant step.

Message sizing (bytes): 8 header on everything; SIB body 24; discovery body
8; resource grant 8 + 1 flag; config exchange body 8; data start is a bare
header.  Context payloads count 12 per position, 12 per velocity, 4 per gain
report, 4 QoS, 1 priority.  A service request carries the full pair context
(2 positions, 2 velocities, 3 gain reports: D2D link, own uplink, partner
uplink) — so each admitted pair costs its base station 3 gain reports, against
M*N + M + 2N for a full channel-knowledge scheduler.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

__all__ = [
    "MessageKind",
    "ContextRecord",
    "Message",
    "TraceStep",
    "ProtocolTrace",
    "run_single_cell",
    "run_multi_cell",
    "context_gain_reports",
    "full_csi_report_count",
]

HEADER_BYTES = 8
SIB_BODY_BYTES = 24
DISCOVERY_BODY_BYTES = 8
GRANT_BODY_BYTES = 8
FLAG_BYTES = 1
CONFIG_BODY_BYTES = 8
POSITION_BYTES = 12
VELOCITY_BYTES = 12
GAIN_REPORT_BYTES = 4
QOS_BYTES = 4
PRIORITY_BYTES = 1


class MessageKind(str, Enum):
    SIB = "sib"
    DISCOVERY_ANNOUNCE = "discovery-announce"
    DISCOVERY_RESPONSE = "discovery-response"
    CONTEXT_FORWARD = "context-forward"
    SERVICE_REQUEST = "service-request"
    RESOURCE_GRANT = "resource-grant"
    CONFIG_EXCHANGE = "config-exchange"
    DATA_START = "data-start"


@dataclass(frozen=True)
class ContextRecord:
    """What a context payload carries, as element counts."""

    positions: int = 0
    velocities: int = 0
    gain_reports: int = 0
    qos: bool = False
    priority: bool = False

    @property
    def size_bytes(self) -> int:
        return (self.positions * POSITION_BYTES
                + self.velocities * VELOCITY_BYTES
                + self.gain_reports * GAIN_REPORT_BYTES
                + (QOS_BYTES if self.qos else 0)
                + (PRIORITY_BYTES if self.priority else 0))

    def label(self) -> str:
        parts = [f"pos={self.positions}", f"vel={self.velocities}", f"gain={self.gain_reports}"]
        if self.qos:
            parts.append("qos")
        if self.priority:
            parts.append("prio")
        return "context(" + ",".join(parts) + ")"


_END_CONTEXT = ContextRecord(positions=1, velocities=1, gain_reports=1)
_FORWARD_CONTEXT = ContextRecord(positions=1, velocities=1, gain_reports=1, qos=True, priority=True)
_PAIR_CONTEXT = ContextRecord(positions=2, velocities=2, gain_reports=3, qos=True, priority=True)


@dataclass(frozen=True)
class Message:
    kind: MessageKind
    sender: str
    receiver: str
    body_bytes: int = 0
    context: ContextRecord | None = None
    note: str = ""

    @property
    def size_bytes(self) -> int:
        ctx = self.context.size_bytes if self.context else 0
        return HEADER_BYTES + self.body_bytes + ctx

    def render(self) -> str:
        text = f"{self.kind.value} {self.sender} -> {self.receiver} [{self.size_bytes} B]"
        if self.context:
            text += " " + self.context.label()
        if self.note:
            text += " " + self.note
        return text


@dataclass(frozen=True)
class TraceStep:
    index: int
    phase: str
    messages: tuple[Message, ...] = ()
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class ProtocolTrace:
    topology: str  # "single-cell" | "multi-cell"
    discovery_model: str
    outcome: str  # "accepted" | "rejected" | "timeout"
    steps: tuple[TraceStep, ...]

    def messages(self) -> list[Message]:
        return [m for s in self.steps for m in s.messages]

    @property
    def message_count(self) -> int:
        return len(self.messages())

    @property
    def overhead_bytes(self) -> int:
        return sum(m.size_bytes for m in self.messages())

    def to_text(self) -> str:
        lines = [
            "trace-version: 1",
            f"topology: {self.topology}",
            f"discovery-model: {self.discovery_model}",
            f"outcome: {self.outcome}",
        ]
        for step in self.steps:
            lines.append(f"step {step.index} {step.phase}")
            for note in step.notes:
                lines.append(f"  * {note}")
            for msg in step.messages:
                lines.append(f"  {msg.render()}")
        lines.append(f"total-messages: {self.message_count}")
        lines.append(f"overhead-bytes: {self.overhead_bytes}")
        return "\n".join(lines) + "\n"


def context_gain_reports(trace: ProtocolTrace) -> int:
    """Gain reports delivered to base stations by this pair's setup.

    Only service requests reach a scheduler, so the count is 3 per request —
    independent of how many cellular users the sector hosts.
    """
    return sum(m.context.gain_reports for m in trace.messages()
               if m.kind is MessageKind.SERVICE_REQUEST and m.context)


def full_csi_report_count(n_cellular: int, n_pairs: int) -> int:
    """Gain values a full-knowledge scheduler would need per sector:
    every cross link (M*N), every cellular uplink (M), the D2D links (N)
    and the D2D-to-base links (N)."""
    if n_cellular < 0 or n_pairs < 0:
        raise ValueError("counts must be non-negative")
    return n_cellular * n_pairs + n_cellular + 2 * n_pairs


class _TraceBuilder:
    def __init__(self):
        self.steps: list[TraceStep] = []

    def step(self, phase: str, messages=(), notes=()) -> None:
        self.steps.append(TraceStep(len(self.steps) + 1, phase,
                                    tuple(messages), tuple(notes)))


def _validated(discovery_model: str, response_on_attempt: int, max_retries: int) -> None:
    if discovery_model not in ("A", "B"):
        raise ValueError("discovery_model must be 'A' or 'B'")
    if response_on_attempt < 1:
        raise ValueError("response_on_attempt must be >= 1")
    if max_retries < 0:
        raise ValueError("max_retries must be >= 0")


def _discovery_phase(
    tb: _TraceBuilder, model: str, response_on_attempt: int, max_retries: int
) -> bool:
    """Announce (with retries) and maybe respond. Returns True when answered."""
    note = "model=" + model
    attempts_allowed = 1 + max_retries
    attempts = min(response_on_attempt, attempts_allowed)
    for a in range(attempts):
        retry = " retry" if a else ""
        tb.step("discovery", [Message(
            MessageKind.DISCOVERY_ANNOUNCE, "ue-a", "ue-b",
            body_bytes=DISCOVERY_BODY_BYTES, note=note + retry)])
    if response_on_attempt > attempts_allowed:
        return False
    tb.step("discovery-response", [Message(
        MessageKind.DISCOVERY_RESPONSE, "ue-b", "ue-a",
        context=_END_CONTEXT, note=note)])
    return True


def run_single_cell(
    verdict: bool,
    *,
    discovery_model: str = "A",
    response_on_attempt: int = 1,
    max_retries: int = 3,
    discoverer_covered: bool = True,
    discoveree_covered: bool = True,
    reconfigure_cellular: bool = False,
) -> ProtocolTrace:
    """Setup flow when one base station governs both pair ends.

    Accepted runs span eight steps: broadcast, discovery, response, service
    request, scheduler decision, resource grant, pair configuration, data
    start.  A rejection ends the trace right after the decision step.
    """
    _validated(discovery_model, response_on_attempt, max_retries)
    if not (discoverer_covered or discoveree_covered):
        raise ValueError("at least one pair end needs cell coverage")

    requester = "ue-a" if discoverer_covered else "ue-b"
    uncovered = None
    if not discoverer_covered:
        uncovered = "ue-a"
    elif not discoveree_covered:
        uncovered = "ue-b"

    tb = _TraceBuilder()
    tb.step("broadcast", [Message(MessageKind.SIB, "bs-1", "broadcast",
                                  body_bytes=SIB_BODY_BYTES)])
    if not _discovery_phase(tb, discovery_model, response_on_attempt, max_retries):
        return ProtocolTrace("single-cell", discovery_model, "timeout", tuple(tb.steps))

    tb.step("service-request",
            [Message(MessageKind.SERVICE_REQUEST, requester, "bs-1", context=_PAIR_CONTEXT)],
            notes=(f"{requester} rrc idle -> connected",))
    tb.step("rrm-decision", notes=("bs-1 verdict: " + ("accept" if verdict else "reject"),))
    if not verdict:
        return ProtocolTrace("single-cell", discovery_model, "rejected", tuple(tb.steps))

    tb.step("resource-grant", [Message(
        MessageKind.RESOURCE_GRANT, "bs-1", "d2d-pair",
        body_bytes=GRANT_BODY_BYTES + FLAG_BYTES,
        note=f"reconfigure-cellular={str(reconfigure_cellular).lower()}")])
    if uncovered is None:
        tb.step("pair-config", notes=("both ends apply grant",))
    else:
        tb.step("pair-config", [Message(
            MessageKind.CONFIG_EXCHANGE, requester, uncovered,
            body_bytes=CONFIG_BODY_BYTES, note="sidelink forward")])
    tb.step("data-start", [Message(MessageKind.DATA_START, "ue-a", "ue-b")])
    return ProtocolTrace("single-cell", discovery_model, "accepted", tuple(tb.steps))


def run_multi_cell(
    verdict_a: bool,
    verdict_b: bool,
    *,
    discovery_model: str = "A",
    response_on_attempt: int = 1,
    max_retries: int = 3,
) -> ProtocolTrace:
    """Setup flow when the pair ends sit under different base stations.

    Accepted runs span ten steps: both broadcasts, discovery, response,
    sidelink context forward, both service requests, both decisions, both
    grants, grant exchange over the sidelink, pair configuration, and
    bidirectional data start.  Any rejection stops the flow after the grant
    step (only accepting stations transmit one).
    """
    _validated(discovery_model, response_on_attempt, max_retries)
    tb = _TraceBuilder()
    tb.step("broadcast", [
        Message(MessageKind.SIB, "bs-1", "broadcast", body_bytes=SIB_BODY_BYTES),
        Message(MessageKind.SIB, "bs-2", "broadcast", body_bytes=SIB_BODY_BYTES),
    ])
    if not _discovery_phase(tb, discovery_model, response_on_attempt, max_retries):
        return ProtocolTrace("multi-cell", discovery_model, "timeout", tuple(tb.steps))

    tb.step("context-forward", [Message(
        MessageKind.CONTEXT_FORWARD, "ue-a", "ue-b", context=_FORWARD_CONTEXT,
        note="sidelink")])
    tb.step("service-request", [
        Message(MessageKind.SERVICE_REQUEST, "ue-a", "bs-1", context=_PAIR_CONTEXT),
        Message(MessageKind.SERVICE_REQUEST, "ue-b", "bs-2", context=_PAIR_CONTEXT),
    ], notes=("ue-a rrc idle -> connected", "ue-b rrc idle -> connected"))
    tb.step("rrm-decision", notes=(
        "bs-1 verdict: " + ("accept" if verdict_a else "reject"),
        "bs-2 verdict: " + ("accept" if verdict_b else "reject"),
    ))

    grants = []
    if verdict_a:
        grants.append(Message(MessageKind.RESOURCE_GRANT, "bs-1", "ue-a",
                              body_bytes=GRANT_BODY_BYTES + FLAG_BYTES,
                              note="reconfigure-cellular=false"))
    if verdict_b:
        grants.append(Message(MessageKind.RESOURCE_GRANT, "bs-2", "ue-b",
                              body_bytes=GRANT_BODY_BYTES + FLAG_BYTES,
                              note="reconfigure-cellular=false"))
    if grants:
        tb.step("resource-grant", grants)
    if not (verdict_a and verdict_b):
        return ProtocolTrace("multi-cell", discovery_model, "rejected", tuple(tb.steps))

    tb.step("config-exchange", [
        Message(MessageKind.CONFIG_EXCHANGE, "ue-a", "ue-b",
                body_bytes=CONFIG_BODY_BYTES, note="sidelink"),
        Message(MessageKind.CONFIG_EXCHANGE, "ue-b", "ue-a",
                body_bytes=CONFIG_BODY_BYTES, note="sidelink"),
    ])
    tb.step("pair-config", notes=("both ends apply exchanged grants",))
    tb.step("data-start", [
        Message(MessageKind.DATA_START, "ue-a", "ue-b"),
        Message(MessageKind.DATA_START, "ue-b", "ue-a"),
    ])
    return ProtocolTrace("multi-cell", discovery_model, "accepted", tuple(tb.steps))
