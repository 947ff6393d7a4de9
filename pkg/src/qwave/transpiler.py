"""Lowering to the {U1, U2, U3, CNOT} hardware gate set and pulse timing.

U-family semantics (little-endian, matrices in :mod:`qwave.statevector`):

    U3(lam, phi, theta) = [[cos(t/2),            -e^{i lam} sin(t/2)],
                           [e^{i phi} sin(t/2),   e^{i(lam+phi)} cos(t/2)]]
    U2(p0, p1)          = U3(p1, p0, pi/2)
    U1(lam)             = diag(1, e^{i lam})

Every translation rule below is exact (not merely up to phase); the only
phase loss is GLOBAL_PHASE, which is dropped and reported as an aggregate.

The timing model charges each gate a pulse duration: U1 is a frame change
(free), U2 one single-qubit pulse, U3 two, CNOT one two-qubit pulse, each
plus a buffer.  Estimates are over the flattened sequence with no
parallelism credit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .circuit import (
    TARGET_GATES,
    Call,
    Circuit,
    CircuitError,
    Gate,
    counts_by_kind,
    group_instructions,
)


def _u1(q: int, lam: float) -> Gate:
    return Gate("U1", (q,), (lam,))


def _u2(q: int, p0: float, p1: float) -> Gate:
    return Gate("U2", (q,), (p0, p1))


def _u3(q: int, lam: float, phi: float, theta: float) -> Gate:
    return Gate("U3", (q,), (lam, phi, theta))


def _cnot(c: int, t: int) -> Gate:
    return Gate("CNOT", (c, t))


def translate_gate(g: Gate) -> list[Gate]:
    """Exact translation of one native gate into target gates."""
    if g.kind in TARGET_GATES:
        return [g]
    if g.kind == "H":
        return [_u2(g.qubits[0], 0.0, math.pi)]
    if g.kind == "X":
        return [_u3(g.qubits[0], math.pi, 0.0, math.pi)]
    if g.kind == "RY":
        return [_u3(g.qubits[0], 0.0, 0.0, g.params[0])]
    if g.kind == "PH":
        return [_u1(g.qubits[0], g.params[0])]
    if g.kind == "CPH":
        c, t = g.qubits
        half = g.params[0] / 2.0
        return [_u1(c, half), _cnot(c, t), _u1(t, -half), _cnot(c, t), _u1(t, half)]
    if g.kind == "CCNOT":
        a, b, t = g.qubits
        quarter = math.pi / 4.0
        return [
            _u2(t, 0.0, math.pi),
            _cnot(b, t), _u1(t, -quarter),
            _cnot(a, t), _u1(t, quarter),
            _cnot(b, t), _u1(t, -quarter),
            _cnot(a, t),
            _u1(b, quarter), _u1(t, quarter),
            _cnot(a, b), _u2(t, 0.0, math.pi),
            _u1(a, quarter), _u1(b, -quarter),
            _cnot(a, b),
        ]
    if g.kind == "GLOBAL_PHASE":
        return []
    raise CircuitError(f"no translation rule for gate kind {g.kind!r}")


def translation_size(kind: str) -> int:
    """Number of target gates one native gate expands to."""
    if kind in TARGET_GATES:
        return 1
    qubits = tuple(range(3))[: {"CCNOT": 3, "CPH": 2, "CNOT": 2}.get(kind, 1)]
    params = (0.5,) * {"RY": 1, "PH": 1, "CPH": 1, "GLOBAL_PHASE": 1,
                       "U1": 1, "U2": 2, "U3": 3}.get(kind, 0)
    if kind == "GLOBAL_PHASE":
        return 0
    return len(translate_gate(Gate(kind, qubits, params)))


def transpile(circuit: Circuit) -> Circuit:
    """Hierarchy-preserving rewrite of every gate into the target set."""
    return transpile_info(circuit)[0]


def transpile_info(circuit: Circuit) -> tuple[Circuit, float]:
    """Transpile and report the aggregate global phase that was dropped.

    The aggregate sums the flattened occurrences of GLOBAL_PHASE (inverted
    calls contribute with opposite sign), so unitary(source) equals
    e^{i phase} unitary(result).
    """
    new_routines: dict[str, Circuit] = {}
    for name in sorted(circuit.routines):
        sub = circuit.routines[name]
        new_routines[name] = Circuit(
            sub.name, sub.arity, _translate_body(sub.body), new_routines
        )
    result = Circuit(circuit.name, circuit.arity, _translate_body(circuit.body),
                     new_routines)
    return result, _dropped_phase(circuit)


def _translate_body(body) -> tuple:
    out = []
    i, n = 0, len(body)
    while i < n:  # consecutive aliased runs translate once
        instr = body[i]
        j = i + 1
        while j < n and body[j] is instr:
            j += 1
        piece = translate_gate(instr) if isinstance(instr, Gate) else [instr]
        out.extend(piece * (j - i) if j - i > 1 else piece)
        i = j
    return tuple(out)


def _dropped_phase(circuit: Circuit) -> float:
    memo: dict[str, float] = {}

    def routine_phase(name: str) -> float:
        if name not in memo:
            memo[name] = body_phase(circuit.routines[name].body)
        return memo[name]

    def body_phase(body) -> float:
        acc = 0.0
        for instr, mult in group_instructions(body):
            if isinstance(instr, Gate):
                if instr.kind == "GLOBAL_PHASE":
                    acc += mult * instr.params[0]
            else:
                sign = -1.0 if instr.inverted else 1.0
                acc += mult * sign * routine_phase(instr.routine)
        return acc

    return body_phase(circuit.body)


@dataclass(frozen=True)
class TimingModel:
    """Pulse durations (ns) and the per-gate duration table they induce."""

    gd_ns: float = 100.0
    gf_ns: float = 347.0
    buffer_ns: float = 20.0
    durations_ns: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if min(self.gd_ns, self.gf_ns, self.buffer_ns) < 0:
            raise CircuitError("pulse durations must be non-negative")
        if any(v < 0 for v in self.durations_ns.values()):
            raise CircuitError("gate durations must be non-negative")

    def target_duration_ns(self, kind: str) -> float:
        if kind in self.durations_ns:
            return self.durations_ns[kind]
        if kind == "U1":
            return 0.0  # frame change
        if kind == "U2":
            return self.gd_ns + self.buffer_ns
        if kind == "U3":
            return 2.0 * (self.gd_ns + self.buffer_ns)
        if kind == "CNOT":
            return self.gf_ns + self.buffer_ns
        raise CircuitError(f"{kind!r} is not a target gate kind")

    def gate_duration_ns(self, kind: str) -> float:
        """Duration of any gate kind; native kinds cost their translation."""
        if kind in TARGET_GATES:
            return self.target_duration_ns(kind)
        if kind == "GLOBAL_PHASE":
            return 0.0
        qubits = tuple(range(3))[: {"CCNOT": 3, "CPH": 2}.get(kind, 1)]
        params = (0.5,) * {"RY": 1, "PH": 1, "CPH": 1}.get(kind, 0)
        return sum(
            self.target_duration_ns(g.kind)
            for g in translate_gate(Gate(kind, qubits, params))
        )


def estimate_time(circuit: Circuit, model: TimingModel) -> float:
    """Seconds to execute the flattened transpiled sequence, no parallelism."""
    total_ns = 0.0
    for kind, count in counts_by_kind(circuit).items():
        if kind not in TARGET_GATES:
            raise CircuitError(
                f"estimate_time expects a transpiled circuit, found {kind!r}"
            )
        total_ns += count * model.target_duration_ns(kind)
    return total_ns * 1e-9


def load_timing_model(path: str) -> TimingModel:
    """Read gd_ns / gf_ns / buffer_ns (and per-gate overrides) from text.

    One ``name value`` or ``name=value`` pair per line; ``#`` comments.
    Names other than the three pulse constants override per-gate durations.
    """
    pulses = {}
    table: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            name, _, value = line.replace("=", " ").partition(" ")
            if not value.strip():
                raise CircuitError(f"malformed timing line {raw!r}")
            if name in ("gd_ns", "gf_ns", "buffer_ns"):
                pulses[name] = float(value)
            else:
                table[name] = float(value)
    return TimingModel(durations_ns=table, **pulses)
