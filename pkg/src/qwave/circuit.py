"""Hierarchical quantum circuit IR: gates, named routines, calls, inversion.

A :class:`Circuit` is an immutable program over a fixed number of qubits.
Its body mixes raw :class:`Gate` instructions with :class:`Call` instructions
that invoke named sub-circuits (routines) on a caller-chosen qubit subset,
optionally inverted.  All analysis passes (flattening, counting, profiling)
treat the call graph as a DAG; recursion is rejected at construction time.

Qubit convention: registers are little-endian, qubit 0 is the least
significant bit of any integer encoded on a register.  This convention is
global, including JSON serialization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Union

# Native construction alphabet plus the {U1, U2, U3, CNOT} hardware target
# set produced by the transpiler.  GLOBAL_PHASE acts on zero qubits and
# multiplies the state by e^{i*angle}; keeping it explicit makes controlled
# routines and unitary-equality checks exact instead of "up to phase".
GATE_ARITY = {
    "H": 1,
    "X": 1,
    "RY": 1,
    "PH": 1,
    "CPH": 2,
    "CNOT": 2,
    "CCNOT": 3,
    "GLOBAL_PHASE": 0,
    "U1": 1,
    "U2": 1,
    "U3": 1,
}

GATE_PARAM_COUNT = {
    "H": 0,
    "X": 0,
    "RY": 1,
    "PH": 1,
    "CPH": 1,
    "CNOT": 0,
    "CCNOT": 0,
    "GLOBAL_PHASE": 1,
    "U1": 1,
    "U2": 2,
    "U3": 3,
}

NATIVE_GATES = frozenset({"H", "X", "RY", "PH", "CPH", "CNOT", "CCNOT", "GLOBAL_PHASE"})
TARGET_GATES = frozenset({"U1", "U2", "U3", "CNOT"})

# Self-inverse gates; parametric gates invert by negating every parameter,
# except U2/U3 which have their own rules (see _invert_gate).
_SELF_INVERSE = frozenset({"H", "X", "CNOT", "CCNOT"})


class CircuitError(Exception):
    """Structural error in a circuit: bad qubits, unresolved call, recursion."""


@dataclass(frozen=True)
class Gate:
    """A single gate application: kind, qubit indices, real parameters."""

    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()


@dataclass(frozen=True)
class Call:
    """Invocation of a named routine on a subset of the caller's qubits.

    ``qubits[i]`` is the caller index bound to routine-local qubit ``i``.
    """

    routine: str
    qubits: tuple[int, ...]
    inverted: bool = False


Instruction = Union[Gate, Call]


@dataclass(frozen=True)
class Circuit:
    """Immutable named circuit with a table of callable sub-routines.

    The routine table is a flat namespace containing every routine reachable
    from the body (transitively).  Circuits compare structurally.
    """

    name: str
    arity: int
    body: tuple[Instruction, ...]
    routines: dict[str, "Circuit"] = field(default_factory=dict)

    def __post_init__(self):
        _validate_circuit(self)

    def __hash__(self):  # identity hash: used only for compilation caches
        return id(self)


def gate(kind: str, *qubits: int, params: tuple[float, ...] = ()) -> Gate:
    """Build a validated Gate instruction."""
    g = Gate(kind, tuple(qubits), tuple(float(p) for p in params))
    _validate_gate(g, arity=None)
    return g


def _validate_gate(g: Gate, arity: int | None) -> None:
    if g.kind not in GATE_ARITY:
        raise CircuitError(f"unknown gate kind {g.kind!r}")
    if len(g.qubits) != GATE_ARITY[g.kind]:
        raise CircuitError(
            f"{g.kind} acts on {GATE_ARITY[g.kind]} qubit(s), got {len(g.qubits)}"
        )
    if len(g.params) != GATE_PARAM_COUNT[g.kind]:
        raise CircuitError(
            f"{g.kind} takes {GATE_PARAM_COUNT[g.kind]} parameter(s), got {len(g.params)}"
        )
    if len(set(g.qubits)) != len(g.qubits):
        raise CircuitError(f"duplicate qubit in {g.kind} on {g.qubits}")
    for p in g.params:
        if p != p or p in (float("inf"), float("-inf")):
            raise CircuitError(f"non-finite parameter in {g.kind}")
    if arity is not None:
        for q in g.qubits:
            if not 0 <= q < arity:
                raise CircuitError(f"qubit {q} out of range for arity {arity}")


def _validate_circuit(c: Circuit) -> None:
    if c.arity < 0:
        raise CircuitError("negative arity")
    # Bodies can contain millions of aliased repeats of the same instruction
    # object; validate each distinct object once.
    seen: set[int] = set()
    for instr in c.body:
        if id(instr) in seen:
            continue
        seen.add(id(instr))
        if isinstance(instr, Gate):
            _validate_gate(instr, c.arity)
        elif isinstance(instr, Call):
            target = c.routines.get(instr.routine)
            if target is None:
                raise CircuitError(f"call to undefined routine {instr.routine!r}")
            if len(instr.qubits) != target.arity:
                raise CircuitError(
                    f"call to {instr.routine!r} binds {len(instr.qubits)} qubits, "
                    f"routine arity is {target.arity}"
                )
            if len(set(instr.qubits)) != len(instr.qubits):
                raise CircuitError(f"duplicate qubit in call to {instr.routine!r}")
            for q in instr.qubits:
                if not 0 <= q < c.arity:
                    raise CircuitError(f"qubit {q} out of range for arity {c.arity}")
        else:
            raise CircuitError(f"unknown instruction {instr!r}")
    _check_acyclic(c)


def _check_acyclic(c: Circuit) -> None:
    state: dict[str, int] = {}  # 1 = visiting, 2 = done

    def visit(name: str) -> None:
        if state.get(name) == 2:
            return
        if state.get(name) == 1:
            raise CircuitError(f"recursive routine {name!r}")
        state[name] = 1
        routine = c.routines[name]
        for instr in routine.body:
            if isinstance(instr, Call):
                if instr.routine not in c.routines:
                    raise CircuitError(
                        f"routine {name!r} calls undefined {instr.routine!r}"
                    )
                visit(instr.routine)
        state[name] = 2

    for instr in c.body:
        if isinstance(instr, Call):
            visit(instr.routine)


class CircuitBuilder:
    """Accumulates instructions and referenced routines, then freezes a Circuit."""

    def __init__(self, name: str, arity: int):
        self.name = name
        self.arity = arity
        self._body: list[Instruction] = []
        self._routines: dict[str, Circuit] = {}

    # -- gate helpers -------------------------------------------------------
    def gate(self, kind: str, *qubits: int, params: tuple[float, ...] = ()) -> None:
        self._body.append(Gate(kind, tuple(qubits), tuple(float(p) for p in params)))

    def h(self, q: int) -> None:
        self.gate("H", q)

    def x(self, q: int) -> None:
        self.gate("X", q)

    def ry(self, theta: float, q: int) -> None:
        self.gate("RY", q, params=(theta,))

    def ph(self, theta: float, q: int) -> None:
        self.gate("PH", q, params=(theta,))

    def cph(self, theta: float, control: int, target: int) -> None:
        self.gate("CPH", control, target, params=(theta,))

    def cnot(self, control: int, target: int) -> None:
        self.gate("CNOT", control, target)

    def ccnot(self, c1: int, c2: int, target: int) -> None:
        self.gate("CCNOT", c1, c2, target)

    def global_phase(self, angle: float) -> None:
        self.gate("GLOBAL_PHASE", params=(angle,))

    # -- composition --------------------------------------------------------
    def call(self, routine: Circuit, qubits: list[int] | tuple[int, ...],
             inverted: bool = False, repeat: int = 1) -> None:
        """Call ``routine`` on the given caller qubits, merging its routine table."""
        self.add_routine(routine)
        instr = Call(routine.name, tuple(qubits), inverted)
        if repeat == 1:
            self._body.append(instr)
        else:
            self._body.extend([instr] * repeat)

    def add_routine(self, routine: Circuit) -> None:
        """Register ``routine`` (and its dependencies) without calling it."""
        for name, sub in routine.routines.items():
            self._merge(name, sub)
        self._merge(routine.name, routine)

    def inline(self, routine: Circuit, qubits: list[int] | tuple[int, ...],
               inverted: bool = False) -> None:
        """Splice a routine's instructions directly into this body (no Call)."""
        qmap = tuple(qubits)
        if len(qmap) != routine.arity:
            raise CircuitError(f"inline of {routine.name!r}: qubit map size mismatch")
        body = invert(routine).body if inverted else routine.body
        for instr in body:
            remapped = tuple(qmap[q] for q in instr.qubits)
            if isinstance(instr, Gate):
                self._body.append(Gate(instr.kind, remapped, instr.params))
            else:
                self._merge_from(routine, instr.routine)
                self._body.append(Call(instr.routine, remapped, instr.inverted))

    def _merge_from(self, source: Circuit, name: str) -> None:
        self._merge(name, source.routines[name])
        for instr in source.routines[name].body:
            if isinstance(instr, Call):
                self._merge_from(source, instr.routine)

    def _merge(self, name: str, sub: Circuit) -> None:
        existing = self._routines.get(name)
        if existing is None:
            self._routines[name] = sub
        elif existing is not sub and existing != sub:
            raise CircuitError(f"conflicting definitions for routine {name!r}")

    def build(self) -> Circuit:
        return Circuit(self.name, self.arity, tuple(self._body), dict(self._routines))


def _invert_gate(g: Gate) -> Gate:
    if g.kind in _SELF_INVERSE:
        return g
    if g.kind == "U2":
        from math import pi

        p0, p1 = g.params
        return Gate("U2", g.qubits, (pi - p1, pi - p0))
    if g.kind == "U3":
        lam, phi, theta = g.params
        return Gate("U3", g.qubits, (-phi, -lam, -theta))
    # RY, PH, CPH, GLOBAL_PHASE, U1: negate the angle(s)
    return Gate(g.kind, g.qubits, tuple(-p for p in g.params))


def _invert_name(name: str) -> str:
    return name[2:] if name.startswith("D-") else "D-" + name


def invert(circuit: Circuit) -> Circuit:
    """Adjoint circuit: reversed body, gates inverted, calls flagged inverted."""
    body = tuple(
        _invert_gate(instr)
        if isinstance(instr, Gate)
        else Call(instr.routine, instr.qubits, not instr.inverted)
        for instr in reversed(circuit.body)
    )
    return Circuit(_invert_name(circuit.name), circuit.arity, body, circuit.routines)


def flatten(circuit: Circuit) -> Circuit:
    """Equivalent circuit with every Call recursively expanded into gates."""
    out: list[Gate] = []

    def expand(c: Circuit, qmap: tuple[int, ...], inverted: bool) -> None:
        body = c.body if not inverted else tuple(reversed(c.body))
        for instr in body:
            if isinstance(instr, Gate):
                g = _invert_gate(instr) if inverted else instr
                out.append(Gate(g.kind, tuple(qmap[q] for q in g.qubits), g.params))
            else:
                sub = circuit.routines.get(instr.routine)
                if sub is None:
                    raise CircuitError(f"unresolved routine {instr.routine!r}")
                sub_map = tuple(qmap[q] for q in instr.qubits)
                expand(sub, sub_map, inverted ^ instr.inverted)

    expand(circuit, tuple(range(circuit.arity)), False)
    return Circuit(circuit.name, circuit.arity, tuple(out), {})


def iter_gates(circuit: Circuit) -> Iterator[Gate]:
    """Stream the flattened gate sequence without materializing it."""

    def expand(c: Circuit, qmap: tuple[int, ...], inverted: bool) -> Iterator[Gate]:
        body = c.body if not inverted else tuple(reversed(c.body))
        for instr in body:
            if isinstance(instr, Gate):
                g = _invert_gate(instr) if inverted else instr
                yield Gate(g.kind, tuple(qmap[q] for q in g.qubits), g.params)
            else:
                sub = circuit.routines[instr.routine]
                sub_map = tuple(qmap[q] for q in instr.qubits)
                yield from expand(sub, sub_map, inverted ^ instr.inverted)

    return expand(circuit, tuple(range(circuit.arity)), False)


def counts_by_kind(circuit: Circuit) -> dict[str, int]:
    """Flattened gate multiset sizes per kind, via call-graph arithmetic."""
    memo: dict[str, dict[str, int]] = {}

    def count_routine(name: str) -> dict[str, int]:
        if name in memo:
            return memo[name]
        acc = _count_body(circuit.routines[name].body, count_routine)
        memo[name] = acc
        return acc

    return _count_body(circuit.body, count_routine)


def group_instructions(body) -> list[tuple[Instruction, int]]:
    """Collapse aliased repeats of the same instruction object into counts."""
    groups: dict[int, list] = {}
    order: list[int] = []
    for instr in body:
        key = id(instr)
        if key in groups:
            groups[key][1] += 1
        else:
            groups[key] = [instr, 1]
            order.append(key)
    return [(groups[k][0], groups[k][1]) for k in order]


def _count_body(body, count_routine) -> dict[str, int]:
    acc: dict[str, int] = {}
    for instr, mult in group_instructions(body):
        if isinstance(instr, Gate):
            acc[instr.kind] = acc.get(instr.kind, 0) + mult
        else:
            for kind, n in count_routine(instr.routine).items():
                acc[kind] = acc.get(kind, 0) + n * mult
    return acc


def gate_count(circuit: Circuit, gate_set: str = "native") -> int:
    """Total flattened gates; GLOBAL_PHASE counts as zero.

    ``gate_set="transpiled"`` counts gates after translation to the
    {U1, U2, U3, CNOT} hardware set.
    """
    counts = counts_by_kind(circuit)
    counts.pop("GLOBAL_PHASE", None)
    if gate_set == "native":
        return sum(counts.values())
    if gate_set == "transpiled":
        from .transpiler import translation_size

        return sum(n * translation_size(kind) for kind, n in counts.items())
    raise ValueError(f"unknown gate set {gate_set!r}")


# -- JSON serialization -----------------------------------------------------
#
# Schema: {"name": str, "arity": int, "body": [instr], "routines": {name: circuit}}
# where instr is {"gate": str, "qubits": [int], "params": [float]} or
# {"call": str, "qubits": [int], "inverted": bool}.  The routine table is a
# flat namespace attached to the top-level object; nested routine entries
# carry empty tables.


def _instr_to_json(instr: Instruction) -> dict:
    if isinstance(instr, Gate):
        return {"gate": instr.kind, "qubits": list(instr.qubits), "params": list(instr.params)}
    return {"call": instr.routine, "qubits": list(instr.qubits), "inverted": instr.inverted}


def _instr_from_json(obj: dict) -> Instruction:
    if "gate" in obj:
        return Gate(obj["gate"], tuple(obj["qubits"]), tuple(obj.get("params", [])))
    return Call(obj["call"], tuple(obj["qubits"]), bool(obj.get("inverted", False)))


def to_json_dict(circuit: Circuit) -> dict:
    return {
        "name": circuit.name,
        "arity": circuit.arity,
        "body": [_instr_to_json(i) for i in circuit.body],
        "routines": {
            name: {
                "name": sub.name,
                "arity": sub.arity,
                "body": [_instr_to_json(i) for i in sub.body],
                "routines": {},
            }
            for name, sub in sorted(circuit.routines.items())
        },
    }


def from_json_dict(obj: dict) -> Circuit:
    raw = {name: entry for name, entry in obj.get("routines", {}).items()}
    built: dict[str, Circuit] = {}

    def build(name: str, trail: tuple[str, ...]) -> Circuit:
        if name in built:
            return built[name]
        if name in trail:
            raise CircuitError(f"recursive routine {name!r}")
        entry = raw.get(name)
        if entry is None:
            raise CircuitError(f"call to undefined routine {name!r}")
        body = [_instr_from_json(i) for i in entry["body"]]
        table: dict[str, Circuit] = {}
        for instr in body:
            if isinstance(instr, Call):
                dep = build(instr.routine, trail + (name,))
                table.update(dep.routines)
                table[instr.routine] = dep
        built[name] = Circuit(entry["name"], entry["arity"], tuple(body), table)
        return built[name]

    body = [_instr_from_json(i) for i in obj["body"]]
    table: dict[str, Circuit] = {}
    for instr in body:
        if isinstance(instr, Call):
            dep = build(instr.routine, ())
            table.update(dep.routines)
            table[instr.routine] = dep
    return Circuit(obj["name"], obj["arity"], tuple(body), table)


def dumps(circuit: Circuit, indent: int | None = None) -> str:
    return json.dumps(to_json_dict(circuit), indent=indent, sort_keys=True)


def loads(text: str) -> Circuit:
    return from_json_dict(json.loads(text))


def save(circuit: Circuit, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(circuit))


def load(path: str) -> Circuit:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())
