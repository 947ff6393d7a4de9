"""Call-graph profiler for hierarchical circuits, gprof-style output.

Costs are computed analytically from the call graph: each routine's
per-invocation self cost is the sum of its own gate durations, totals fold
in sub-routine totals, and call counts multiply along every path from the
root.  Profiling therefore never enumerates the flattened sequence, so
circuits with billions of gates profile in milliseconds.

Inverted calls are attributed to a distinct node carrying the ``D-`` prefix
(gate durations are inversion-invariant, but the adjoint is a different
routine to the eye reading the report).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import Call, Circuit, CircuitError, Gate, group_instructions
from .transpiler import TimingModel


@dataclass
class ProfileEdge:
    """One parent->child arc: edge call count and attributed costs (s)."""

    parent: str
    child: str
    calls: int
    self_seconds: float
    descendant_seconds: float


@dataclass
class ProfileNode:
    """Aggregate costs of one routine across all its invocations."""

    name: str
    calls: int
    self_per_call: float
    total_per_call: float
    parents: list[ProfileEdge] = field(default_factory=list)
    children: list[ProfileEdge] = field(default_factory=list)

    @property
    def self_seconds(self) -> float:
        return self.calls * self.self_per_call

    @property
    def total_seconds(self) -> float:
        return self.calls * self.total_per_call


@dataclass
class ProfileReport:
    """Per-routine cost table; root holds the whole-circuit estimate."""

    root: str
    total_seconds: float
    nodes: list[ProfileNode]

    def node(self, name: str) -> ProfileNode:
        for n in self.nodes:
            if n.name == name:
                return n
        raise KeyError(name)


def _display_name(routine: str, inverted: bool) -> str:
    if not inverted:
        return routine
    return routine[2:] if routine.startswith("D-") else "D-" + routine


def profile(circuit: Circuit, model: TimingModel) -> ProfileReport:
    """Per-routine self/total cost and call counts under a timing model."""
    root_key = ("", False)

    def body_of(key):
        return circuit.body if key == root_key else circuit.routines[key[0]].body

    # discover reachable (routine, inverted) nodes
    keys = [root_key]
    seen = {root_key}
    stack = [root_key]
    while stack:
        key = stack.pop()
        for instr, _ in group_instructions(body_of(key)):
            if isinstance(instr, Call):
                child = (instr.routine, key[1] ^ instr.inverted)
                if child not in seen:
                    seen.add(child)
                    keys.append(child)
                    stack.append(child)

    # per-invocation self cost and child multiplicities
    self_ns: dict[tuple, float] = {}
    edges: dict[tuple, dict[tuple, int]] = {}
    for key in keys:
        cost = 0.0
        mults: dict[tuple, int] = {}
        for instr, mult in group_instructions(body_of(key)):
            if isinstance(instr, Gate):
                cost += mult * model.gate_duration_ns(instr.kind)
            else:
                child = (instr.routine, key[1] ^ instr.inverted)
                mults[child] = mults.get(child, 0) + mult
        self_ns[key] = cost
        edges[key] = mults

    # bottom-up totals over the DAG
    total_ns: dict[tuple, float] = {}

    def total_of(key, trail=()) -> float:
        if key in total_ns:
            return total_ns[key]
        if key in trail:
            raise CircuitError(f"recursion through routine {key[0]!r}")
        acc = self_ns[key]
        for child, mult in edges[key].items():
            acc += mult * total_of(child, trail + (key,))
        total_ns[key] = acc
        return acc

    total_of(root_key)

    # top-down call counts
    calls: dict[tuple, int] = {key: 0 for key in keys}
    calls[root_key] = 1
    order = _topological(root_key, edges)
    for key in order:
        for child, mult in edges[key].items():
            calls[child] += calls[key] * mult

    root_name = circuit.name
    names = {key: (root_name if key == root_key else _display_name(*key))
             for key in keys}
    if len(set(names.values())) != len(names):
        raise CircuitError("routine display names collide in the profile")

    nodes = {
        key: ProfileNode(
            name=names[key],
            calls=calls[key],
            self_per_call=self_ns[key] * 1e-9,
            total_per_call=total_ns[key] * 1e-9,
        )
        for key in keys
    }
    for key in order:
        for child, mult in edges[key].items():
            edge_calls = calls[key] * mult
            edge = ProfileEdge(
                parent=names[key],
                child=names[child],
                calls=edge_calls,
                self_seconds=edge_calls * nodes[child].self_per_call,
                descendant_seconds=edge_calls
                * (nodes[child].total_per_call - nodes[child].self_per_call),
            )
            nodes[key].children.append(edge)
            nodes[child].parents.append(edge)

    ordered = sorted(nodes.values(), key=lambda n: (-n.total_seconds, n.name))
    return ProfileReport(
        root=root_name,
        total_seconds=nodes[root_key].total_seconds,
        nodes=ordered,
    )


def _topological(root_key, edges) -> list:
    order: list = []
    state: dict = {}

    def visit(key):
        if state.get(key) == 2:
            return
        if state.get(key) == 1:
            raise CircuitError(f"recursion through routine {key[0]!r}")
        state[key] = 1
        for child in edges[key]:
            visit(child)
        state[key] = 2
        order.append(key)

    visit(root_key)
    return list(reversed(order))


def oracle_fraction(report: ProfileReport, marker: str = "oracle") -> float:
    """Share of total time inside the outermost routines whose name carries
    the marker (nested marked routines are not double counted)."""
    if report.total_seconds == 0:
        return 0.0
    marked = {n.name for n in report.nodes if marker in n.name}
    outer = 0.0
    for node in report.nodes:
        if node.name not in marked:
            continue
        # attributed via edges from unmarked parents only
        outer += sum(
            e.self_seconds + e.descendant_seconds
            for e in node.parents
            if e.parent not in marked
        )
    return outer / report.total_seconds


# -- gprof-format rendering ---------------------------------------------------


def render_gprof(report: ProfileReport) -> str:
    """Two-section gprof text: flat profile and call graph.

    The call-graph section follows GNU gprof closely enough for gprof2dot's
    parser: the exact header line, one dashed separator after every entry,
    and a form feed terminating the section.
    """
    lines: list[str] = []
    total = report.total_seconds

    flat = sorted(report.nodes, key=lambda n: (-n.self_seconds, n.name))
    lines.append("Flat profile:")
    lines.append("")
    lines.append("Each sample counts as 0.01 seconds.")
    lines.append("  %   cumulative   self              self     total           ")
    lines.append(" time   seconds   seconds    calls  ms/call  ms/call  name    ")
    cumulative = 0.0
    for node in flat:
        cumulative += node.self_seconds
        pct = 100.0 * node.self_seconds / total if total else 0.0
        lines.append(
            f"{pct:6.2f} {cumulative:10.2f} {node.self_seconds:8.2f} "
            f"{node.calls:8d} {node.self_per_call * 1e3:8.2f} "
            f"{node.total_per_call * 1e3:8.2f}  {node.name}"
        )
    lines.append("")
    lines.append("\f")
    lines.append("\t\t     Call graph (explanation follows)")
    lines.append("")
    lines.append("")
    lines.append(
        f"granularity: each sample hit covers 2 byte(s) for "
        f"{(100.0 / total if total else 0.0):.2f}% of {total:.2f} seconds"
    )
    lines.append("")
    lines.append("index % time    self  children    called     name")

    index = {node.name: i + 1 for i, node in enumerate(report.nodes)}
    for node in report.nodes:
        pct = 100.0 * node.total_seconds / total if total else 0.0
        if node.name == report.root:
            lines.append(f"{'':49}<spontaneous>")
        else:
            for e in sorted(node.parents, key=lambda e: index[e.parent]):
                lines.append(
                    f"{'':16}{e.self_seconds:7.2f} {e.descendant_seconds:7.2f} "
                    f"{e.calls:7d}/{node.calls:<7d}     {e.parent} [{index[e.parent]}]"
                )
        tag = f"[{index[node.name]}]"
        called = "" if node.name == report.root else f"{node.calls:7d}"
        descendants = node.total_seconds - node.self_seconds
        lines.append(
            f"{tag:<6} {pct:5.1f} {node.self_seconds:7.2f} {descendants:11.2f} "
            f"{called:>7}         {node.name} [{index[node.name]}]"
        )
        for e in sorted(node.children, key=lambda e: index[e.child]):
            child_node = report.node(e.child)
            lines.append(
                f"{'':16}{e.self_seconds:7.2f} {e.descendant_seconds:7.2f} "
                f"{e.calls:7d}/{child_node.calls:<7d}     {e.child} [{index[e.child]}]"
            )
        lines.append("-----------------------------------------------")
    lines.append("\f")
    lines.append("Index by function name")
    lines.append("")
    for node in sorted(report.nodes, key=lambda n: n.name):
        lines.append(f"   [{index[node.name]}] {node.name}")
    return "\n".join(lines) + "\n"


def render_dot(report: ProfileReport, threshold: float = 0.10) -> str:
    """DOT export of the call graph pruned at a total-time share threshold.

    Node labels carry the routine name, total and self percentages, and the
    call count.
    """
    total = report.total_seconds or 1.0
    kept = [n for n in report.nodes if n.total_seconds / total >= threshold]
    kept_names = {n.name for n in kept}
    lines = ["digraph callgraph {", '    node [shape=box];']
    for node in kept:
        label = (
            f"{node.name}\\ntotal: {100.0 * node.total_seconds / total:.1f}%"
            f"\\nself: {100.0 * node.self_seconds / total:.1f}%"
            f"\\ncalls: {node.calls}"
        )
        lines.append(f'    "{node.name}" [label="{label}"];')
    for node in kept:
        for e in node.children:
            if e.child in kept_names:
                lines.append(f'    "{node.name}" -> "{e.child}" [label="{e.calls}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
