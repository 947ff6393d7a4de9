"""Oracle circuits encoding the two 1-sparse terms of the wave Hamiltonian.

Each term is described in the query model by three reversible circuits: the
column map (row index -> column of the only non-zero entry), the weight bit
(is the entry non-zero), and the sign bit (0 positive, 1 negative).  A
fourth, optional order circuit answers "is the paired column smaller than
the row", which the 1-sparse simulator otherwise has to recompute with a
register-register comparator.

Rows whose weight bit is 0 are padding: their column and sign values are
ignored by the simulator, which lets the column map stay a plain +/-offset
with wrap-around instead of a guarded permutation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, CircuitBuilder, CircuitError
from .gates import add_const, cmp_lt_const, eq_const, or_gate, sub_const


@dataclass(frozen=True)
class OracleSpec:
    """Shape of one encoded term: interior point count and term tag."""

    interior_points: int  # N_c = N_d - 2
    which: int            # +1 couples point i to edge i+1, -1 to edge i

    def __post_init__(self):
        if self.interior_points < 1:
            raise CircuitError("need at least one interior point")
        if self.which not in (1, -1):
            raise CircuitError("term tag must be +1 or -1")

    @property
    def num_row_qubits(self) -> int:
        """Minimal register width holding all 2*N_c + 1 row indices."""
        return (2 * self.interior_points).bit_length()

    @property
    def dimension(self) -> int:
        return 1 << self.num_row_qubits

    @property
    def offset(self) -> int:
        """Column offset: N_c + 1 for the +1 term, N_c for the -1 term."""
        return self.interior_points + (1 if self.which == 1 else 0)

    @property
    def tag(self) -> str:
        return "plus" if self.which == 1 else "minus"


def classical_m_v_s(spec: OracleSpec, x: int) -> tuple[int, int, int]:
    """Reference classical evaluation of the (column, weight, sign) triple."""
    n_c = spec.interior_points
    dim = spec.dimension
    if not 0 <= x < dim:
        raise CircuitError(f"row {x} out of range")
    off = spec.offset
    m = (x + off) % dim if x < off else (x - off) % dim
    if spec.which == 1:
        v = 1 if (x < 2 * n_c + 1 and x != n_c) else 0
        s = 0
    else:
        v = 1 if x < 2 * n_c else 0
        s = 0 if (x == 0 or x == n_c) else 1
    return m, v, s


def build_column_oracle(spec: OracleSpec) -> Circuit:
    """Column map: |x>|0> -> |x>|x +/- offset mod 2^q>.

    Layout: row [0, q), output [q, 2q), threshold flag 2q, comparator
    carries [2q+1, 3q+1).  The row is copied, the comparison x < offset
    selects add versus subtract, and the flag is uncomputed by repeating the
    comparison on the untouched row register.
    """
    q = spec.num_row_qubits
    b = CircuitBuilder(f"column_oracle_{spec.tag}", 3 * q + 1)
    row = list(range(q))
    out = list(range(q, 2 * q))
    flag = 2 * q
    carries = list(range(2 * q + 1, 3 * q + 1))
    cmp = cmp_lt_const(q, spec.offset)
    for i in range(q):
        b.cnot(row[i], out[i])
    b.call(cmp, row + [flag] + carries)
    b.call(add_const(q, spec.offset, controlled=True), out + [flag])
    b.x(flag)
    b.call(sub_const(q, spec.offset, controlled=True), out + [flag])
    b.x(flag)
    b.call(cmp, row + [flag] + carries)
    return b.build()


def build_weight_oracle(spec: OracleSpec) -> Circuit:
    """Weight bit: |x>|0> -> |x>|v(x)>.

    Layout: row [0, q), weight q, ancillas [q+1, 2q+1).  The +1 term sets
    the bit for x < 2*N_c + 1 and then corrects the excluded middle row
    x = N_c back to zero with an equality test; the -1 term is a single
    comparison against 2*N_c.
    """
    q = spec.num_row_qubits
    n_c = spec.interior_points
    b = CircuitBuilder(f"weight_oracle_{spec.tag}", 2 * q + 1)
    row = list(range(q))
    wt = q
    anc = list(range(q + 1, 2 * q + 1))
    if spec.which == 1:
        b.call(cmp_lt_const(q, 2 * n_c + 1), row + [wt] + anc)
        eq = eq_const(q, n_c)
        b.call(eq, row + [wt] + ([anc[0]] if eq.arity == q + 2 else []))
    else:
        b.call(cmp_lt_const(q, 2 * n_c), row + [wt] + anc)
    return b.build()


def build_sign_oracle(spec: OracleSpec) -> Circuit:
    """Sign bit: |x>|0> -> |x>|s(x)>.

    The +1 term has only positive entries, so its circuit is empty (layout:
    row [0, q), sign q).  The -1 term flags every row except x = 0 and
    x = N_c: two equality flags are ORed into a scratch qubit, negated,
    copied out, and everything is uncomputed (layout adds flag ancillas
    q+1, q+2, scratch q+3, and an equality ancilla q+4 for q >= 3).
    """
    q = spec.num_row_qubits
    if spec.which == 1:
        return CircuitBuilder(f"sign_oracle_{spec.tag}", q + 1).build()
    n_c = spec.interior_points
    eq_zero = eq_const(q, 0)
    eq_mid = eq_const(q, n_c)
    uses_anc = eq_zero.arity == q + 2
    b = CircuitBuilder(f"sign_oracle_{spec.tag}", q + 4 + (1 if uses_anc else 0))
    row = list(range(q))
    out = q
    f_a, f_b, scratch = q + 1, q + 2, q + 3
    extra = [q + 4] if uses_anc else []
    union = or_gate()
    b.call(eq_zero, row + [f_a] + extra)
    b.call(eq_mid, row + [f_b] + extra)
    b.call(union, [f_a, f_b, scratch])
    b.x(scratch)
    b.cnot(scratch, out)
    b.x(scratch)
    b.call(union, [f_a, f_b, scratch])  # OR accumulation is an involution
    b.call(eq_mid, row + [f_b] + extra)
    b.call(eq_zero, row + [f_a] + extra)
    return b.build()


def build_order_oracle(spec: OracleSpec) -> Circuit:
    """Order bit: flag ^= [x > m(x)], which for offset maps is [x >= offset].

    Layout matches the comparator: row [0, q), flag q, carries [q+1, 2q+1).
    """
    q = spec.num_row_qubits
    b = CircuitBuilder(f"order_oracle_{spec.tag}", 2 * q + 1)
    b.call(cmp_lt_const(q, spec.offset), list(range(2 * q + 1)))
    b.x(q)
    return b.build()


@dataclass(frozen=True)
class OracleTriple:
    """The three query circuits of one term plus the optional order circuit."""

    num_row_qubits: int
    column: Circuit
    weight: Circuit
    sign: Circuit
    order: Circuit | None = None


def build_oracle_triple(spec: OracleSpec) -> OracleTriple:
    return OracleTriple(
        num_row_qubits=spec.num_row_qubits,
        column=build_column_oracle(spec),
        weight=build_weight_oracle(spec),
        sign=build_sign_oracle(spec),
        order=build_order_oracle(spec),
    )


def evaluate_oracle(circuit: Circuit, num_row_qubits: int, out_width: int) -> list[int]:
    """Read an oracle circuit's classical table off the statevector engine.

    Applies the circuit to every basis row (output and ancillas |0>) and
    decodes the output register; raises if any input leaves the circuit in a
    superposition or with dirty ancillas.
    """
    from . import statevector as sv

    q = num_row_qubits
    table = []
    for x in range(1 << q):
        state = sv.apply(circuit, sv.basis_state(circuit.arity, x))
        idx = int(np.argmax(np.abs(state)))
        if abs(abs(state[idx]) - 1.0) > 1e-9:
            raise CircuitError(f"oracle output not classical on row {x}")
        if idx & ((1 << q) - 1) != x:
            raise CircuitError(f"oracle modified its input register on row {x}")
        value = (idx >> q) & ((1 << out_width) - 1)
        if idx >> (q + out_width):
            raise CircuitError(f"oracle left dirty ancillas on row {x}")
        table.append(value)
    return table


def reconstruct_matrix(triple: OracleTriple) -> np.ndarray:
    """Dense matrix encoded by an oracle triple: entry (x, m(x)) = (-1)^s v.

    Evaluated through the statevector engine, so this checks the circuits,
    not the classical reference functions.
    """
    q = triple.num_row_qubits
    dim = 1 << q
    m_tab = evaluate_oracle(triple.column, q, q)
    v_tab = evaluate_oracle(triple.weight, q, 1)
    s_tab = evaluate_oracle(triple.sign, q, 1)
    mat = np.zeros((dim, dim))
    for x in range(dim):
        if v_tab[x]:
            mat[x, m_tab[x]] = (-1.0) ** s_tab[x] * v_tab[x]
    return mat


def reconstruct_matrix_classical(spec: OracleSpec) -> np.ndarray:
    """Dense matrix from the classical reference functions."""
    dim = spec.dimension
    mat = np.zeros((dim, dim))
    for x in range(dim):
        m, v, s = classical_m_v_s(spec, x)
        if v:
            mat[x, m] = (-1.0) ** s * v
    return mat


def classical_tables(spec: OracleSpec) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """The (column, weight, sign) tables over every row index."""
    cols, weights, signs = [], [], []
    for x in range(spec.dimension):
        m, v, s = classical_m_v_s(spec, x)
        cols.append(m)
        weights.append(v)
        signs.append(s)
    return tuple(cols), tuple(weights), tuple(signs)
