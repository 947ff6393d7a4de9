"""Exact simulation of 1-sparse integer-weighted Hermitian terms and their
Lie-Trotter-Suzuki composition.

A :class:`SparseTerm` bundles the oracle circuits of one term with the
classical tables they encode.  ``term_evolution`` emits a circuit that
implements e^{-iHt} exactly (up to floating point) by pair diagonalization:
the combined oracle loads (column, weight, sign), an order bit sorts each
{x, m(x)} pair into canonical position, a Hadamard maps the pair eigenbasis
onto the order qubit, and a two-qubit diagonal phase applies e^{-+iwt}.
Rows with weight 0 ride along untouched, so padding rows need no special
casing.  Terms with diagonal entries (m(x) = x) take a phase-only path
selected by a register-equality flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, CircuitBuilder, CircuitError
from .oracles import OracleSpec, OracleTriple, build_oracle_triple, classical_tables
from .statevector import expm_hermitian, spectral_norm

EMPIRIC_DIMENSION_CAP = 1 << 12


@dataclass(frozen=True)
class SparseTerm:
    """One 1-sparse Hermitian term: oracle circuits plus classical tables."""

    label: str
    num_row_qubits: int
    column: Circuit
    weight: Circuit
    sign: Circuit
    order: Circuit | None
    col_table: tuple[int, ...]
    weight_table: tuple[int, ...]
    sign_table: tuple[int, ...]
    norm: float = 1.0

    @property
    def dimension(self) -> int:
        return 1 << self.num_row_qubits

    @property
    def has_diagonal(self) -> bool:
        return any(
            v and self.col_table[x] == x for x, v in enumerate(self.weight_table)
        )


@dataclass(frozen=True)
class ProductFormulaPlan:
    """Product-formula parameters driving circuit generation."""

    k: int
    t: float
    epsilon: float
    r: int
    bound: str = "explicit"

    def __post_init__(self):
        if self.k < 1:
            raise CircuitError("formula order index k must be >= 1")
        if self.r < 1:
            raise CircuitError("repetition count r must be >= 1")
        if self.epsilon <= 0:
            raise CircuitError("precision must be positive")


def term_from_spec(spec: OracleSpec) -> SparseTerm:
    """Wave-equation term (oracles plus tables) for one tag of the split."""
    triple = build_oracle_triple(spec)
    cols, weights, signs = classical_tables(spec)
    term = SparseTerm(
        label=spec.tag,
        num_row_qubits=spec.num_row_qubits,
        column=triple.column,
        weight=triple.weight,
        sign=triple.sign,
        order=triple.order,
        col_table=cols,
        weight_table=weights,
        sign_table=signs,
        norm=1.0,
    )
    validate_term(term)
    return term


def term_from_triple(label: str, triple: OracleTriple,
                     col_table, weight_table, sign_table,
                     norm: float = 1.0) -> SparseTerm:
    """Generic term from user-supplied oracles and their classical tables."""
    term = SparseTerm(
        label=label,
        num_row_qubits=triple.num_row_qubits,
        column=triple.column,
        weight=triple.weight,
        sign=triple.sign,
        order=triple.order,
        col_table=tuple(col_table),
        weight_table=tuple(weight_table),
        sign_table=tuple(sign_table),
        norm=norm,
    )
    validate_term(term)
    return term


def validate_term(term: SparseTerm) -> None:
    """Check the Hermiticity preconditions of the pair construction.

    On every row with weight 1: the column map must be an involution and
    weight and sign must agree across each pair.  Padding rows (weight 0)
    are unconstrained.
    """
    dim = term.dimension
    if not (len(term.col_table) == len(term.weight_table) == len(term.sign_table) == dim):
        raise CircuitError("oracle tables must cover every row index")
    if term.norm <= 0:
        raise CircuitError("term norm must be positive")
    for x in range(dim):
        if not term.weight_table[x]:
            continue
        m = term.col_table[x]
        if not 0 <= m < dim:
            raise CircuitError(f"column {m} out of range on row {x}")
        if term.col_table[m] != x:
            raise CircuitError(f"column map is not an involution at row {x}")
        if term.weight_table[m] != term.weight_table[x]:
            raise CircuitError(f"weight differs across the pair ({x}, {m})")
        if term.sign_table[m] != term.sign_table[x]:
            raise CircuitError(f"sign differs across the pair ({x}, {m})")


def dense_matrix(term: SparseTerm) -> np.ndarray:
    """Dense Hermitian matrix encoded by the term's classical tables."""
    dim = term.dimension
    mat = np.zeros((dim, dim))
    for x in range(dim):
        if term.weight_table[x]:
            mat[x, term.col_table[x]] = (
                (-1.0) ** term.sign_table[x] * term.weight_table[x]
            )
    return mat


def simulate_identity_multiple(alpha: float, t: float) -> Circuit:
    """Exact evolution under alpha*I: a single global phase e^{-i alpha t}."""
    b = CircuitBuilder("identity_phase", 0)
    phase = -alpha * t
    if phase != 0.0:
        b.global_phase(phase)
    return b.build()


def exp_zf(t: float) -> Circuit:
    """Diagonal phase e^{-i t f (-1)^z} on |z>|f> for a 1-bit weight f.

    Layout: z = 0, f = 1.  Realized as PH(-t) on the weight qubit plus
    CPH(2t) between the two, so (z, f) = (0, 1) gains e^{-it} and (1, 1)
    gains e^{+it}.
    """
    b = CircuitBuilder("weight_phase", 2)
    if t != 0.0:
        b.ph(-t, 1)
        b.cph(2.0 * t, 0, 1)
    return b.build()


@dataclass(frozen=True)
class _Layout:
    """Qubit assignment shared by every term of one evolution circuit."""

    q: int
    row: tuple[int, ...]
    col: tuple[int, ...]
    wt: int
    sg: int
    order: int
    eq: int | None
    pool: tuple[int, ...]

    @property
    def arity(self) -> int:
        return self.pool[-1] + 1


def _make_layout(q: int, with_diagonal: bool) -> _Layout:
    fixed = 2 * q + 3 + (1 if with_diagonal else 0)
    # pool covers: column oracle flag+carries (q+1), weight carries (q),
    # sign-minus flags+scratch(+mcx) (3 or 4), order carries (q), and the
    # generic register comparator's q+1 carry chain
    pool_size = max(q + 1, 4 if q >= 3 else 3)
    return _Layout(
        q=q,
        row=tuple(range(q)),
        col=tuple(range(q, 2 * q)),
        wt=2 * q,
        sg=2 * q + 1,
        order=2 * q + 2,
        eq=2 * q + 3 if with_diagonal else None,
        pool=tuple(range(fixed, fixed + pool_size)),
    )


def _emit_oracle(b: CircuitBuilder, term: SparseTerm, lay: _Layout,
                 inverted: bool) -> None:
    """The combined oracle O (or its adjoint): column, weight, sign."""
    q = lay.q
    row, pool = list(lay.row), list(lay.pool)
    col_map = list(lay.row) + list(lay.col) + [pool[0]] + pool[1 : q + 1]
    wt_map = row + [lay.wt] + pool[:q]
    sg_map = row + [lay.sg] + pool[: term.sign.arity - q - 1]
    parts = [(term.column, col_map), (term.weight, wt_map), (term.sign, sg_map)]
    for sub, qmap in reversed(parts) if inverted else parts:
        b.call(sub, qmap, inverted=inverted)


def _emit_order_flag(b: CircuitBuilder, term: SparseTerm, lay: _Layout) -> None:
    """Toggle the order qubit with [row > column]."""
    if term.order is not None:
        b.call(term.order, list(lay.row) + [lay.order] + list(lay.pool[: lay.q]))
        return
    _emit_register_greater_than(b, list(lay.row), list(lay.col), lay.order,
                                list(lay.pool[: lay.q + 1]))


def _emit_register_greater_than(b: CircuitBuilder, a: list[int], c: list[int],
                                flag: int, carries: list[int]) -> None:
    """flag ^= [a > c] via the carry of c + ~a + 1 (majority ripple)."""
    n = len(a)

    def majority_chain():
        for i in range(n):
            b.ccnot(c[i], a[i], carries[i + 1])
            b.ccnot(c[i], carries[i], carries[i + 1])
            b.ccnot(a[i], carries[i], carries[i + 1])

    def majority_chain_reversed():
        for i in range(n - 1, -1, -1):
            b.ccnot(a[i], carries[i], carries[i + 1])
            b.ccnot(c[i], carries[i], carries[i + 1])
            b.ccnot(c[i], a[i], carries[i + 1])

    for i in range(n):
        b.x(a[i])
    b.x(carries[0])  # injected +1 of the two's complement
    majority_chain()
    b.cnot(carries[n], flag)
    b.x(flag)
    majority_chain_reversed()
    b.x(carries[0])
    for i in range(n):
        b.x(a[i])


def _emit_equality_flag(b: CircuitBuilder, lay: _Layout) -> None:
    """Toggle the diagonal flag with [row == column]."""
    from .gates import mcx

    q = lay.q
    for i in range(q):
        b.cnot(lay.row[i], lay.col[i])
    for i in range(q):
        b.x(lay.col[i])
    core = mcx(q)
    qmap = list(lay.col) + [lay.eq] + ([lay.pool[0]] if core.arity == q + 2 else [])
    b.call(core, qmap)
    for i in range(q):
        b.x(lay.col[i])
    for i in range(q):
        b.cnot(lay.row[i], lay.col[i])


def _emit_pair_hadamard(b: CircuitBuilder, term: SparseTerm, lay: _Layout) -> None:
    """Hadamard on the order qubit, skipped on diagonal rows (eq flag set)."""
    if not term.has_diagonal:
        b.h(lay.order)
        return
    # anti-controlled H: RY(pi/4) . CZ . RY(-pi/4) equals H when the control
    # fires, so conjugate the control with X to fire on eq = 0
    b.x(lay.eq)
    b.ry(math.pi / 4, lay.order)
    b.cph(math.pi, lay.eq, lay.order)
    b.ry(-math.pi / 4, lay.order)
    b.x(lay.eq)


def _emit_controlled_swap(b: CircuitBuilder, lay: _Layout) -> None:
    """Swap row and column registers where the order qubit is set."""
    for i in range(lay.q):
        b.cnot(lay.col[i], lay.row[i])
        b.ccnot(lay.order, lay.row[i], lay.col[i])
        b.cnot(lay.col[i], lay.row[i])


def _term_evolution_body(b: CircuitBuilder, term: SparseTerm, t: float,
                         lay: _Layout) -> None:
    _emit_oracle(b, term, lay, inverted=False)
    _emit_order_flag(b, term, lay)
    if term.has_diagonal:
        _emit_equality_flag(b, lay)
    _emit_controlled_swap(b, lay)
    _emit_pair_hadamard(b, term, lay)
    b.cnot(lay.sg, lay.order)
    if t != 0.0:
        b.ph(-t, lay.wt)
        b.cph(2.0 * t, lay.order, lay.wt)
    b.cnot(lay.sg, lay.order)
    _emit_pair_hadamard(b, term, lay)
    _emit_controlled_swap(b, lay)
    if term.has_diagonal:
        _emit_equality_flag(b, lay)
    _emit_order_flag(b, term, lay)
    _emit_oracle(b, term, lay, inverted=True)


def _evolution_circuit(term: SparseTerm, t: float, lay: _Layout, name: str) -> Circuit:
    b = CircuitBuilder(name, lay.arity)
    _term_evolution_body(b, term, t, lay)
    return b.build()


def simulate_1sparse(term: SparseTerm, t: float) -> Circuit:
    """Exact e^{-iHt} circuit for one validated 1-sparse term.

    Layout: row register on qubits [0, q); everything else is workspace
    restored to |0>.
    """
    validate_term(term)
    lay = _make_layout(term.num_row_qubits, term.has_diagonal)
    return _evolution_circuit(term, t, lay, f"sparse_evolution_{term.label}")


def evolution_arity(q: int, with_diagonal: bool = False) -> int:
    """Total qubits of a term-evolution circuit for row width q."""
    return _make_layout(q, with_diagonal).arity


def suzuki_coefficients(k: int, num_terms: int, lam: float = 1.0) -> list[tuple[int, float]]:
    """Exponent schedule of the order-2k Suzuki formula.

    Returns (term index, coefficient) pairs such that the product of
    e^{coefficient * H_j} factors, left to right, approximates e^{lam * H}.
    The order-2 base is the forward-then-backward palindrome with half
    coefficients; higher orders apply the five-fold recursion with
    p_k = (4 - 4^{1/(2k-1)})^{-1}.
    """
    if k < 1 or num_terms < 1:
        raise CircuitError("need k >= 1 and at least one term")
    if k == 1:
        half = [(j, lam / 2.0) for j in range(num_terms)]
        return half + half[::-1]
    p = 1.0 / (4.0 - 4.0 ** (1.0 / (2 * k - 1)))
    inner = suzuki_coefficients(k - 1, num_terms, p * lam)
    middle = suzuki_coefficients(k - 1, num_terms, (1.0 - 4.0 * p) * lam)
    return inner + inner + middle + inner + inner


def repetitions(bound: str, k: int, t: float, epsilon: float, num_terms: int,
                lam_norm: float, dense_terms: list[np.ndarray] | None = None) -> int:
    """Repetition count r for a target spectral error.

    ``analytic`` and ``minimised`` are the closed-form and searched bounds on
    tau = 2 m 5^{k-1} Lambda |t|; ``empiric`` measures the actual error with
    dense matrices and returns the smallest sufficient r.
    """
    if epsilon <= 0 or k < 1 or num_terms < 1 or lam_norm <= 0:
        raise CircuitError("bound inputs must be positive")
    tau = 2.0 * num_terms * 5.0 ** (k - 1) * lam_norm * abs(t)
    if bound == "analytic":
        if tau == 0.0:
            return 1
        r = max(tau, (math.e * tau ** (2 * k + 1) / (3.0 * epsilon)) ** (1.0 / (2 * k)))
        return max(1, math.ceil(r))
    if bound == "minimised":
        if tau == 0.0:
            return 1

        def satisfied(r: int) -> bool:
            return tau ** (2 * k + 1) / (3.0 * r ** (2 * k)) * math.exp(tau / r) < epsilon

        hi = 1
        while not satisfied(hi):
            hi *= 2
        lo = max(1, hi // 2)
        while lo < hi:
            mid = (lo + hi) // 2
            if satisfied(mid):
                hi = mid
            else:
                lo = mid + 1
        return hi
    if bound == "empiric":
        if dense_terms is None:
            raise CircuitError("empiric bound needs the dense term matrices")
        dim = dense_terms[0].shape[0]
        if dim > EMPIRIC_DIMENSION_CAP:
            raise CircuitError(
                f"empiric bound refused beyond dimension {EMPIRIC_DIMENSION_CAP}"
            )
        r = 1
        while measured_error(dense_terms, k, t, r) > epsilon:
            r += 1
        return r
    raise CircuitError(f"unknown bound kind {bound!r}")


def measured_error(dense_terms: list[np.ndarray], k: int, t: float, r: int) -> float:
    """Spectral error of [S_2k(-it/r)]^r against the exact exponential."""
    total = sum(dense_terms)
    exact = expm_hermitian(np.asarray(total, dtype=complex), t)
    step = np.eye(dense_terms[0].shape[0], dtype=complex)
    for j, coeff in suzuki_coefficients(k, len(dense_terms)):
        step = step @ expm_hermitian(np.asarray(dense_terms[j], dtype=complex),
                                     coeff * t / r)
    approx = np.linalg.matrix_power(step, r)
    return spectral_norm(exact - approx)


def trotter_simulate(terms: list[SparseTerm], plan: ProductFormulaPlan,
                     name: str = "hamiltonian_evolution") -> Circuit:
    """Product-formula circuit: r repetitions of the S_2k schedule.

    All terms must share the row-register width; the repeated slice is a
    routine named ``trotter_suzuki_formula`` so profiling sees exactly r
    invocations of it.
    """
    if not terms:
        raise CircuitError("need at least one term")
    widths = {term.num_row_qubits for term in terms}
    if len(widths) != 1:
        raise CircuitError("terms must share the register layout")
    for term in terms:
        validate_term(term)
    q = widths.pop()
    lay = _make_layout(q, any(term.has_diagonal for term in terms))
    schedule = suzuki_coefficients(plan.k, len(terms))

    slot_names: dict[tuple[int, float], str] = {}
    slot_circuits: list[Circuit] = []
    for j, coeff in schedule:
        key = (j, coeff)
        if key not in slot_names:
            slot = len([1 for (jj, _) in slot_names if jj == j])
            slot_names[key] = f"term_evolution_{terms[j].label}_s{slot}"
            slot_circuits.append(
                _evolution_circuit(terms[j], coeff * plan.t / plan.r, lay,
                                   slot_names[key])
            )

    step = CircuitBuilder("trotter_suzuki_formula", lay.arity)
    by_name = {c.name: c for c in slot_circuits}
    for j, coeff in schedule:
        step.call(by_name[slot_names[(j, coeff)]], list(range(lay.arity)))
    step_circuit = step.build()

    top = CircuitBuilder(name, lay.arity)
    top.call(step_circuit, list(range(lay.arity)), repeat=plan.r)
    return top.build()
