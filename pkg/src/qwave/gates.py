"""Reusable logic and arithmetic circuit constructors.

Every constructor returns a standalone named :class:`Circuit` over a
canonical local layout (documented per function); callers place it with
``CircuitBuilder.call`` and a qubit map.  Registers are little-endian.

All constructors emit only gates from the native set.  The comparator is
arithmetic-only (X/CNOT/CCNOT): it ripples the carry of ``x + (2^n - c)``
and reads the high bit, so it involves no rotation angles at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .circuit import Circuit, CircuitBuilder, CircuitError


@dataclass(frozen=True)
class ConstOperand:
    """Generation-time unsigned constant baked into a circuit."""

    value: int
    width: int

    def __post_init__(self):
        if self.width < 1:
            raise CircuitError("operand width must be at least 1")
        if not 0 <= self.value < (1 << self.width):
            raise CircuitError(
                f"value {self.value} does not fit in {self.width} bits"
            )


def or_gate() -> Circuit:
    """OR of two qubits: out ^= a | b, using x | y = ~(~x & ~y).

    Layout: a=0, b=1, out=2.  Only X and CCNOT gates.
    """
    b = CircuitBuilder("logical_or", 3)
    b.x(0)
    b.x(1)
    b.ccnot(0, 1, 2)
    b.x(0)
    b.x(1)
    b.x(2)
    return b.build()


def _mcx_ladder(emit, controls: list[int], target: int, dirty: list[int]) -> None:
    """Toffoli ladder flipping target iff all controls are set.

    Works with *dirty* (arbitrary-state) borrowed qubits, which it restores;
    needs len(controls) - 2 of them.  4(k-2) Toffolis for k >= 3 controls.
    """
    k = len(controls)
    if k == 1:
        emit.cnot(controls[0], target)
        return
    if k == 2:
        emit.ccnot(controls[0], controls[1], target)
        return
    if len(dirty) < k - 2:
        raise CircuitError(f"{k}-control ladder needs {k - 2} borrowed qubits")
    d = dirty[: k - 2]

    def half(with_target: bool) -> None:
        if with_target:
            emit.ccnot(controls[k - 1], d[k - 3], target)
        for i in range(k - 3, 0, -1):
            emit.ccnot(controls[i + 1], d[i - 1], d[i])
        emit.ccnot(controls[0], controls[1], d[0])
        for i in range(1, k - 2):
            emit.ccnot(controls[i + 1], d[i - 1], d[i])
        if with_target:
            emit.ccnot(controls[k - 1], d[k - 3], target)

    half(True)
    half(False)


def mcx(num_controls: int) -> Circuit:
    """Multi-controlled X with one clean ancilla.

    Layout: controls [0, k), target k, ancilla k+1 (present for k >= 3; it is
    returned to |0>).  O(k) X/CNOT/CCNOT gates via two Toffoli ladders that
    borrow the idle half of the control register as dirty qubits.
    """
    k = num_controls
    if k < 1:
        raise CircuitError("mcx needs at least one control")
    target = k
    if k == 1:
        b = CircuitBuilder("multi_controlled_x_1", 2)
        b.cnot(0, target)
        return b.build()
    if k == 2:
        b = CircuitBuilder("multi_controlled_x_2", 3)
        b.ccnot(0, 1, target)
        return b.build()
    anc = k + 1
    b = CircuitBuilder(f"multi_controlled_x_{k}", k + 2)
    if k == 3:
        b.ccnot(0, 1, anc)
        b.ccnot(2, anc, target)
        b.ccnot(0, 1, anc)
        return b.build()
    h = (k + 1) // 2
    first = list(range(h))
    second = list(range(h, k))
    # ancilla is clean, so compute AND(first) into it, use it, uncompute
    _mcx_ladder(b, first, anc, dirty=second + [target])
    _mcx_ladder(b, second + [anc], target, dirty=first)
    _mcx_ladder(b, first, anc, dirty=second + [target])
    return b.build()


def eq_const(num_qubits: int, value: int) -> Circuit:
    """Flag flip on register equality with a constant: flag ^= [x == c].

    Layout: register [0, n), flag n, mcx ancilla n+1 (only for n >= 3).
    X gates conjugate the controls whose constant bit is 0.
    """
    n = num_qubits
    c = ConstOperand(value, n)
    uses_ancilla = n >= 3
    b = CircuitBuilder(f"equality_check_{c.value}_w{n}", n + 1 + (1 if uses_ancilla else 0))
    zero_bits = [i for i in range(n) if not (c.value >> i) & 1]
    for q in zero_bits:
        b.x(q)
    core = mcx(n)
    if uses_ancilla:
        b.call(core, list(range(n)) + [n, n + 1])
    else:
        b.call(core, list(range(n)) + [n])
    for q in zero_bits:
        b.x(q)
    return b.build()


def qft(num_qubits: int) -> Circuit:
    """Quantum Fourier transform matching the DFT matrix w^{jk}/sqrt(2^n).

    Layout: register [0, n), little-endian.  H plus controlled phases, with
    a final swap network so the output keeps integer bit order.
    """
    n = num_qubits
    if n < 1:
        raise CircuitError("qft needs at least one qubit")
    b = CircuitBuilder(f"fourier_transform_w{n}", n)
    for i in range(n - 1, -1, -1):
        b.h(i)
        for j in range(i - 1, -1, -1):
            b.cph(math.pi / (1 << (i - j)), j, i)
    for i in range(n // 2):
        j = n - 1 - i
        b.cnot(i, j)
        b.cnot(j, i)
        b.cnot(i, j)
    return b.build()


def add_const(num_qubits: int, value: int, controlled: bool = False) -> Circuit:
    """Draper-style constant adder: x <- (x + c) mod 2^n.

    Layout: register [0, n), plus a control qubit at index n when
    ``controlled``.  QFT, one phase rotation per qubit (angles folding the
    contributions of every set bit of c), inverse QFT.  When controlled, only
    the phase stage is conditioned; the QFT pair cancels on its own.
    """
    n = num_qubits
    c = ConstOperand(value, n)
    name = f"const_add_{c.value}_w{n}" + ("_ctl" if controlled else "")
    b = CircuitBuilder(name, n + (1 if controlled else 0))
    if c.value == 0:
        return b.build()
    fourier = qft(n)
    reg = list(range(n))
    b.call(fourier, reg)
    for j in range(n):
        angle = 2.0 * math.pi * ((c.value << j) % (1 << n)) / (1 << n)
        if angle == 0.0:
            continue
        if controlled:
            b.cph(angle, n, j)
        else:
            b.ph(angle, j)
    b.call(fourier, reg, inverted=True)
    return b.build()


def sub_const(num_qubits: int, value: int, controlled: bool = False) -> Circuit:
    """Constant subtractor via bitwise complement: a - c = (a' + c)'.

    Same layout as :func:`add_const`; exactly 2n extra X gates around one
    adder call.
    """
    n = num_qubits
    c = ConstOperand(value, n)
    name = f"const_subtract_{c.value}_w{n}" + ("_ctl" if controlled else "")
    b = CircuitBuilder(name, n + (1 if controlled else 0))
    adder = add_const(n, c.value, controlled=controlled)
    for q in range(n):
        b.x(q)
    b.call(adder, list(range(adder.arity)))
    for q in range(n):
        b.x(q)
    return b.build()


def _high_bit_compute(num_qubits: int, addend: int) -> Circuit:
    """Carry ripple for x + k over n bits; carry-out lands in the top ancilla.

    Layout: register [0, n), carry ancillas [n, 2n) with carry i+1 of the
    low bits in qubit n+i.  Classical addend bits select the block type:
    AND-carry (one Toffoli) for k_i = 0, OR-carry (Toffoli conjugated by X)
    for k_i = 1.
    """
    n = num_qubits
    b = CircuitBuilder(f"high_bit_compute_{addend}_w{n}", 2 * n)
    car = [n + i for i in range(n)]  # car[i] holds carry_{i+1}
    if (addend >> 0) & 1:
        b.cnot(0, car[0])
    for i in range(1, n):
        prev = car[i - 1]
        if (addend >> i) & 1:
            b.x(i)
            b.x(prev)
            b.ccnot(i, prev, car[i])
            b.x(car[i])
            b.x(i)
            b.x(prev)
        else:
            b.ccnot(i, prev, car[i])
    return b.build()


def cmp_lt_const(num_qubits: int, value: int) -> Circuit:
    """Strict comparator against a constant: flag ^= [x < c].

    Layout: register [0, n), flag n, carry ancillas [n+1, 2n+1) (restored).
    Computes the high bit of x + (2^n - c) by carry ripple; the negated
    carry-out is the comparison result.  X/CNOT/CCNOT only.
    """
    n = num_qubits
    if not 0 <= value <= (1 << n):
        raise CircuitError(f"comparator constant {value} exceeds 2^{n}")
    b = CircuitBuilder(f"arithmetic_compare_lt{value}_w{n}", 2 * n + 1)
    flag = n
    if value == 0:
        return b.build()  # x < 0 never holds
    if value == (1 << n):
        b.x(flag)
        return b.build()  # x < 2^n always holds
    chain = _high_bit_compute(n, (1 << n) - value)
    qmap = list(range(n)) + list(range(n + 1, 2 * n + 1))
    b.call(chain, qmap)
    b.cnot(2 * n, flag)
    b.x(flag)
    b.call(chain, qmap, inverted=True)
    return b.build()
