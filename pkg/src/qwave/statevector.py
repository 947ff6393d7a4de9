"""Dense complex statevector engine and dense-matrix verification utilities.

Gates are applied in place over the amplitude vector with stride arithmetic
per target qubit; 1- and 2-qubit gates never materialize their full matrix.
Circuits are lowered once to a flat numeric program (opcode + qubit + value
arrays) that a numba kernel executes; repeated calls of the same routine
reuse the compiled program.  A pure-numpy executor provides the same
semantics when numba is unavailable.

Basis convention: little-endian, amplitude index i encodes qubit q as bit q
of i.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .circuit import Call, Circuit, CircuitError, Gate, invert, iter_gates

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

DEFAULT_QUBIT_CAP = 20
UNITARY_QUBIT_CAP = 12

# program opcodes
_OP_X = 0
_OP_CNOT = 1
_OP_CCNOT = 2
_OP_PHASE1 = 3
_OP_CPHASE = 4
_OP_MAT1Q = 5
_OP_GPHASE = 6


def gate_matrix(kind: str, params: tuple[float, ...]) -> np.ndarray:
    """Dense 2x2 matrix of a single-qubit gate kind."""
    if kind == "H":
        s = 1 / math.sqrt(2)
        return np.array([[s, s], [s, -s]], dtype=complex)
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "RY":
        (theta,) = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind in ("PH", "U1"):
        (lam,) = params
        return np.array([[1, 0], [0, cmath.exp(1j * lam)]], dtype=complex)
    if kind == "U2":
        p0, p1 = params
        s = 1 / math.sqrt(2)
        return np.array(
            [[s, -s * cmath.exp(1j * p1)],
             [s * cmath.exp(1j * p0), s * cmath.exp(1j * (p0 + p1))]],
            dtype=complex,
        )
    if kind == "U3":
        lam, phi, theta = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array(
            [[c, -s * cmath.exp(1j * lam)],
             [s * cmath.exp(1j * phi), c * cmath.exp(1j * (lam + phi))]],
            dtype=complex,
        )
    raise CircuitError(f"{kind} has no single-qubit matrix")


@dataclass
class _Program:
    op: np.ndarray       # int64[n]
    q0: np.ndarray       # int64[n]
    q1: np.ndarray       # int64[n]
    q2: np.ndarray       # int64[n]
    val: np.ndarray      # complex128[n], phase factors
    mat: np.ndarray      # complex128[n,2,2], 1q matrices


def _compile_gates(gates) -> _Program:
    ops, qs0, qs1, qs2, vals, mats = [], [], [], [], [], []
    eye = np.zeros((2, 2), dtype=complex)
    for g in gates:
        if g.kind == "X":
            ops.append(_OP_X); qs0.append(g.qubits[0]); qs1.append(0); qs2.append(0)
            vals.append(0j); mats.append(eye)
        elif g.kind == "CNOT":
            ops.append(_OP_CNOT)
            qs0.append(g.qubits[0]); qs1.append(g.qubits[1]); qs2.append(0)
            vals.append(0j); mats.append(eye)
        elif g.kind == "CCNOT":
            ops.append(_OP_CCNOT)
            qs0.append(g.qubits[0]); qs1.append(g.qubits[1]); qs2.append(g.qubits[2])
            vals.append(0j); mats.append(eye)
        elif g.kind in ("PH", "U1"):
            ops.append(_OP_PHASE1); qs0.append(g.qubits[0]); qs1.append(0); qs2.append(0)
            vals.append(cmath.exp(1j * g.params[0])); mats.append(eye)
        elif g.kind == "CPH":
            ops.append(_OP_CPHASE)
            qs0.append(g.qubits[0]); qs1.append(g.qubits[1]); qs2.append(0)
            vals.append(cmath.exp(1j * g.params[0])); mats.append(eye)
        elif g.kind == "GLOBAL_PHASE":
            ops.append(_OP_GPHASE); qs0.append(0); qs1.append(0); qs2.append(0)
            vals.append(cmath.exp(1j * g.params[0])); mats.append(eye)
        else:
            ops.append(_OP_MAT1Q); qs0.append(g.qubits[0]); qs1.append(0); qs2.append(0)
            vals.append(0j); mats.append(gate_matrix(g.kind, g.params))
    return _Program(
        np.asarray(ops, dtype=np.int64),
        np.asarray(qs0, dtype=np.int64),
        np.asarray(qs1, dtype=np.int64),
        np.asarray(qs2, dtype=np.int64),
        np.asarray(vals, dtype=np.complex128),
        np.asarray(mats, dtype=np.complex128).reshape(len(ops), 2, 2),
    )


if _HAVE_NUMBA:

    @njit(cache=True)
    def _run_program(op, q0, q1, q2, val, mat, state):  # pragma: no cover - jit
        n = state.shape[0]
        for k in range(op.shape[0]):
            code = op[k]
            if code == _OP_X:
                m = np.int64(1) << q0[k]
                for base in range(n >> 1):
                    i = ((base >> q0[k]) << (q0[k] + 1)) | (base & (m - 1))
                    j = i | m
                    tmp = state[i]
                    state[i] = state[j]
                    state[j] = tmp
            elif code == _OP_CNOT:
                c = np.int64(1) << q0[k]
                m = np.int64(1) << q1[k]
                for base in range(n >> 1):
                    i = ((base >> q1[k]) << (q1[k] + 1)) | (base & (m - 1))
                    if i & c:
                        j = i | m
                        tmp = state[i]
                        state[i] = state[j]
                        state[j] = tmp
            elif code == _OP_CCNOT:
                c1 = np.int64(1) << q0[k]
                c2 = np.int64(1) << q1[k]
                m = np.int64(1) << q2[k]
                for base in range(n >> 1):
                    i = ((base >> q2[k]) << (q2[k] + 1)) | (base & (m - 1))
                    if (i & c1) and (i & c2):
                        j = i | m
                        tmp = state[i]
                        state[i] = state[j]
                        state[j] = tmp
            elif code == _OP_PHASE1:
                m = np.int64(1) << q0[k]
                v = val[k]
                for base in range(n >> 1):
                    i = ((base >> q0[k]) << (q0[k] + 1)) | (base & (m - 1)) | m
                    state[i] = state[i] * v
            elif code == _OP_CPHASE:
                c = np.int64(1) << q0[k]
                m = np.int64(1) << q1[k]
                v = val[k]
                for base in range(n >> 1):
                    i = ((base >> q1[k]) << (q1[k] + 1)) | (base & (m - 1)) | m
                    if i & c:
                        state[i] = state[i] * v
            elif code == _OP_MAT1Q:
                m = np.int64(1) << q0[k]
                a00 = mat[k, 0, 0]
                a01 = mat[k, 0, 1]
                a10 = mat[k, 1, 0]
                a11 = mat[k, 1, 1]
                for base in range(n >> 1):
                    i = ((base >> q0[k]) << (q0[k] + 1)) | (base & (m - 1))
                    j = i | m
                    s0 = state[i]
                    s1 = state[j]
                    state[i] = a00 * s0 + a01 * s1
                    state[j] = a10 * s0 + a11 * s1
            else:  # _OP_GPHASE
                v = val[k]
                for i in range(n):
                    state[i] = state[i] * v

else:

    def _run_program(op, q0, q1, q2, val, mat, state):
        n_qubits = int(math.log2(state.shape[0]))
        view = state.reshape([2] * n_qubits) if n_qubits else state

        def ax(q):
            return n_qubits - 1 - q

        def sl(**bits):
            idx = [slice(None)] * n_qubits
            for q, b in bits.items():
                idx[ax(int(q[1:]))] = b
            return tuple(idx)

        for k in range(op.shape[0]):
            code = op[k]
            if code == _OP_X:
                t = q0[k]
                tmp = view[sl(**{f"q{t}": 0})].copy()
                view[sl(**{f"q{t}": 0})] = view[sl(**{f"q{t}": 1})]
                view[sl(**{f"q{t}": 1})] = tmp
            elif code == _OP_CNOT:
                c, t = q0[k], q1[k]
                i0 = sl(**{f"q{c}": 1, f"q{t}": 0})
                i1 = sl(**{f"q{c}": 1, f"q{t}": 1})
                tmp = view[i0].copy()
                view[i0] = view[i1]
                view[i1] = tmp
            elif code == _OP_CCNOT:
                c1, c2, t = q0[k], q1[k], q2[k]
                i0 = sl(**{f"q{c1}": 1, f"q{c2}": 1, f"q{t}": 0})
                i1 = sl(**{f"q{c1}": 1, f"q{c2}": 1, f"q{t}": 1})
                tmp = view[i0].copy()
                view[i0] = view[i1]
                view[i1] = tmp
            elif code == _OP_PHASE1:
                t = q0[k]
                view[sl(**{f"q{t}": 1})] *= val[k]
            elif code == _OP_CPHASE:
                c, t = q0[k], q1[k]
                view[sl(**{f"q{c}": 1, f"q{t}": 1})] *= val[k]
            elif code == _OP_MAT1Q:
                t = q0[k]
                i0 = sl(**{f"q{t}": 0})
                i1 = sl(**{f"q{t}": 1})
                s0 = view[i0].copy()
                s1 = view[i1].copy()
                view[i0] = mat[k, 0, 0] * s0 + mat[k, 0, 1] * s1
                view[i1] = mat[k, 1, 0] * s0 + mat[k, 1, 1] * s1
            else:
                state *= val[k]


# compiled-program cache keyed by circuit object identity (circuits are
# immutable); keeps the object referenced so ids stay valid
_PROGRAM_CACHE: dict[tuple[int, bool], tuple[Circuit, _Program]] = {}


def _program_for(routine: Circuit, inverted: bool) -> _Program:
    key = (id(routine), inverted)
    hit = _PROGRAM_CACHE.get(key)
    if hit is not None:
        return hit[1]
    source = invert(routine) if inverted else routine
    prog = _compile_gates(iter_gates(source))
    _PROGRAM_CACHE[key] = (routine, prog)
    return prog


def zero_state(num_qubits: int) -> np.ndarray:
    state = np.zeros(1 << num_qubits, dtype=np.complex128)
    state[0] = 1.0
    return state


def basis_state(num_qubits: int, index: int) -> np.ndarray:
    state = np.zeros(1 << num_qubits, dtype=np.complex128)
    state[index] = 1.0
    return state


def apply(circuit: Circuit, state: np.ndarray, cap: int = DEFAULT_QUBIT_CAP) -> np.ndarray:
    """Apply a circuit to a statevector, returning the evolved copy."""
    if circuit.arity > cap:
        raise CircuitError(
            f"circuit arity {circuit.arity} exceeds simulator cap {cap} qubits"
        )
    if state.shape[0] != 1 << circuit.arity:
        raise CircuitError(
            f"state dimension {state.shape[0]} does not match arity {circuit.arity}"
        )
    out = np.array(state, dtype=np.complex128, copy=True)
    pending: list[Gate] = []
    for instr in circuit.body:
        if isinstance(instr, Gate):
            pending.append(instr)
            continue
        if pending:
            prog = _compile_gates(pending)
            _run_program(prog.op, prog.q0, prog.q1, prog.q2, prog.val, prog.mat, out)
            pending = []
        routine = circuit.routines[instr.routine]
        base = _program_for(routine, instr.inverted)
        if list(instr.qubits) == list(range(routine.arity)):
            prog = base
        else:
            remap = np.asarray(instr.qubits, dtype=np.int64)
            prog = _Program(base.op, remap[base.q0], remap[base.q1], remap[base.q2],
                            base.val, base.mat)
        _run_program(prog.op, prog.q0, prog.q1, prog.q2, prog.val, prog.mat, out)
    if pending:
        prog = _compile_gates(pending)
        _run_program(prog.op, prog.q0, prog.q1, prog.q2, prog.val, prog.mat, out)
    return out


def unitary_of(circuit: Circuit) -> np.ndarray:
    """Full unitary, columns obtained by applying the circuit to basis states."""
    if circuit.arity > UNITARY_QUBIT_CAP:
        raise CircuitError(
            f"unitary_of supports up to {UNITARY_QUBIT_CAP} qubits, got {circuit.arity}"
        )
    dim = 1 << circuit.arity
    u = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(dim):
        u[:, k] = apply(circuit, basis_state(circuit.arity, k))
    return u


def restricted_unitary(circuit: Circuit, active_qubits: int,
                       cap: int = DEFAULT_QUBIT_CAP) -> tuple[np.ndarray, float]:
    """Unitary block on the low ``active_qubits`` with all other qubits |0>.

    Returns the 2^k x 2^k block and the worst-case leakage (amplitude norm
    left outside the block) over all basis inputs.  Ancilla-clean circuits
    leak only rounding noise.
    """
    dim = 1 << active_qubits
    block = np.zeros((dim, dim), dtype=np.complex128)
    leak = 0.0
    for k in range(dim):
        out = apply(circuit, basis_state(circuit.arity, k), cap=cap)
        block[:, k] = out[:dim]
        leak = max(leak, float(np.linalg.norm(out[dim:])))
    return block, leak


def expm_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """e^{-iHt} via Hermitian eigendecomposition."""
    h = np.asarray(h, dtype=np.complex128)
    if np.linalg.norm(h - h.conj().T) > 1e-10 * max(1.0, np.linalg.norm(h)):
        raise ValueError("matrix is not Hermitian")
    w, v = np.linalg.eigh(h)
    if np.linalg.norm((v * w) @ v.conj().T - h) > 1e-10 * max(1.0, np.linalg.norm(h)):
        raise ValueError("eigendecomposition failed to reconstruct the matrix")
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def spectral_norm(a: np.ndarray) -> float:
    """Largest singular value."""
    return float(np.linalg.svd(np.asarray(a, dtype=np.complex128), compute_uv=False)[0])


def spectral_distance(a: np.ndarray, b: np.ndarray,
                      up_to_global_phase: bool = False) -> float:
    """Largest singular value of a - e^{i phi} b, minimized over phi if asked."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if not up_to_global_phase:
        return spectral_norm(a - b)

    def dist(phi: float) -> float:
        return spectral_norm(a - np.exp(1j * phi) * b)

    # Frobenius-optimal phase is exact whenever a and b differ by a pure
    # global phase; a bounded local refine covers the general case.
    overlap = np.trace(b.conj().T @ a)
    candidates = [float(np.angle(overlap))] if overlap != 0 else []
    candidates += [2 * math.pi * k / 16 for k in range(16)]
    best_phi = min(candidates, key=dist)
    res = minimize_scalar(dist, bounds=(best_phi - 0.5, best_phi + 0.5),
                          method="bounded", options={"xatol": 1e-12})
    return min(dist(best_phi), float(res.fun))


def save_amplitudes(state: np.ndarray, path: str) -> None:
    """Binary dump: little-endian (real, imag) float64 pairs in basis order."""
    with open(path, "wb") as fh:
        fh.write(np.asarray(state, dtype="<c16").tobytes())


def load_amplitudes(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        return np.frombuffer(fh.read(), dtype="<c16").astype(np.complex128)
