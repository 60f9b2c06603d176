"""Dense statevector simulator for the variational circuit.

Basis index bit convention: qubit 0 is the MOST significant bit of the
amplitude index, so |q0 q1 ... q_{n-1}> maps to index q0*2^(n-1) + ... .

Gate conventions:
    Rz(a) = diag(e^{-ia/2}, e^{ia/2})
    Ry(b) = [[cos b/2, -sin b/2], [sin b/2, cos b/2]]
    Rot(theta, phi, lam) = Rz(lam) @ Ry(theta) @ Rz(phi)
so Rot(0, 0, 0) is the exact identity and Ry(pi)|0> = |1>.

Single-qubit gates act in O(2^n) over strided amplitude pairs; a dense
2^n x 2^n matrix route exists only in the test suite as an oracle.
The private _batch_* helpers evolve many independent statevectors at
once, each with its own angles; the training loop leans on them for
parameter-shift gradients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from omiq.errors import OmiqValidationError

NORM_ATOL = 1e-10


@dataclass(frozen=True)
class RotParams:
    theta: float
    phi: float
    lam: float

    def __post_init__(self):
        for a in (self.theta, self.phi, self.lam):
            if not math.isfinite(a):
                raise OmiqValidationError("rotation angles must be finite")


@dataclass(frozen=True)
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray  # complex, length 2**n_qubits
    padded_from: int | None = None  # original vector length when zero-padded

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n_qubits,):
            raise OmiqValidationError(
                f"amplitude length {amps.shape} is not 2**{self.n_qubits}"
            )
        norm = np.sum(np.abs(amps) ** 2)
        if abs(norm - 1.0) > NORM_ATOL:
            raise OmiqValidationError(f"state norm {norm} is not 1")
        object.__setattr__(self, "amplitudes", amps)

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2


def amplitude_encode(x):
    """Normalize x into amplitudes, zero-padding to the next power of two."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        raise OmiqValidationError("cannot encode an empty vector")
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise OmiqValidationError("cannot encode the zero vector")
    n_qubits = max(1, int(math.ceil(math.log2(x.size))))
    dim = 2**n_qubits
    amps = np.zeros(dim, dtype=complex)
    amps[: x.size] = x / norm
    return Statevector(
        n_qubits=n_qubits,
        amplitudes=amps,
        padded_from=x.size if x.size != dim else None,
    )


def _check_qubit(n_qubits, qubit):
    if not 0 <= qubit < n_qubits:
        raise OmiqValidationError(f"qubit {qubit} out of range for {n_qubits} qubits")


def _rot_entries(theta, phi, lam):
    """2x2 entries of Rz(lam) Ry(theta) Rz(phi); supports array angles."""
    c = np.cos(np.asarray(theta) / 2)
    s = np.sin(np.asarray(theta) / 2)
    m00 = np.exp(-0.5j * (lam + phi)) * c
    m01 = -np.exp(0.5j * (phi - lam)) * s
    m10 = np.exp(-0.5j * (phi - lam)) * s
    m11 = np.exp(0.5j * (lam + phi)) * c
    return m00, m01, m10, m11


def _apply_2x2(amps, n_qubits, qubit, m00, m01, m10, m11):
    """In-place 2x2 gate on one qubit of a (..., 2**n) amplitude array."""
    lead = amps.shape[:-1]
    view = amps.reshape(lead + (2**qubit, 2, 2 ** (n_qubits - qubit - 1)))
    a0 = view[..., 0, :].copy()
    a1 = view[..., 1, :]
    if np.ndim(m00):  # per-row angles: broadcast over the strided axes
        m00 = m00[..., None, None]
        m01 = m01[..., None, None]
        m10 = m10[..., None, None]
        m11 = m11[..., None, None]
    view[..., 0, :] = m00 * a0 + m01 * a1
    view[..., 1, :] = m10 * a0 + m11 * a1


def apply_rot(s, qubit, p):
    """Rot gate: Rz(p.phi) first, then Ry(p.theta), then Rz(p.lam)."""
    _check_qubit(s.n_qubits, qubit)
    amps = s.amplitudes.copy()
    _apply_2x2(amps, s.n_qubits, qubit, *_rot_entries(p.theta, p.phi, p.lam))
    return Statevector(n_qubits=s.n_qubits, amplitudes=amps, padded_from=s.padded_from)


def _cz_mask(n_qubits, q1, q2):
    idx = np.arange(2**n_qubits)
    b1 = (idx >> (n_qubits - q1 - 1)) & 1
    b2 = (idx >> (n_qubits - q2 - 1)) & 1
    return (b1 & b2).astype(bool)


def apply_cz(s, q1, q2):
    """Negate amplitudes of basis states where both qubits are 1."""
    _check_qubit(s.n_qubits, q1)
    _check_qubit(s.n_qubits, q2)
    if q1 == q2:
        raise OmiqValidationError("CZ needs two distinct qubits")
    amps = s.amplitudes.copy()
    amps[_cz_mask(s.n_qubits, q1, q2)] *= -1
    return Statevector(n_qubits=s.n_qubits, amplitudes=amps, padded_from=s.padded_from)


def apply_ansatz_layer(s, params):
    """One layer: Rot on every qubit, then a linear CZ chain 0-1, 1-2, ..."""
    if len(params) != s.n_qubits:
        raise OmiqValidationError("one RotParams triple required per qubit")
    for q, p in enumerate(params):
        s = apply_rot(s, q, p)
    for q in range(s.n_qubits - 1):
        s = apply_cz(s, q, q + 1)
    return s


def _z_signs(n_qubits, qubit):
    idx = np.arange(2**n_qubits)
    bits = (idx >> (n_qubits - qubit - 1)) & 1
    return 1.0 - 2.0 * bits


def expval_z(s, qubit):
    """<Z> on one qubit: +1 weight where the bit is 0, -1 where it is 1."""
    _check_qubit(s.n_qubits, qubit)
    return float(np.sum(_z_signs(s.n_qubits, qubit) * s.probabilities()))


def dump_amplitudes(s, path):
    """Debug TSV of (index, re, im)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("index\tre\tim\n")
        for i, a in enumerate(s.amplitudes):
            fh.write(f"{i}\t{repr(a.real)}\t{repr(a.imag)}\n")


# ---------------------------------------------------------------------------
# Batched kernel: many independent states, per-row angles
# ---------------------------------------------------------------------------


def _batch_encode(X):
    """Rows of X to a (B, 2**n) normalized amplitude array."""
    X = np.asarray(X, dtype=float)
    norms = np.linalg.norm(X, axis=1)
    if np.any(norms == 0):
        raise OmiqValidationError("cannot encode a zero row")
    n_qubits = max(1, int(math.ceil(math.log2(X.shape[1]))))
    amps = np.zeros((X.shape[0], 2**n_qubits), dtype=complex)
    amps[:, : X.shape[1]] = X / norms[:, None]
    return amps, n_qubits


def _batch_run_circuit(amps, n_qubits, angles):
    """Evolve (B, 2**n) states through the ansatz; angles is (B, depth, n, 3).

    Mutates and returns amps. Each row evolves under its own angles.
    """
    depth = angles.shape[1]
    cz_masks = [_cz_mask(n_qubits, q, q + 1) for q in range(n_qubits - 1)]
    for layer in range(depth):
        for q in range(n_qubits):
            theta = angles[:, layer, q, 0]
            phi = angles[:, layer, q, 1]
            lam = angles[:, layer, q, 2]
            _apply_2x2(amps, n_qubits, q, *_rot_entries(theta, phi, lam))
        for mask in cz_masks:
            amps[:, mask] *= -1
    return amps


def _batch_expval_z(amps, n_qubits):
    """(B, n_qubits) array of per-qubit <Z>."""
    probs = np.abs(amps) ** 2
    signs = np.stack([_z_signs(n_qubits, q) for q in range(n_qubits)])
    return probs @ signs.T
