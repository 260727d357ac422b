"""Two-qubit density matrices: validation, structure detection, families,
random generators and the on-disk state format.

Random states come from numpy's ``Generator(PCG64(seed))``.  PCG64 is the
128-bit linear congruential generator with multiplier
0x2360ED051FC65DA44385DF649FCCF645 and the XSL-RR 64-bit output function;
the integer seed is expanded through ``numpy.random.SeedSequence``.  Complex
normals use numpy's ziggurat ``standard_normal`` for the real and imaginary
parts (real parts drawn first, as one block).
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import linalg
from .errors import NonHermitian, NotPSD, OutOfRange, ParseError, TraceNotOne

DEFAULT_TOL = 1e-9
VALIDATION_TOL = 1e-10
FILE_HERMITIAN_TOL = 1e-9

# |01> <-> |10>
SWAP_PERM = np.array([0, 2, 1, 3])
SWAP = np.eye(4)[SWAP_PERM]

# zero patterns, 0-based (row, col) upper-triangle positions
X_ZEROS = ((0, 1), (0, 2), (1, 3), (2, 3))
BLOCK_ZEROS = ((0, 2), (0, 3), (1, 2), (1, 3))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated 4x4 two-qubit state.  Build it with :func:`validate`."""

    m: np.ndarray

    def __post_init__(self):
        self.m.setflags(write=False)

    def __array__(self, dtype=None, copy=None):
        return self.m if dtype is None else self.m.astype(dtype)

    @property
    def rho_a(self) -> np.ndarray:
        return linalg.partial_trace(self.m, "A")

    @property
    def rho_b(self) -> np.ndarray:
        return linalg.partial_trace(self.m, "B")


def as_array(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.m
    return np.asarray(rho, dtype=complex)


def validate(m, tol: float = VALIDATION_TOL) -> DensityMatrix:
    """Check Hermiticity, unit trace and positivity; wrap the matrix on success."""
    if isinstance(m, DensityMatrix):
        return m
    m = np.array(m, dtype=complex)
    if m.shape != (4, 4):
        raise linalg.DimensionMismatch(f"expected a 4x4 matrix, got shape {m.shape}")
    res = linalg.hermiticity_residual(m)
    if res > tol:
        raise NonHermitian(f"Hermiticity violated: max |rho - rho^dagger| = {res:.3e}", res)
    m = 0.5 * (m + m.conj().T)
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        raise TraceNotOne(f"trace is {tr!r}, off by {abs(tr - 1.0):.3e}", abs(tr - 1.0))
    lam_min = linalg.hermitian_eig(m).eigenvalues[0]
    if lam_min < -tol:
        raise NotPSD(f"negative eigenvalue {lam_min:.3e}", -lam_min)
    return DensityMatrix(m)


class Structure(str, enum.Enum):
    XTYPE = "XType"
    BLOCK = "BlockDiagonal"
    BLOCK_SWAPPED = "BlockDiagonalSwapped"
    GENERAL = "General"


@dataclass(frozen=True)
class StateClassification:
    structure: Structure
    degenerate_a: bool
    degenerate_b: bool
    tol: float
    gap_a: float = 0.0
    gap_b: float = 0.0


def _pattern_zero(m: np.ndarray, positions, tol: float) -> bool:
    return all(abs(m[i, j]) <= tol and abs(m[j, i]) <= tol for i, j in positions)


def is_x_type(rho, tol: float = DEFAULT_TOL) -> bool:
    return _pattern_zero(as_array(rho), X_ZEROS, tol)


def is_block_diagonal(rho, tol: float = DEFAULT_TOL) -> bool:
    return _pattern_zero(as_array(rho), BLOCK_ZEROS, tol)


def marginal_gap(rho_x) -> float:
    w = linalg.hermitian_eig(rho_x).eigenvalues
    return float(w[1] - w[0])


def classify(rho, tol: float = DEFAULT_TOL) -> StateClassification:
    """Structural pattern (X precedes block-diagonal) and marginal degeneracy."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = as_array(rho)
    if is_x_type(m, tol):
        structure = Structure.XTYPE
    elif is_block_diagonal(m, tol):
        structure = Structure.BLOCK
    elif is_block_diagonal(m[np.ix_(SWAP_PERM, SWAP_PERM)], tol):
        structure = Structure.BLOCK_SWAPPED
    else:
        structure = Structure.GENERAL
    gap_a = marginal_gap(linalg.partial_trace(m, "A"))
    gap_b = marginal_gap(linalg.partial_trace(m, "B"))
    return StateClassification(structure, gap_a <= tol, gap_b <= tol, tol, gap_a, gap_b)


def swap_subsystems(rho) -> DensityMatrix:
    """Exchange the two qubits; a pure permutation, so it is exact."""
    m = as_array(rho)
    return DensityMatrix(m[np.ix_(SWAP_PERM, SWAP_PERM)].copy())


def entrywise_abs(rho) -> DensityMatrix:
    """Replace every entry by its modulus.

    For X states this is the local-unitary image with real nonnegative
    coherences; other inputs may fail validation.
    """
    m = np.abs(as_array(rho)).astype(complex)
    lam_min = linalg.hermitian_eig(m).eigenvalues[0]
    if lam_min < -VALIDATION_TOL:
        raise NotPSD(f"entrywise modulus is not PSD (eigenvalue {lam_min:.3e})", -lam_min)
    return DensityMatrix(m)


def local_unitary(rho, u_a, u_b) -> DensityMatrix:
    u = linalg.kron(u_a, u_b)
    m = u @ as_array(rho) @ u.conj().T
    return DensityMatrix(0.5 * (m + m.conj().T))


# --- families ---------------------------------------------------------------

def werner(x: float) -> DensityMatrix:
    """(2 - x)/6 I + (2x - 1)/6 V, with V the swap operator."""
    if not -1.0 <= x <= 1.0:
        raise OutOfRange(f"Werner parameter must lie in [-1, 1], got {x}")
    m = (2.0 - x) / 6.0 * np.eye(4) + (2.0 * x - 1.0) / 6.0 * SWAP
    return DensityMatrix(m.astype(complex))


def mix_with_identity(g, x: float) -> DensityMatrix:
    """(1 - x)/4 I + x G."""
    if not 0.0 <= x <= 1.0:
        raise OutOfRange(f"mixing weight must lie in [0, 1], got {x}")
    g = validate(g).m
    return DensityMatrix((1.0 - x) / 4.0 * np.eye(4, dtype=complex) + x * g)


def bell_phi_plus() -> DensityMatrix:
    psi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    return DensityMatrix(np.outer(psi, psi.conj()))


def pure_state(psi) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()))


def product_state(rho_a, rho_b) -> DensityMatrix:
    return validate(linalg.kron(rho_a, rho_b))


# Example matrices printed at four decimals (random states of the examples).
G_MATRIX = np.array(
    [[0.2409, 0.1612, -0.0787, 0.1945],
     [0.1612, 0.3006, -0.1008, 0.1707],
     [-0.0787, -0.1008, 0.1899, -0.0732],
     [0.1945, 0.1707, -0.0732, 0.2686]]
) + 1j * np.array(
    [[0, -0.0551, -0.0779, 0.0362],
     [0.0551, 0, -0.1395, 0.0742],
     [0.0779, 0.1395, 0, 0.1295],
     [-0.0362, -0.0742, -0.1295, 0]]
)

R_MATRIX = np.array(
    [[0.2481, 0, 0, 0.0103],
     [0, 0.2083, 0.0285, 0],
     [0, 0.0285, 0.4657, 0],
     [0.0103, 0, 0, 0.0779]]
) + 1j * np.array(
    [[0, 0, 0, -0.0141],
     [0, 0, 0.0877, 0],
     [0, -0.0877, 0, 0],
     [0.0141, 0, 0, 0]]
)

M1_BLOCK = np.array([[0.3093, 0.2321 + 0.0039j], [0.2321 - 0.0039j, 0.1885]])
M2_BLOCK = np.array([[0.1972, 0.2075 + 0.1204j], [0.2075 - 0.1204j, 0.3050]])
M_MATRIX = np.zeros((4, 4), dtype=complex)
M_MATRIX[:2, :2] = M1_BLOCK
M_MATRIX[2:, 2:] = M2_BLOCK

EXAMPLE_MATRICES = {"example1": G_MATRIX, "example3": R_MATRIX, "example4": M_MATRIX}


def example_state(name: str, x: float) -> DensityMatrix:
    """rho(x) = (1 - x)/4 I + x G for the built-in example matrices."""
    try:
        g = EXAMPLE_MATRICES[name]
    except KeyError:
        raise ValueError(f"unknown example {name!r}; choose from {sorted(EXAMPLE_MATRICES)}") from None
    return mix_with_identity(g, x)


# --- random generators ------------------------------------------------------

GEN_KINDS = ("general", "x_type", "block_diagonal")


def _ginibre(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return g @ g.conj().T


def _normalized(m: np.ndarray) -> DensityMatrix:
    m = m / np.trace(m).real
    return DensityMatrix(0.5 * (m + m.conj().T))


def gen_random(kind: str, seed: int) -> DensityMatrix:
    """Seeded random state: 'general' (4x4 Ginibre), 'x_type' or 'block_diagonal'."""
    rng = np.random.Generator(np.random.PCG64(seed))
    if kind == "general":
        return _normalized(_ginibre(rng, 4))
    m = np.zeros((4, 4), dtype=complex)
    if kind == "x_type":
        outer, inner = _ginibre(rng, 2), _ginibre(rng, 2)
        m[np.ix_([0, 3], [0, 3])] = outer
        m[np.ix_([1, 2], [1, 2])] = inner
    elif kind == "block_diagonal":
        m[:2, :2] = _ginibre(rng, 2)
        m[2:, 2:] = _ginibre(rng, 2)
    else:
        raise ValueError(f"unknown kind {kind!r}; choose from {GEN_KINDS}")
    return _normalized(m)


def random_unitary(rng: np.random.Generator, n: int = 2) -> np.ndarray:
    """Haar unitary via QR of a complex Ginibre matrix."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def gen_classical(seed: int) -> DensityMatrix:
    """sum p_ij |a_i><a_i| x |b_j><b_j| in random local bases with distinct marginals."""
    rng = np.random.Generator(np.random.PCG64(seed))
    while True:
        p = rng.dirichlet(np.ones(4)).reshape(2, 2)
        if abs(p[0].sum() - p[1].sum()) > 0.05 and abs(p[:, 0].sum() - p[:, 1].sum()) > 0.05:
            break
    diag = DensityMatrix(np.diag(p.ravel()).astype(complex))
    return local_unitary(diag, random_unitary(rng), random_unitary(rng))


def _choi(kraus) -> np.ndarray:
    """(id x L)(|Phi+><Phi+|) for the channel with Kraus operators ``kraus``."""
    phi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    bell = np.outer(phi, phi.conj())
    return sum(np.kron(np.eye(2), k) @ bell @ np.kron(np.eye(2), k).conj().T for k in kraus)


def gen_degenerate(seed: int, sides: str = "AB") -> DensityMatrix:
    """Random state whose marginal on ``sides`` ('AB', 'A' or 'B') is I/2.

    'A': Choi state of a random qubit channel acting on B (four Kraus
    operators cut from two columns of a Haar 8x8 unitary), so rho_A = I/2 while rho_B is
    generic.  'B': the same with the qubits exchanged.  'AB': Choi state of
    a random mixture of three unitaries (a unital channel), so both
    marginals are I/2.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    if sides == "AB":
        weights = rng.dirichlet(np.ones(3))
        kraus = [np.sqrt(w) * random_unitary(rng) for w in weights]
        return _normalized(_choi(kraus))
    if sides not in ("A", "B"):
        raise ValueError(f"sides must be 'AB', 'A' or 'B', got {sides!r}")
    iso = random_unitary(rng, 8)[:, :2]
    kraus = [iso[2 * i:2 * i + 2, :] for i in range(4)]
    rho = _normalized(_choi(kraus))
    return rho if sides == "A" else swap_subsystems(rho)


# --- state files ------------------------------------------------------------

def _fmt(v: float) -> str:
    s = format(float(v), ".17g")
    if s in ("-0", "0"):
        return "0"
    return s


def dumps_state(rho) -> str:
    m = as_array(rho)

    def rows(a):
        return "[" + ", ".join("[" + ", ".join(_fmt(v) for v in row) + "]" for row in a) + "]"

    return '{"dims": [2, 2], "re": ' + rows(m.real) + ', "im": ' + rows(m.imag) + "}\n"


def save_state(rho, path) -> None:
    Path(path).write_text(dumps_state(rho), encoding="utf-8")


def _read_grid(obj: dict, field: str) -> np.ndarray:
    if field not in obj:
        raise ParseError(f"missing field {field!r}")
    grid = obj[field]
    if not isinstance(grid, list) or len(grid) != 4:
        raise ParseError(f"field {field!r} must be a list of 4 rows")
    out = np.empty((4, 4))
    for i, row in enumerate(grid):
        if not isinstance(row, list) or len(row) != 4:
            raise ParseError(f"field {field!r} row {i} must hold 4 numbers")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ParseError(f"field {field!r}[{i}][{j}] is not a number: {v!r}")
            out[i, j] = v
    return out


def loads_state(text: str) -> DensityMatrix:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ParseError("state file must contain a single JSON object")
    if obj.get("dims") != [2, 2]:
        raise ParseError(f"field 'dims' must be [2, 2], got {obj.get('dims')!r}")
    re, im = _read_grid(obj, "re"), _read_grid(obj, "im")
    sym = float(np.max(np.abs(re - re.T)))
    anti = float(np.max(np.abs(im + im.T)))
    if max(sym, anti) > FILE_HERMITIAN_TOL:
        raise NonHermitian(
            f"payload is not Hermitian (re asymmetry {sym:.3e}, im symmetry {anti:.3e})", max(sym, anti)
        )
    return validate(re + 1j * im)


def load_state(path) -> DensityMatrix:
    return loads_state(Path(path).read_text(encoding="utf-8"))
