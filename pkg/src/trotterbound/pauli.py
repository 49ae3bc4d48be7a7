"""Exact algebra of complex-weighted Pauli strings.

Operators are stored symbolically as canonical sums of Pauli strings and
only realized as dense or sparse matrices on demand.  Phases coming from
single-site products are tracked as exact powers of i, so products and
commutators are exact up to float rounding of the input coefficients.

Conventions: site 1 is the leftmost letter and the most significant bit
of the computational-basis index (Kronecker order site 1 x site 2 x ...).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapacityError

LETTERS = "IXYZ"

#: Coefficients below this magnitude are dropped when sums are canonicalized.
COEFF_EPS = 1e-14

#: Largest qubit count for dense realization / dense spectral norms.
DENSE_QUBIT_CAP = 12

#: Largest qubit count for the matrix-free (Lanczos) spectral-norm path.
ITERATIVE_QUBIT_CAP = 16

_PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_I_POWERS = (1.0 + 0.0j, 1j, -1.0 + 0.0j, -1j)

# single-site product table: (a, b) -> (power of i, product letter)
_SITE_PRODUCT = {}
for _a in "IXYZ":
    for _b in "IXYZ":
        if _a == "I":
            _SITE_PRODUCT[(_a, _b)] = (0, _b)
        elif _b == "I":
            _SITE_PRODUCT[(_a, _b)] = (0, _a)
        elif _a == _b:
            _SITE_PRODUCT[(_a, _b)] = (0, "I")
        else:
            _cyc = {("X", "Y"): "Z", ("Y", "Z"): "X", ("Z", "X"): "Y"}
            if (_a, _b) in _cyc:
                _SITE_PRODUCT[(_a, _b)] = (1, _cyc[(_a, _b)])  # +i
            else:
                _SITE_PRODUCT[(_a, _b)] = (3, _cyc[(_b, _a)])  # -i


@dataclass(frozen=True, order=True)
class PauliString:
    """A tensor product of single-site Pauli letters, e.g. ``"YZI"``."""

    letters: str

    def __post_init__(self):
        if not self.letters or any(c not in LETTERS for c in self.letters):
            raise ValueError(f"invalid Pauli letters {self.letters!r}")

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @staticmethod
    def identity(n_qubits: int) -> "PauliString":
        return PauliString("I" * n_qubits)

    @staticmethod
    def single(n_qubits: int, site: int, letter: str) -> "PauliString":
        """String with one non-identity ``letter`` at 1-based ``site``."""
        if not 1 <= site <= n_qubits:
            raise ValueError(f"site {site} outside 1..{n_qubits}")
        ls = ["I"] * n_qubits
        ls[site - 1] = letter
        return PauliString("".join(ls))

    @staticmethod
    def two_site(n_qubits: int, site_a: int, letter_a: str,
                 site_b: int, letter_b: str) -> "PauliString":
        if site_a == site_b:
            raise ValueError("sites must differ")
        ls = ["I"] * n_qubits
        ls[site_a - 1] = letter_a
        ls[site_b - 1] = letter_b
        return PauliString("".join(ls))

    def commutes_with(self, other: "PauliString") -> bool:
        """True iff the two strings commute (even number of clashing sites)."""
        _check_same_qubits(self, other)
        clashes = sum(1 for a, b in zip(self.letters, other.letters)
                      if a != "I" and b != "I" and a != b)
        return clashes % 2 == 0

    def __str__(self):
        return self.letters


def multiply_strings(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Product of two Pauli strings as ``(phase, string)`` with phase in {1,-1,i,-i}."""
    _check_same_qubits(a, b)
    power = 0
    out = []
    for ca, cb in zip(a.letters, b.letters):
        p, c = _SITE_PRODUCT[(ca, cb)]
        power += p
        out.append(c)
    return _I_POWERS[power % 4], PauliString("".join(out))


@dataclass(frozen=True)
class PauliTerm:
    """A Pauli string with a complex weight."""

    coefficient: complex
    string: PauliString

    def __post_init__(self):
        c = complex(self.coefficient)
        if not (np.isfinite(c.real) and np.isfinite(c.imag)):
            raise ValueError(f"non-finite coefficient {self.coefficient!r}")
        object.__setattr__(self, "coefficient", c)


@dataclass(frozen=True)
class PauliSum:
    """Canonical sum of weighted Pauli strings on a fixed qubit count.

    Terms are merged by string, coefficients below :data:`COEFF_EPS` are
    dropped, and iteration order is lexicographic in the letter arrays,
    so equal operators compare equal and print identically.
    """

    n_qubits: int
    _terms: tuple[tuple[str, complex], ...] = field(default=())

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")

    @staticmethod
    def zero(n_qubits: int) -> "PauliSum":
        return PauliSum(n_qubits)

    @staticmethod
    def from_terms(n_qubits: int, terms) -> "PauliSum":
        """Build a canonical sum from ``(coefficient, PauliString | str)`` pairs."""
        acc: dict[str, complex] = {}
        for coeff, string in terms:
            letters = string.letters if isinstance(string, PauliString) else str(string)
            if len(letters) != n_qubits:
                raise ValueError(
                    f"term {letters!r} has {len(letters)} qubits, expected {n_qubits}")
            PauliString(letters)  # validate letters
            acc[letters] = acc.get(letters, 0.0 + 0.0j) + complex(coeff)
        merged = tuple(sorted((k, v) for k, v in acc.items() if abs(v) >= COEFF_EPS))
        return PauliSum(n_qubits, merged)

    @property
    def terms(self) -> tuple[PauliTerm, ...]:
        return tuple(PauliTerm(c, PauliString(s)) for s, c in self._terms)

    @property
    def n_terms(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient_of(self, string: PauliString | str) -> complex:
        letters = string.letters if isinstance(string, PauliString) else str(string)
        for s, c in self._terms:
            if s == letters:
                return c
        return 0.0 + 0.0j

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for _, c in self._terms)

    def is_anti_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.real) <= tol for _, c in self._terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        _check_same_qubits(self, other)
        return PauliSum.from_terms(
            self.n_qubits, [(c, s) for s, c in self._terms + other._terms])

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __mul__(self, scalar) -> "PauliSum":
        return PauliSum.from_terms(
            self.n_qubits, [(c * complex(scalar), s) for s, c in self._terms])

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return self * (-1.0)

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        """Operator product of two sums."""
        _check_same_qubits(self, other)
        out = []
        for sa, ca in self._terms:
            for sb, cb in other._terms:
                phase, prod = multiply_strings(PauliString(sa), PauliString(sb))
                out.append((ca * cb * phase, prod))
        return PauliSum.from_terms(self.n_qubits, out)

    def __str__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"({c.real:g}{c.imag:+g}j)*{s}" for s, c in self._terms)


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """``a @ b - b @ a`` in canonical form.

    Pairs of commuting strings are skipped; anticommuting pairs contribute
    twice their one-sided product, which keeps the phases exact.
    """
    _check_same_qubits(a, b)
    out = []
    for sa, ca in a._terms:
        pa = PauliString(sa)
        for sb, cb in b._terms:
            pb = PauliString(sb)
            if pa.commutes_with(pb):
                continue
            phase, prod = multiply_strings(pa, pb)
            out.append((2.0 * ca * cb * phase, prod))
    return PauliSum.from_terms(a.n_qubits, out)


def to_dense(a: PauliSum) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix realization (capped at DENSE_QUBIT_CAP qubits)."""
    if a.n_qubits > DENSE_QUBIT_CAP:
        raise CapacityError(
            f"dense realization needs n_qubits <= {DENSE_QUBIT_CAP}, got {a.n_qubits}")
    dim = 2 ** a.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for letters, coeff in a._terms:
        m = np.array([[1.0 + 0.0j]])
        for c in letters:
            m = np.kron(m, _PAULI_MATS[c])
        out += coeff * m
    return out


@lru_cache(maxsize=32)
def _basis_indices(n_qubits: int) -> np.ndarray:
    return np.arange(2 ** n_qubits, dtype=np.int64)


def _parity(v: np.ndarray) -> np.ndarray:
    v = v ^ (v >> 16)
    v = v ^ (v >> 8)
    v = v ^ (v >> 4)
    v = v ^ (v >> 2)
    v = v ^ (v >> 1)
    return v & 1


def _string_masks(letters: str) -> tuple[int, int, complex]:
    """(flip_mask, sign_mask, prefactor) for basis-state action of a string."""
    n = len(letters)
    flip = 0
    zy = 0
    n_y = 0
    for i, c in enumerate(letters):
        bit = 1 << (n - 1 - i)
        if c in "XY":
            flip |= bit
        if c in "YZ":
            zy |= bit
        if c == "Y":
            n_y += 1
    return flip, zy, _I_POWERS[n_y % 4]


def apply_string(letters: str, vec: np.ndarray) -> np.ndarray:
    """Apply one Pauli string to an amplitude vector (no dense matrix)."""
    n = len(letters)
    flip, zy, factor = _string_masks(letters)
    idx = _basis_indices(n)
    src = idx ^ flip
    signs = 1.0 - 2.0 * _parity(src & zy)
    return factor * signs * vec[src]


def apply_sum(a: PauliSum, vec: np.ndarray) -> np.ndarray:
    """Apply a PauliSum to an amplitude vector string by string."""
    if vec.shape != (2 ** a.n_qubits,):
        raise ValueError(
            f"vector length {vec.shape} does not match {a.n_qubits} qubits")
    out = np.zeros_like(vec, dtype=complex)
    for letters, coeff in a._terms:
        out += coeff * apply_string(letters, vec)
    return out


def expectation(a: PauliSum, psi) -> complex:
    """``<psi|a|psi>`` via string-wise application (never materializes a matrix)."""
    vec = np.asarray(getattr(psi, "amplitudes", psi), dtype=complex)
    return complex(np.vdot(vec, apply_sum(a, vec)))


def to_sparse(a: PauliSum) -> sp.csr_matrix:
    """CSR realization; usable up to ITERATIVE_QUBIT_CAP qubits."""
    if a.n_qubits > ITERATIVE_QUBIT_CAP:
        raise CapacityError(
            f"sparse realization needs n_qubits <= {ITERATIVE_QUBIT_CAP}, got {a.n_qubits}")
    dim = 2 ** a.n_qubits
    if a.is_zero():
        return sp.csr_matrix((dim, dim), dtype=complex)
    idx = _basis_indices(a.n_qubits)
    rows, cols, vals = [], [], []
    for letters, coeff in a._terms:
        flip, zy, factor = _string_masks(letters)
        src = idx ^ flip
        signs = 1.0 - 2.0 * _parity(src & zy)
        rows.append(idx)
        cols.append(src)
        vals.append(coeff * factor * signs)
    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim))
    return mat.tocsr()


def spectral_norm(a: PauliSum) -> float:
    """Largest singular value of the matrix realization.

    Dense eigensolve up to DENSE_QUBIT_CAP qubits; Lanczos iteration on the
    string-wise apply up to ITERATIVE_QUBIT_CAP.  The method actually used
    is reported by :func:`spectral_norm_with_method`.
    """
    return spectral_norm_with_method(a)[0]


def spectral_norm_with_method(a: PauliSum) -> tuple[float, str]:
    if a.is_zero():
        return 0.0, "trivial"
    if a.n_terms == 1:
        # a single Pauli string is unitary: norm is the coefficient magnitude
        return abs(a._terms[0][1]), "single-term"
    if a.n_qubits <= DENSE_QUBIT_CAP:
        mat = to_dense(a)
        if a.is_hermitian():
            return float(np.max(np.abs(np.linalg.eigvalsh(mat)))), "dense-eigh"
        if a.is_anti_hermitian():
            return float(np.max(np.abs(np.linalg.eigvalsh(1j * mat)))), "dense-eigh"
        return float(np.linalg.norm(mat, 2)), "dense-svd"
    if a.n_qubits > ITERATIVE_QUBIT_CAP:
        raise CapacityError(
            f"spectral norm needs n_qubits <= {ITERATIVE_QUBIT_CAP}, got {a.n_qubits}")
    dim = 2 ** a.n_qubits
    rng = np.random.default_rng(2718)
    v0 = rng.standard_normal(dim)
    v0 /= np.linalg.norm(v0)
    if a.is_hermitian():
        op = spla.LinearOperator((dim, dim), matvec=lambda v: apply_sum(a, v), dtype=complex)
    elif a.is_anti_hermitian():
        op = spla.LinearOperator((dim, dim), matvec=lambda v: 1j * apply_sum(a, v), dtype=complex)
    else:
        adj = PauliSum.from_terms(a.n_qubits, [(np.conj(c), s) for s, c in a._terms])
        op = spla.LinearOperator(
            (dim, dim), matvec=lambda v: apply_sum(adj, apply_sum(a, v)), dtype=complex)
        val = spla.eigsh(op, k=1, which="LM", v0=v0, return_eigenvectors=False)
        return float(np.sqrt(abs(val[0]))), "lanczos-gram"
    val = spla.eigsh(op, k=1, which="LM", v0=v0, return_eigenvectors=False)
    return float(abs(val[0])), "lanczos"


def format_pauli_sum(a: PauliSum) -> str:
    """Textual dump, one ``<re> <im> <letters>`` line per term."""
    return "\n".join(f"{c.real!r} {c.imag!r} {s}" for s, c in a._terms)


def parse_pauli_sum(text: str, n_qubits: int | None = None) -> PauliSum:
    """Inverse of :func:`format_pauli_sum`.

    ``n_qubits`` is required when the text holds no terms; otherwise it is
    inferred from (and checked against) the letter arrays.
    """
    terms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected '<re> <im> <letters>', got {raw!r}")
        re_s, im_s, letters = parts
        terms.append((float(re_s) + 1j * float(im_s), letters))
    if not terms:
        if n_qubits is None:
            raise ValueError("empty operator dump needs an explicit n_qubits")
        return PauliSum.zero(n_qubits)
    inferred = len(terms[0][1])
    if n_qubits is not None and n_qubits != inferred:
        raise ValueError(f"dump is on {inferred} qubits, expected {n_qubits}")
    return PauliSum.from_terms(inferred, terms)


def _check_same_qubits(a, b):
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
