"""Few-polariton Hamiltonians and dynamics.

Each stored polariton is a four-level site {s, p-, p0, p+}: the long-lived s
Rydberg level plus the three Zeeman components of the p level reachable by
sigma-/pi/sigma+ transitions.  A resonant microwave field couples s and p0 at
Rabi frequency Omega_mu, while resonant dipole-dipole exchange moves p
excitations between sites with pair strength V = c3 * 1e3 / R^3 (MHz for R in
micrometres, c3 signed in GHz um^3).

Conventions: Hamiltonian entries are ordinary frequencies E/h in MHz, times
are microseconds, and evolution is psi(t) = exp(-2*pi*i*H*t) psi0, so a
resonant drive pulse of area Theta = 2*pi*Omega_mu*t transfers s -> p0 at
Theta = pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

#: Per-site level labels in enumeration order (m = 0, -1, 0, +1).
LEVELS = ("s", "p-", "p0", "p+")
LEVEL_M = (0, -1, 0, +1)

_S, _PM, _P0, _PP = range(4)

#: Dense-solver dimension cap.
MAX_DIMENSION = 4096

_HERMITICITY_RTOL = 1e-12


def _ket_bra(a, b):
    op = np.zeros((4, 4))
    op[a, b] = 1.0
    return op


#: Spherical dipole components on one site: pi channel s<->p0, and the
#: sigma+/- channels with the (-1)^q spherical-tensor sign, mu_minus = -mu_plus^dag.
MU_Z = _ket_bra(_S, _P0) + _ket_bra(_P0, _S)
MU_PLUS = _ket_bra(_PP, _S) - _ket_bra(_S, _PM)
MU_MINUS = _ket_bra(_PM, _S) - _ket_bra(_S, _PP)

# Excitation-conserving (co-rotating) parts of the two-site channel products.
# In the frame rotating at the s-p transition frequency, the doubly-raising /
# doubly-lowering pieces of mu_q^i mu_{-q}^j (e.g. |ss> -> |p0 p0>) oscillate
# at twice that frequency (~37 GHz) and average away; what survives is
# excitation hopping between sites.  Each entry below is a 16x16 operator on
# an ordered site pair (i, j), to be scaled by the channel weight and V_ij.
_HOP_PLUS_MINUS = -(np.kron(_ket_bra(_PP, _S), _ket_bra(_S, _PP))
                    + np.kron(_ket_bra(_S, _PM), _ket_bra(_PM, _S)))
_HOP_MINUS_PLUS = -(np.kron(_ket_bra(_PM, _S), _ket_bra(_S, _PM))
                    + np.kron(_ket_bra(_S, _PP), _ket_bra(_PP, _S)))
_HOP_Z = (np.kron(_ket_bra(_S, _P0), _ket_bra(_P0, _S))
          + np.kron(_ket_bra(_P0, _S), _ket_bra(_S, _P0)))


@dataclass(frozen=True)
class SiteBasis:
    """Product basis of n_sites four-level sites, site-major enumeration.

    Index 0 is the all-s state; within a site the level order is LEVELS.
    """

    n_sites: int

    def __post_init__(self):
        if not (isinstance(self.n_sites, int) and self.n_sites >= 1):
            raise ValueError(f"n_sites must be a positive integer, got {self.n_sites!r}")

    @property
    def dim(self):
        return 4 ** self.n_sites

    @property
    def all_s_index(self):
        return 0

    def state_index(self, levels):
        """Index of the product state with the given per-site level labels."""
        if len(levels) != self.n_sites:
            raise ValueError(f"expected {self.n_sites} level labels, got {len(levels)}")
        index = 0
        for label in levels:
            if label not in LEVELS:
                raise ValueError(f"unknown level {label!r}; expected one of {LEVELS}")
            index = 4 * index + LEVELS.index(label)
        return index

    def state_labels(self, index):
        """Per-site level labels of basis state `index` (inverse of state_index)."""
        if not 0 <= index < self.dim:
            raise ValueError(f"index {index} out of range for dimension {self.dim}")
        labels = []
        for _ in range(self.n_sites):
            labels.append(LEVELS[index % 4])
            index //= 4
        return tuple(reversed(labels))

    def total_m(self):
        """Total magnetic quantum number of every basis state, as an array."""
        m = np.zeros(self.dim)
        codes = np.arange(self.dim)
        for site in range(self.n_sites):
            block = 4 ** (self.n_sites - 1 - site)
            m += np.asarray(LEVEL_M)[(codes // block) % 4]
        return m


def _check_hermitian(matrix, what):
    if not np.all(np.isfinite(matrix)):
        raise ValueError(f"{what} has non-finite entries")
    scale = float(np.max(np.abs(matrix))) if matrix.size else 0.0
    if np.max(np.abs(matrix - matrix.conj().T)) > _HERMITICITY_RTOL * scale:
        raise ValueError(f"{what} is not Hermitian")


@dataclass(frozen=True, eq=False)
class SiteHamiltonian:
    """One assembled Hamiltonian term (or sum of terms) on a SiteBasis.

    `matrix` holds E/h in MHz and is validated Hermitian on construction.
    Terms on the same basis can be added with `+`.
    """

    basis: SiteBasis
    matrix: np.ndarray
    positions: np.ndarray | None = None
    omega_mu: float = 0.0
    c3: float = 0.0
    coupling_graph: str = "all_pairs"

    def __post_init__(self):
        matrix = np.asarray(self.matrix)
        if matrix.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match basis dimension {self.basis.dim}")
        _check_hermitian(matrix, "site Hamiltonian")
        object.__setattr__(self, "matrix", matrix)

    def __add__(self, other):
        if not isinstance(other, SiteHamiltonian):
            return NotImplemented
        if other.basis != self.basis:
            raise ValueError("cannot add Hamiltonian terms built on different bases")
        positions = self.positions if self.positions is not None else other.positions
        graph = self.coupling_graph if self.positions is not None else other.coupling_graph
        return SiteHamiltonian(
            basis=self.basis,
            matrix=self.matrix + other.matrix,
            positions=positions,
            omega_mu=self.omega_mu + other.omega_mu,
            c3=self.c3 + other.c3,
            coupling_graph=graph,
        )


def _embed(op, site, n_sites):
    """Single-site operator lifted to the n_sites product space."""
    out = np.array([[1.0]])
    for i in range(n_sites):
        out = np.kron(out, op if i == site else np.eye(4))
    return out


def _embed_pair(op, i, j, n_sites):
    """Two-site operator (16x16, ordered as site i tensor site j) lifted to n_sites.

    Scatters the nonzero entries directly by index arithmetic instead of a
    kron chain, which keeps the all-pairs assembly cheap at 5-6 sites.
    """
    dim = 4 ** n_sites
    out = np.zeros((dim, dim))
    idx = np.arange(dim)
    stride_i = 4 ** (n_sites - 1 - i)
    stride_j = 4 ** (n_sites - 1 - j)
    digit_i = (idx // stride_i) % 4
    digit_j = (idx // stride_j) % 4
    for row16, col16 in zip(*np.nonzero(op)):
        a, c = divmod(int(row16), 4)
        b, d = divmod(int(col16), 4)
        cols = idx[(digit_i == b) & (digit_j == d)]
        out[cols + (a - b) * stride_i + (c - d) * stride_j, cols] += op[row16, col16]
    return out


def build_drive_hamiltonian(basis, omega_mu):
    """Resonant pi-polarized microwave drive: (Omega_mu/2) sum_i (|s><p0| + h.c.)_i.

    Single-site eigenvalues are {+-Omega_mu/2, 0, 0}; diagonal energies vanish
    in the rotating frame at zero detuning.
    """
    if not (math.isfinite(omega_mu) and omega_mu >= 0.0):
        raise ValueError(f"omega_mu must be finite and >= 0, got {omega_mu!r}")
    matrix = np.zeros((basis.dim, basis.dim))
    for site in range(basis.n_sites):
        matrix += 0.5 * omega_mu * _embed(MU_Z, site, basis.n_sites)
    return SiteHamiltonian(basis=basis, matrix=matrix, omega_mu=float(omega_mu))


@dataclass(frozen=True)
class ChannelWeights:
    """Relative weights of the three exchange channels in the pair bracket

        V_ij * (w+ mu+_i mu-_j + w- mu-_i mu+_j + wz muz_i muz_j).

    Defaults are the isotropic convention (1, 1, -2).  plus_minus and
    minus_plus must match for the assembled matrix to be Hermitian; they are
    kept separate only to mirror the two ordered terms.
    """

    plus_minus: float = 1.0
    minus_plus: float = 1.0
    zz: float = -2.0

    def __post_init__(self):
        for name in ("plus_minus", "minus_plus", "zz"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"channel weight {name} must be finite")


def _coupled_pairs(n_sites, coupling_graph):
    if coupling_graph == "all_pairs":
        return [(i, j) for i in range(n_sites) for j in range(i + 1, n_sites)]
    if coupling_graph == "nearest_neighbor":
        # consecutive sites in listed order
        return [(i, i + 1) for i in range(n_sites - 1)]
    raise ValueError(
        f"coupling_graph must be 'all_pairs' or 'nearest_neighbor', got {coupling_graph!r}")


def build_dd_hamiltonian(basis, positions, c3, coupling_graph="all_pairs",
                         weights=ChannelWeights()):
    """Resonant dipole-dipole exchange between coupled sites.

    Every coupled pair (i, j) contributes V_ij times the weighted sum of the
    excitation-conserving channel products (sigma+/sigma-, sigma-/sigma+, and
    pi/pi), with V_ij = c3 * 1e3 / R_ij^3 in MHz (c3 signed, GHz um^3; R_ij
    um).  With the default weights the pi channel hops a p0 excitation
    between sites with amplitude -2 V_ij and the sigma channels hop p+ or p-
    with amplitude -V_ij, so a state with every site in s is stationary until
    the microwave drive creates p amplitude.
    """
    if not math.isfinite(c3):
        raise ValueError(f"c3 must be finite, got {c3!r}")
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    if positions.shape != (basis.n_sites, 3):
        raise ValueError(
            f"positions must have shape ({basis.n_sites}, 3), got {positions.shape}")
    if not np.all(np.isfinite(positions)):
        raise ValueError("positions must be finite")

    bracket = (weights.plus_minus * _HOP_PLUS_MINUS
               + weights.minus_plus * _HOP_MINUS_PLUS
               + weights.zz * _HOP_Z)
    matrix = np.zeros((basis.dim, basis.dim))
    for i, j in _coupled_pairs(basis.n_sites, coupling_graph):
        r_ij = float(np.linalg.norm(positions[i] - positions[j]))
        if r_ij <= 0.0:
            raise ValueError(f"sites {i} and {j} are coincident; pair distances must be > 0")
        v_ij = c3 * 1e3 / r_ij ** 3
        matrix += v_ij * _embed_pair(bracket, i, j, basis.n_sites)
    return SiteHamiltonian(basis=basis, matrix=matrix, positions=positions,
                           c3=float(c3), coupling_graph=coupling_graph)


def build_hamiltonian(basis, positions, omega_mu, c3, coupling_graph="all_pairs",
                      weights=ChannelWeights()):
    """Drive plus dipole-dipole exchange in one call."""
    return (build_drive_hamiltonian(basis, omega_mu)
            + build_dd_hamiltonian(basis, positions, c3, coupling_graph, weights))


def build_pi_sector_hamiltonian(positions, omega_mu, c3, coupling_graph="all_pairs",
                                weights=ChannelWeights()):
    """Drive plus exchange restricted to the {s, p0} product subspace.

    Starting from the all-s register, the pi-polarized drive only creates p0
    amplitude and the sigma channels only move existing p+/p- excitations, so
    the joint state never leaves the 2^n-dimensional {s, p0} subspace.  This
    returns the dense 2^n x 2^n matrix in the site-major basis with per-site
    digits s=0, p0=1; index 0 is the all-s state.  Spectra and overlaps agree
    exactly with the full 4^n builder on this subspace, at a fraction of the
    cost for Monte Carlo work.
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    n_sites = positions.shape[0]
    if positions.shape != (n_sites, 3) or n_sites < 1:
        raise ValueError(f"positions must have shape (n, 3), got {positions.shape}")
    if not np.all(np.isfinite(positions)):
        raise ValueError("positions must be finite")
    if not (math.isfinite(omega_mu) and omega_mu >= 0):
        raise ValueError(f"omega_mu must be a non-negative frequency, got {omega_mu!r}")
    if not math.isfinite(c3):
        raise ValueError(f"c3 must be finite, got {c3!r}")
    dim = 2 ** n_sites
    if dim > MAX_DIMENSION:
        raise ValueError(f"dimension {dim} exceeds the dense-solver cap {MAX_DIMENSION}")

    matrix = np.zeros((dim, dim))
    idx = np.arange(dim)
    for i in range(n_sites):
        flipped = idx ^ (1 << (n_sites - 1 - i))
        matrix[flipped, idx] += omega_mu / 2.0
    for i, j in _coupled_pairs(n_sites, coupling_graph):
        r_ij = float(np.linalg.norm(positions[i] - positions[j]))
        if r_ij <= 0.0:
            raise ValueError(f"sites {i} and {j} are coincident; pair distances must be > 0")
        bit_i = 1 << (n_sites - 1 - i)
        bit_j = 1 << (n_sites - 1 - j)
        # flip-flop |s p0> <-> |p0 s> from the pi channel; sigma channels act
        # only on p+/p- and vanish on this subspace
        sp = idx[(idx & bit_i == 0) & (idx & bit_j != 0)]
        matrix[sp ^ bit_i ^ bit_j, sp] += weights.zz * c3 * 1e3 / r_ij ** 3
        matrix[sp, sp ^ bit_i ^ bit_j] += weights.zz * c3 * 1e3 / r_ij ** 3
    return matrix


# --------------------------------------------------------------------------
# Jaynes-Cummings chain (sanity-scale quantized-field model)

@dataclass(frozen=True, eq=False)
class JcChain:
    """Chain of two-level emitters, each with its own truncated cavity mode.

    Per-site space is spin (g, e) tensor Fock (0..fock_cutoff), spin-major;
    sites are enumerated site-major.  All couplings in MHz.
    """

    sites: int
    fock_cutoff: int
    g: float
    f: float
    v_dd: float
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix)
        if matrix.shape != (self.dim, self.dim):
            raise ValueError(f"matrix shape {matrix.shape} does not match dimension {self.dim}")
        _check_hermitian(matrix, "JC chain Hamiltonian")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self):
        return (2 * (self.fock_cutoff + 1)) ** self.sites

    def state_index(self, spins, fock_numbers):
        """Index of the product state |spins> tensor |fock_numbers> (0=g, 1=e)."""
        if len(spins) != self.sites or len(fock_numbers) != self.sites:
            raise ValueError(f"need {self.sites} spin and Fock labels")
        n_fock = self.fock_cutoff + 1
        index = 0
        for spin, number in zip(spins, fock_numbers):
            if spin not in (0, 1):
                raise ValueError(f"spin labels are 0 (g) or 1 (e), got {spin!r}")
            if not 0 <= number <= self.fock_cutoff:
                raise ValueError(f"Fock number {number!r} outside cutoff {self.fock_cutoff}")
            index = index * 2 * n_fock + spin * n_fock + number
        return index

    def excitation_operator(self):
        """Total excitation number sum_i (sigma+_i sigma-_i + a_i^dag a_i)."""
        n_fock = self.fock_cutoff + 1
        number = np.kron(np.diag([0.0, 1.0]), np.eye(n_fock)) \
            + np.kron(np.eye(2), np.diag(np.arange(n_fock, dtype=float)))
        total = np.zeros((self.dim, self.dim))
        for site in range(self.sites):
            total += _embed_general(number, site, self.sites)
        return total


def _embed_general(op, site, n_sites):
    out = np.array([[1.0]])
    eye = np.eye(op.shape[0])
    for i in range(n_sites):
        out = np.kron(out, op if i == site else eye)
    return out


def build_jc_chain(sites, fock_cutoff, g, f, v_dd):
    """Jaynes-Cummings chain H = g sum_i (sigma+_i a_i + sigma-_i a_i^dag)
    + v_dd sum_<i,i+1> (sigma+_i sigma-_j + sigma-_i sigma+_j) + f sum_i (a_i + a_i^dag).

    The spin exchange carries its Hermitian conjugate so the assembled matrix
    is self-adjoint.  Sanity-scale only: sites <= 3, fock_cutoff <= 3.
    """
    if not (isinstance(sites, int) and 1 <= sites <= 3):
        raise ValueError(f"sites must be an integer in 1..3, got {sites!r}")
    if not (isinstance(fock_cutoff, int) and 0 <= fock_cutoff <= 3):
        raise ValueError(f"fock_cutoff must be an integer in 0..3, got {fock_cutoff!r}")
    for name, value in (("g", g), ("f", f), ("v_dd", v_dd)):
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")
    n_fock = fock_cutoff + 1
    dim = (2 * n_fock) ** sites
    if dim > 10_000:
        raise ValueError(f"dimension {dim} exceeds the sanity-scale cap 10000")

    a = np.diag(np.sqrt(np.arange(1.0, n_fock)), k=1)
    sigma_plus = np.array([[0.0, 0.0], [1.0, 0.0]])  # |e><g| with (g, e) ordering
    jc_site = g * (np.kron(sigma_plus, a) + np.kron(sigma_plus.T, a.T))
    drive_site = f * np.kron(np.eye(2), a + a.T)
    sp_full = np.kron(sigma_plus, np.eye(n_fock))

    matrix = np.zeros((dim, dim))
    for site in range(sites):
        matrix += _embed_general(jc_site + drive_site, site, sites)
    for i in range(sites - 1):
        hop = _embed_general(sp_full, i, sites) @ _embed_general(sp_full.T, i + 1, sites)
        matrix += v_dd * (hop + hop.T)
    return JcChain(sites=sites, fock_cutoff=fock_cutoff, g=float(g), f=float(f),
                   v_dd=float(v_dd), matrix=matrix)


# --------------------------------------------------------------------------
# Spectra and dynamics

def _as_matrix(h):
    matrix = np.asarray(getattr(h, "matrix", h))
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    if matrix.shape[0] > MAX_DIMENSION:
        raise ValueError(
            f"dimension {matrix.shape[0]} exceeds the dense-solver cap {MAX_DIMENSION}")
    return matrix


def eigenspectrum(h, return_vectors=False):
    """Ascending real eigenvalues of a Hermitian Hamiltonian (optionally vectors).

    Accepts a SiteHamiltonian, a JcChain, or a raw Hermitian matrix.  When
    vectors are requested, each pair satisfies ||H v - w v|| <= 1e-9 ||H||.
    """
    matrix = _as_matrix(h)
    _check_hermitian(matrix, "eigenspectrum input")
    w, v = np.linalg.eigh(matrix)
    if not return_vectors:
        return w
    h_norm = float(np.max(np.abs(w))) if w.size else 0.0
    residuals = np.linalg.norm(matrix @ v - v * w, axis=0)
    if np.any(residuals > 1e-9 * h_norm) and h_norm > 0.0:
        raise RuntimeError(
            f"eigenpair residual {residuals.max():.3e} exceeds 1e-9 * ||H|| = {1e-9 * h_norm:.3e}")
    return w, v


@dataclass(frozen=True, eq=False)
class EigenscanResult:
    """Two-site spectrum vs separation.

    `levels[k]` is the ascending spectrum at `radii[k]`; `branches[:, b]` is
    branch b followed through the scan by eigenvector-overlap continuity (the
    branch order equals the sorted order at the first radius).
    """

    radii: np.ndarray
    levels: np.ndarray
    branches: np.ndarray
    omega_mu: float
    c3: float


def pair_eigenscan(omega_mu, c3, r_min, r_max, steps, coupling_graph="all_pairs",
                   weights=ChannelWeights()):
    """Eigenvalue branches of the two-site Hamiltonian over R in [r_min, r_max] um."""
    if not (isinstance(steps, int) and steps >= 2):
        raise ValueError(f"steps must be an integer >= 2, got {steps!r}")
    if not 0.0 < r_min < r_max:
        raise ValueError(f"need 0 < r_min < r_max, got ({r_min!r}, {r_max!r})")
    basis = SiteBasis(2)
    radii = np.linspace(r_min, r_max, steps)
    drive = build_drive_hamiltonian(basis, omega_mu).matrix

    levels = np.empty((steps, basis.dim))
    branches = np.empty((steps, basis.dim))
    tracked_vectors = None
    tracked_values = None
    for k, r in enumerate(radii):
        positions = [[0.0, 0.0, 0.0], [0.0, 0.0, float(r)]]
        dd = build_dd_hamiltonian(basis, positions, c3, coupling_graph, weights).matrix
        w, v = eigenspectrum(drive + dd, return_vectors=True)
        levels[k] = w
        if tracked_vectors is None:
            columns = np.arange(basis.dim)
        else:
            # maximal successive eigenvector overlap; eigenvalue proximity as tie-break
            overlap = np.abs(tracked_vectors.conj().T @ v) ** 2
            cost = -overlap + 1e-9 * np.abs(tracked_values[:, None] - w[None, :])
            _, columns = linear_sum_assignment(cost)
        branches[k] = w[columns]
        tracked_vectors = v[:, columns]
        tracked_values = w[columns]
    return EigenscanResult(radii=radii, levels=levels, branches=branches,
                           omega_mu=float(omega_mu), c3=float(c3))


def count_branch_crossings(result, r_threshold=None):
    """Strict order swaps between tracked branches at radii >= r_threshold.

    A crossing is a sign change of (branch_a - branch_b) between consecutive
    scan points; stretches where the two branches are numerically degenerate
    are ignored.
    """
    mask = np.ones(result.radii.size, dtype=bool)
    if r_threshold is not None:
        mask = result.radii >= r_threshold
    b = result.branches[mask]
    if b.shape[0] < 2:
        return 0
    tol = 1e-9 * max(1.0, float(np.max(np.abs(b))))
    crossings = 0
    for i in range(b.shape[1]):
        for j in range(i + 1, b.shape[1]):
            diff = b[:, i] - b[:, j]
            signs = np.sign(diff[np.abs(diff) > tol])
            crossings += int(np.count_nonzero(np.diff(signs) != 0))
    return crossings


def time_evolve(h, psi0, t, eigensystem=None):
    """psi(t) = exp(-2*pi*i*H*t) psi0, H in MHz and t in us, by spectral decomposition.

    `t` may be a scalar (returns one state) or a 1-D array (returns one row
    per time).  Pass a precomputed (eigenvalues, eigenvectors) pair to
    amortize the diagonalization over repeated calls.
    """
    matrix = _as_matrix(h)
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (matrix.shape[0],):
        raise ValueError(f"psi0 shape {psi0.shape} does not match dimension {matrix.shape[0]}")
    norm = float(np.linalg.norm(psi0))
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"psi0 must be normalized, got ||psi0|| = {norm:.6g}")
    if eigensystem is None:
        w, v = eigenspectrum(matrix, return_vectors=True)
    else:
        w, v = eigensystem
    coefficients = v.conj().T @ psi0
    t_array = np.asarray(t, dtype=float)
    if t_array.ndim == 0:
        return v @ (np.exp(-2j * np.pi * w * float(t_array)) * coefficients)
    if t_array.ndim != 1:
        raise ValueError(f"t must be a scalar or 1-D array, got shape {t_array.shape}")
    phases = np.exp(-2j * np.pi * np.outer(w, t_array))
    return (v @ (phases * coefficients[:, None])).T


def retrieval_overlap(psi, basis):
    """Probability of projecting back onto the stored all-s product state."""
    psi = np.asarray(psi)
    if psi.shape[-1] != basis.dim:
        raise ValueError(f"state length {psi.shape[-1]} does not match basis dim {basis.dim}")
    overlap = np.abs(psi[..., basis.all_s_index]) ** 2
    return float(overlap) if overlap.ndim == 0 else overlap
