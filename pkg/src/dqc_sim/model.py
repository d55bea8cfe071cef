"""Frenkel exciton model: one- and two-exciton Hamiltonians, eigenbases, transition dipoles.

Sites carry three levels (ground, singly and doubly excited). Two-exciton states
are expanded in normalized symmetrized pair states |mn>, m <= n, so that an
overtone |mm> couples to a combination |mn> through sqrt(2) J_mn.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.typing import NDArray


class ValidationError(ValueError):
    """Invalid physical input. ``field`` names the offending parameter."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


class EigensolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class PairIndex:
    m: int
    n: int
    flat: int

    @property
    def is_overtone(self) -> bool:
        return self.m == self.n


def pair_basis(n_sites: int) -> list[PairIndex]:
    """Ordered two-exciton site basis: (0,0), (0,1), ..., (0,N-1), (1,1), ..."""
    pairs = []
    for m in range(n_sites):
        for n in range(m, n_sites):
            pairs.append(PairIndex(m, n, len(pairs)))
    return pairs


def n_two_exciton(n_sites: int) -> int:
    return n_sites * (n_sites + 1) // 2


def _as_float_array(value, name: str, ndim: int) -> NDArray[np.float64]:
    arr = np.array(value, dtype=float)
    if arr.ndim != ndim:
        raise ValidationError(name, f"expected a {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(name, "contains non-finite values")
    arr.setflags(write=False)
    return arr


def _check_symmetric_zero_diag(mat: NDArray, name: str, tol: float = 1e-12):
    n = mat.shape[0]
    for i in range(n):
        if mat[i, i] != 0.0:
            raise ValidationError(f"{name}[{i}][{i}]", f"diagonal must be zero, got {mat[i, i]}")
    for i in range(n):
        for j in range(i + 1, n):
            if abs(mat[i, j] - mat[j, i]) > tol * max(1.0, abs(mat[i, j])):
                raise ValidationError(
                    f"{name}[{i}][{j}]",
                    f"matrix not symmetric: [{i}][{j}]={mat[i, j]} vs [{j}][{i}]={mat[j, i]}",
                )


@dataclass(frozen=True)
class AggregateSpec:
    """Site-basis parameters of the aggregate. All energies in cm^-1."""

    site_energies: NDArray[np.float64]
    couplings: NDArray[np.float64]
    overtone_nonlinearity: NDArray[np.float64]
    combination_nonlinearity: NDArray[np.float64]
    site_dipoles: NDArray[np.float64]
    overtone_dipole_scale: float = 1.0

    def __post_init__(self):
        e = _as_float_array(self.site_energies, "site_energies", 1)
        n = e.shape[0]
        if n < 1:
            raise ValidationError("site_energies", "need at least one site")
        object.__setattr__(self, "site_energies", e)
        for name, ndim in (
            ("couplings", 2),
            ("overtone_nonlinearity", 1),
            ("combination_nonlinearity", 2),
            ("site_dipoles", 1),
        ):
            arr = _as_float_array(getattr(self, name), name, ndim)
            expected = (n,) * ndim
            if arr.shape != expected:
                raise ValidationError(name, f"shape {arr.shape} inconsistent with n_sites={n}")
            object.__setattr__(self, name, arr)
        _check_symmetric_zero_diag(self.couplings, "couplings")
        _check_symmetric_zero_diag(self.combination_nonlinearity, "combination_nonlinearity")
        kappa = float(self.overtone_dipole_scale)
        if not np.isfinite(kappa):
            raise ValidationError("overtone_dipole_scale", "must be finite")
        object.__setattr__(self, "overtone_dipole_scale", kappa)

    @property
    def n_sites(self) -> int:
        return self.site_energies.shape[0]

    @classmethod
    def from_arrays(cls, site_energies, couplings=None, overtone=None, combination=None,
                    dipoles=None, overtone_dipole_scale=1.0) -> "AggregateSpec":
        """Convenience constructor; omitted parameters default to zero (dipoles to one)."""
        e = np.asarray(site_energies, dtype=float)
        n = e.shape[0]
        zeros = np.zeros((n, n))
        return cls(
            site_energies=e,
            couplings=zeros if couplings is None else couplings,
            overtone_nonlinearity=np.zeros(n) if overtone is None else overtone,
            combination_nonlinearity=zeros if combination is None else combination,
            site_dipoles=np.ones(n) if dipoles is None else dipoles,
            overtone_dipole_scale=overtone_dipole_scale,
        )

    def with_changes(self, **kwargs) -> "AggregateSpec":
        params = dict(
            site_energies=self.site_energies,
            couplings=self.couplings,
            overtone_nonlinearity=self.overtone_nonlinearity,
            combination_nonlinearity=self.combination_nonlinearity,
            site_dipoles=self.site_dipoles,
            overtone_dipole_scale=self.overtone_dipole_scale,
        )
        params.update(kwargs)
        return AggregateSpec(**params)


def build_one_exciton_hamiltonian(spec: AggregateSpec) -> NDArray[np.float64]:
    return np.diag(spec.site_energies) + spec.couplings


def build_two_exciton_hamiltonian(spec: AggregateSpec) -> NDArray[np.float64]:
    """Two-exciton block over the ``pair_basis`` ordering.

    Diagonal: 2 E_m + U1_m for overtones, E_m + E_n + U2_mn for combinations.
    Pairs sharing one site index hop through J of the unshared indices, with a
    sqrt(2) factor whenever an overtone participates.
    """
    n = spec.n_sites
    pairs = pair_basis(n)
    h1 = build_one_exciton_hamiltonian(spec)
    nf = len(pairs)
    h2 = np.zeros((nf, nf))
    for p in pairs:
        if p.is_overtone:
            h2[p.flat, p.flat] = 2.0 * spec.site_energies[p.m] + spec.overtone_nonlinearity[p.m]
        else:
            h2[p.flat, p.flat] = (spec.site_energies[p.m] + spec.site_energies[p.n]
                                  + spec.combination_nonlinearity[p.m, p.n])
    for a in pairs:
        for b in pairs:
            if b.flat <= a.flat:
                continue
            h2[a.flat, b.flat] = h2[b.flat, a.flat] = _pair_hopping(a, b, h1)
    return h2


def _pair_hopping(a: PairIndex, b: PairIndex, h1: NDArray) -> float:
    # <a| sum_kl J_kl B_k^+ B_l |b> for normalized symmetrized pair states
    ia, ib = [a.m, a.n], [b.m, b.n]
    shared = set(ia) & set(ib)
    if not shared:
        return 0.0
    if a.is_overtone and b.is_overtone:
        return 0.0
    if a.is_overtone or b.is_overtone:
        ov, comb = (a, b) if a.is_overtone else (b, a)
        s = ov.m
        if s not in (comb.m, comb.n):
            return 0.0
        other = comb.n if comb.m == s else comb.m
        return np.sqrt(2.0) * h1[s, other]
    # two combination states sharing exactly one index
    s = shared.pop()
    ra = a.n if a.m == s else a.m
    rb = b.n if b.m == s else b.m
    return h1[ra, rb]


def site_dipole_matrix(spec: AggregateSpec) -> NDArray[np.float64]:
    """Site-basis <mn| V |k> for V = sum_m mu_m (B_m^+ + B_m), shape (N_f, N_s)."""
    n = spec.n_sites
    mu = spec.site_dipoles
    pairs = pair_basis(n)
    d = np.zeros((len(pairs), n))
    for p in pairs:
        if p.is_overtone:
            d[p.flat, p.m] = spec.overtone_dipole_scale * np.sqrt(2.0) * mu[p.m]
        else:
            d[p.flat, p.m] = mu[p.n]
            d[p.flat, p.n] = mu[p.m]
    return d


def _fix_signs(vecs: NDArray) -> NDArray:
    # rows are eigenvectors; make the largest-magnitude component positive
    idx = np.argmax(np.abs(vecs), axis=1)
    signs = np.sign(vecs[np.arange(vecs.shape[0]), idx])
    signs[signs == 0] = 1.0
    return vecs * signs[:, None]


def _eigh(h: NDArray, label: str):
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(h) if np.all(np.isfinite(h)) else np.inf
        raise EigensolverError(
            f"{label} eigensolver failed to converge (dim={h.shape[0]}, cond={cond:.3e})"
        ) from exc
    return w, _fix_signs(v.T)


def transition_dipoles_ge(spec: AggregateSpec, t1: NDArray) -> NDArray[np.float64]:
    if t1.shape != (spec.n_sites, spec.n_sites):
        raise ValidationError("T1", f"shape {t1.shape} inconsistent with n_sites={spec.n_sites}")
    return t1 @ spec.site_dipoles


def transition_dipoles_ef(spec: AggregateSpec, t1: NDArray, t2: NDArray) -> NDArray[np.float64]:
    n = spec.n_sites
    nf = n_two_exciton(n)
    if t1.shape != (n, n) or t2.shape != (nf, nf):
        raise ValidationError("T2", f"shapes {t1.shape}, {t2.shape} inconsistent with n_sites={n}")
    return t2 @ site_dipole_matrix(spec) @ t1.T


@dataclass(frozen=True)
class ExcitonBasis:
    """Eigenbasis of the one- and two-exciton manifolds.

    ``t1[j, m]`` and ``t2[k, p]`` hold eigenvector ``j``/``k`` on site ``m`` / pair ``p``.
    ``dip_ef[f, e]`` is the e -> f transition dipole.
    """

    one_exciton_energies: NDArray[np.float64]
    two_exciton_energies: NDArray[np.float64]
    t1: NDArray[np.float64]
    t2: NDArray[np.float64]
    dip_ge: NDArray[np.float64]
    dip_ef: NDArray[np.float64]
    pairs: list[PairIndex] = field(repr=False, default_factory=list)

    @property
    def n_e(self) -> int:
        return self.one_exciton_energies.shape[0]

    @property
    def n_f(self) -> int:
        return self.two_exciton_energies.shape[0]

    @cached_property
    def two_exciton_participation(self) -> NDArray[np.float64]:
        """P[f, m] = sum of |T2[f, p]|^2 over pairs p containing site m."""
        sq = self.t2 ** 2
        return sq @ (self.site_occupation > 0).T.astype(float)

    @cached_property
    def site_occupation(self) -> NDArray[np.float64]:
        """occ[m, p]: number of excitations on site m in pair state p (0, 1 or 2)."""
        occ = np.zeros((self.n_e, self.n_f))
        for p in self.pairs:
            occ[p.m, p.flat] += 1.0
            occ[p.n, p.flat] += 1.0
        return occ

    def one_exciton_overlap(self) -> NDArray[np.float64]:
        """O[e, e'] = sum_m |<e|n_m|e'>|^2 = sum_m T1[e,m]^2 T1[e',m]^2."""
        sq = self.t1 ** 2
        return sq @ sq.T

    def two_exciton_overlap(self, rule: str = "occupation") -> NDArray[np.float64]:
        """Site-fluctuation weights between two-exciton states.

        ``"occupation"``: sum_m |<f|n_m|f'>|^2 with n_m the site occupation operator,
        the same construction that gives T1^2 T1'^2 for one-exciton states.
        ``"marginal"``: sum_m P[f,m] P[f',m] with P the pair-marginalized participation.
        """
        if rule == "marginal":
            p = self.two_exciton_participation
            return p @ p.T
        if rule == "occupation":
            out = np.zeros((self.n_f, self.n_f))
            for occ in self.site_occupation:
                nm = (self.t2 * occ[None, :]) @ self.t2.T
                out += nm ** 2
            return out
        raise ValueError(f"unknown two-exciton rule {rule!r}")


def diagonalize_manifolds(spec: AggregateSpec) -> ExcitonBasis:
    e1, t1 = _eigh(build_one_exciton_hamiltonian(spec), "one-exciton")
    e2, t2 = _eigh(build_two_exciton_hamiltonian(spec), "two-exciton")
    basis = ExcitonBasis(
        one_exciton_energies=e1,
        two_exciton_energies=e2,
        t1=t1,
        t2=t2,
        dip_ge=transition_dipoles_ge(spec, t1),
        dip_ef=transition_dipoles_ef(spec, t1, t2),
        pairs=pair_basis(spec.n_sites),
    )
    for arr in (basis.one_exciton_energies, basis.two_exciton_energies, basis.t1, basis.t2,
                basis.dip_ge, basis.dip_ef):
        arr.setflags(write=False)
    return basis
