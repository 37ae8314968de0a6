"""Transport modes from the Gram matrix of DIP-map perturbations."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from src.core.errors import RankDeficient
from src.core.polyline import Polyline, merged_breakpoints
from src.core.quadrature import inner_product
from src.transport.dip import DipMap

RANK_TOL = 1e-12


@dataclass(frozen=True)
class TransportBasis:
    """Modes v_1 = Id, v_2, ..., v_M sharing one breakpoint vector.

    ``eigenvalues`` is the full descending spectrum of the perturbation Gram matrix.
    """

    breakpoints: np.ndarray
    ordinates: np.ndarray
    left_slopes: np.ndarray
    right_slopes: np.ndarray
    eigenvalues: np.ndarray

    @property
    def n_modes(self) -> int:
        return int(self.ordinates.shape[0])

    @property
    def modes(self) -> list[Polyline]:
        return [
            Polyline(self.breakpoints, self.ordinates[m], self.left_slopes[m], self.right_slopes[m])
            for m in range(self.n_modes)
        ]

    def compose(self, alpha: np.ndarray) -> Polyline:
        """T̂ = Σ α_m v_m."""
        a = np.asarray(alpha, dtype=np.float64)
        return Polyline(
            self.breakpoints,
            a @ self.ordinates,
            float(a @ self.left_slopes),
            float(a @ self.right_slopes),
        )

    def truncate(self, n_modes: int) -> TransportBasis:
        return TransportBasis(
            self.breakpoints,
            self.ordinates[:n_modes],
            self.left_slopes[:n_modes],
            self.right_slopes[:n_modes],
            self.eigenvalues,
        )


def perturbation(t: Polyline) -> Polyline:
    """T − Id."""
    return Polyline(t.breakpoints, t.ordinates - t.breakpoints, t.left_slope - 1, t.right_slope - 1)


def perturbation_gram(maps: Sequence[Polyline], domain: tuple[float, float]) -> np.ndarray:
    """C̄[ℓ, ℓ'] = (T_ℓ − Id, T_ℓ' − Id) on the domain, exactly."""
    perts = [perturbation(t) for t in maps]
    n = len(perts)
    gram = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            gram[i, j] = gram[j, i] = inner_product(perts[i], perts[j], domain)
    return gram


def transport_modes(
    dip_maps: Sequence[DipMap], n_modes: int, domain: tuple[float, float]
) -> TransportBasis:
    """v_1 = Id; v_m = Σ_ℓ w_ℓ (T_{ℓ+1} − Id) for the leading eigenvectors w.

    Modes beyond the first have unit L² norm on the domain.
    ``dip_maps[0]`` is the reference map (the identity) and is left out of the Gram matrix.
    """
    if n_modes < 1:
        raise ValueError(f"need at least one transport mode, got {n_modes}")
    others = [d.map for d in dip_maps[1:]]
    if n_modes - 1 > len(others):
        raise RankDeficient(f"{n_modes - 1} perturbation modes requested from {len(others)} maps")

    a, b = domain
    inner = [np.array([a, b])]
    if others:
        xb = merged_breakpoints(others)
        inner.append(xb[(xb > a) & (xb < b)])
    xs = np.unique(np.concatenate(inner))

    ordinates = [xs.copy()]
    left = [1.0]
    right = [1.0]
    eigvals = np.zeros(0)
    if others:
        gram = perturbation_gram(others, domain)
        w, vecs = eigh(gram)
        order = np.argsort(w)[::-1]
        eigvals = np.maximum(w[order], 0.0)
        vecs = vecs[:, order]
        trace = float(np.trace(gram))
        for m in range(n_modes - 1):
            lam = float(eigvals[m])
            if lam <= RANK_TOL * trace or lam == 0.0:
                raise RankDeficient(
                    f"mode {m + 2} has eigenvalue {lam:.3e} below {RANK_TOL:g} x trace {trace:.3e}"
                )
            coef = vecs[:, m]
            # fix the eigenvector sign: largest component positive
            if coef[np.argmax(np.abs(coef))] < 0:
                coef = -coef
            coef = coef / np.sqrt(lam)
            ords = np.zeros_like(xs)
            ls = 0.0
            rs = 0.0
            for c, t in zip(coef, others, strict=True):
                ords += c * (t(xs) - xs)
                ls += c * (t.left_slope - 1.0)
                rs += c * (t.right_slope - 1.0)
            ordinates.append(ords)
            left.append(ls)
            right.append(rs)

    return TransportBasis(
        breakpoints=xs,
        ordinates=np.vstack(ordinates),
        left_slopes=np.array(left),
        right_slopes=np.array(right),
        eigenvalues=eigvals,
    )
