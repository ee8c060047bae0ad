"""Strong (letter-count) joint typicality, vectorized over candidate words."""

from __future__ import annotations

from typing import Sequence

import numpy as np

# guards the comparison |N/n - p| <= eps p against rounding in N/n
COUNT_SLACK = 1e-12


class TypicalityTest:
    """Membership in the eps-typical set of a fixed joint pmf.

    A tuple of sequences is typical when every cell satisfies
    ``|N(a)/n - p(a)| <= eps * p(a)``; zero-probability cells must not occur.
    """

    def __init__(self, pmf: np.ndarray, eps: float):
        self.pmf = np.asarray(pmf, dtype=float)
        self.shape = self.pmf.shape
        self.flat = self.pmf.ravel()
        self.eps = float(eps)

    def __call__(self, seqs: Sequence[np.ndarray]) -> np.ndarray:
        """``seqs`` are integer arrays broadcastable to ``(C, n)``; returns ``(C,)`` booleans."""
        arrs = np.broadcast_arrays(*[np.atleast_2d(np.asarray(s)) for s in seqs])
        idx = np.ravel_multi_index(tuple(arrs), self.shape)
        c, n = idx.shape
        cells = self.flat.size
        counts = np.bincount((idx + cells * np.arange(c)[:, None]).ravel(), minlength=c * cells)
        freq = counts.reshape(c, cells) / n
        ok = np.abs(freq - self.flat) <= self.eps * self.flat + COUNT_SLACK
        return ok.all(axis=1)

    def one(self, *seqs) -> bool:
        return bool(self([np.asarray(s)[None] for s in seqs])[0])
