"""Transformation channels between alphabets and their information measures.

A forward channel carries a source alphabet onto a target alphabet, either
deterministically (a total letter-to-letter map) or stochastically (one
conditional pmf row per source letter). A reconstruction channel is the same
object oriented the other way: from observed outputs back to the inputs an
observer believes produced them.

Deterministic conditionals are stored as an index array, stochastic ones as
a scipy CSR matrix. Derived channels (Bayes inversions, compositions) may be
sparse over alphabets far larger than the declared-channel limits; sparsity
is what keeps the exact double summations tractable at that size.

Measures:

    alphabet_compression(prior, c) = H(prior) - H(push_forward(prior, c))
    potential_distortion(prior, f, r) = D(reconstructed || prior)

both in bits; compression is signed and distortion may be +inf when the
reconstruction puts mass where the prior has none.
"""

from __future__ import annotations

import math
from typing import Mapping

import numpy as np
from scipy import sparse

from .alphabet import Alphabet, LetterId, Pmf, entropy, kl_divergence

# Declared channels keep exact summation desk-tractable within these bounds.
MAX_DETERMINISTIC_LETTERS = 2 ** 21
MAX_STOCHASTIC_LETTERS = 4096

# Derived reconstruction channels refuse to materialize beyond this many
# nonzero conditional entries.
MAX_DERIVED_NONZEROS = 2 ** 26

# A conditional row must sum to one within this.
ROW_MASS_TOLERANCE = 1e-9


def _same_letters(a: Alphabet, b: Alphabet) -> bool:
    if a is b:
        return True
    ia, ib = a.letter_ids, b.letter_ids
    if len(ia) != len(ib):
        return False
    if ia is ib or ia == ib:
        return True
    if type(ia) is not type(ib):
        return list(ia) == list(ib)
    return False


def _require_same_letters(a: Alphabet, b: Alphabet, context: str) -> None:
    if not _same_letters(a, b):
        raise ValueError(
            f"{context}: alphabet '{a.id}' and alphabet '{b.id}' do not share letters"
        )


class Channel:
    """Conditional distribution over target letters given a source letter."""

    __slots__ = ("id", "source", "target", "_image", "_matrix")

    def __init__(
        self,
        id: str,
        source: Alphabet,
        target: Alphabet,
        *,
        image: np.ndarray | None = None,
        matrix: sparse.csr_matrix | None = None,
    ):
        if (image is None) == (matrix is None):
            raise ValueError("channel needs exactly one of an image array or a matrix")
        self.id = id
        self.source = source
        self.target = target
        self._image = image
        self._matrix = matrix

    # ---- constructors -------------------------------------------------

    @classmethod
    def deterministic(
        cls,
        id: str,
        source: Alphabet,
        target: Alphabet,
        mapping: Mapping[LetterId, LetterId],
    ) -> Channel:
        """Total letter-to-letter map; every source letter needs an image."""
        n_in, n_out = source.n_letters, target.n_letters
        if max(n_in, n_out) > MAX_DETERMINISTIC_LETTERS:
            raise ValueError(
                f"channel '{id}': deterministic channels allow at most "
                f"{MAX_DETERMINISTIC_LETTERS} letters per alphabet"
            )
        for key in mapping:
            if not source.has_letter(key):
                raise ValueError(
                    f"channel '{id}': map key {key!r} is not a letter of '{source.id}'"
                )
        image = np.empty(n_in, dtype=np.intp)
        for i, lid in enumerate(source.letter_ids):
            try:
                out = mapping[lid]
            except KeyError:
                raise ValueError(
                    f"channel '{id}': no image for source letter {lid!r}"
                ) from None
            try:
                image[i] = target.index_of(out)
            except KeyError:
                raise ValueError(
                    f"channel '{id}': image {out!r} of {lid!r} is not a letter of "
                    f"'{target.id}'"
                ) from None
        return cls(id, source, target, image=image)

    @classmethod
    def quantizer(cls, id: str, source: Alphabet, target: Alphabet, pixels: int) -> Channel:
        """Quantize a numeric grid source onto ``pixels`` discrete levels.

        Grid value v maps to level floor((v - lo) * (pixels - 1) / (hi - lo)
        + 1/2), i.e. proportional scaling with exact halves rounding up. The
        target alphabet must have exactly ``pixels`` letters; levels address
        its letters by position.
        """
        values = source.values
        if values is None:
            raise ValueError(
                f"channel '{id}': quantizer needs a numeric grid source alphabet"
            )
        if pixels < 1:
            raise ValueError(f"channel '{id}': pixels must be >= 1, got {pixels}")
        if target.n_letters != pixels:
            raise ValueError(
                f"channel '{id}': target '{target.id}' has {target.n_letters} letters, "
                f"quantizer was declared with pixels={pixels}"
            )
        if max(source.n_letters, pixels) > MAX_DETERMINISTIC_LETTERS:
            raise ValueError(
                f"channel '{id}': deterministic channels allow at most "
                f"{MAX_DETERMINISTIC_LETTERS} letters per alphabet"
            )
        lo, hi = float(values[0]), float(values[-1])
        if pixels == 1 or hi == lo:
            image = np.zeros(source.n_letters, dtype=np.intp)
        else:
            scaled = (values - lo) * ((pixels - 1) / (hi - lo))
            image = np.floor(scaled + 0.5).astype(np.intp)
        return cls(id, source, target, image=image)

    @classmethod
    def stochastic(
        cls,
        id: str,
        source: Alphabet,
        target: Alphabet,
        rows: Mapping[LetterId, Mapping[LetterId, float]],
    ) -> Channel:
        """One conditional pmf row per source letter, stored sparse."""
        n_in, n_out = source.n_letters, target.n_letters
        if max(n_in, n_out) > MAX_STOCHASTIC_LETTERS:
            raise ValueError(
                f"channel '{id}': stochastic channels allow at most "
                f"{MAX_STOCHASTIC_LETTERS} letters per alphabet"
            )
        for key in rows:
            if not source.has_letter(key):
                raise ValueError(
                    f"channel '{id}': row key {key!r} is not a letter of '{source.id}'"
                )
        indptr = np.zeros(n_in + 1, dtype=np.intp)
        col_chunks: list[np.ndarray] = []
        val_chunks: list[np.ndarray] = []
        for i, lid in enumerate(source.letter_ids):
            try:
                row = rows[lid]
            except KeyError:
                raise ValueError(
                    f"channel '{id}': no conditional row for source letter {lid!r}"
                ) from None
            cols = np.empty(len(row), dtype=np.intp)
            vals = np.empty(len(row), dtype=np.float64)
            for j, (out, p) in enumerate(row.items()):
                try:
                    cols[j] = target.index_of(out)
                except KeyError:
                    raise ValueError(
                        f"channel '{id}': row {lid!r} refers to {out!r}, not a letter "
                        f"of '{target.id}'"
                    ) from None
                p = float(p)
                if p < 0.0:
                    raise ValueError(
                        f"channel '{id}': negative conditional probability {p!r} "
                        f"in row {lid!r}"
                    )
                vals[j] = p
            total = float(vals.sum())
            if abs(total - 1.0) > ROW_MASS_TOLERANCE:
                raise ValueError(
                    f"channel '{id}': row {lid!r} sums to {total!r} "
                    f"(expected 1 within {ROW_MASS_TOLERANCE})"
                )
            indptr[i + 1] = indptr[i] + len(row)
            col_chunks.append(cols)
            val_chunks.append(vals)
        indices = np.concatenate(col_chunks) if col_chunks else np.zeros(0, dtype=np.intp)
        data = np.concatenate(val_chunks) if val_chunks else np.zeros(0, dtype=np.float64)
        matrix = sparse.csr_matrix((data, indices, indptr), shape=(n_in, n_out))
        matrix.sort_indices()
        matrix.sum_duplicates()
        return cls(id, source, target, matrix=matrix)

    @classmethod
    def identity(cls, alphabet: Alphabet, id: str | None = None) -> Channel:
        if id is None:
            id = f"identity({alphabet.id})"
        image = np.arange(alphabet.n_letters, dtype=np.intp)
        return cls(id, alphabet, alphabet, image=image)

    # ---- inspection ----------------------------------------------------

    @property
    def is_deterministic(self) -> bool:
        return self._image is not None

    def image_of(self, letter_id: LetterId) -> LetterId:
        if self._image is None:
            raise ValueError(f"channel '{self.id}' is stochastic")
        i = self.source.index_of(letter_id)
        return self.target.letter_ids[int(self._image[i])]

    def row(self, letter_id: LetterId) -> dict[LetterId, float]:
        """Conditional distribution over target letters for one source letter."""
        i = self.source.index_of(letter_id)
        out_ids = self.target.letter_ids
        if self._image is not None:
            return {out_ids[int(self._image[i])]: 1.0}
        m = self._matrix
        lo, hi = m.indptr[i], m.indptr[i + 1]
        return {
            out_ids[int(j)]: float(v) for j, v in zip(m.indices[lo:hi], m.data[lo:hi])
        }

    def conditional(self, out_id: LetterId, in_id: LetterId) -> float:
        """P(out | in) for one pair of letters."""
        return self.row(in_id).get(out_id, 0.0)

    def as_reconstruction(self) -> ReconstructionChannel:
        return ReconstructionChannel(
            self.id, self.source, self.target, image=self._image, matrix=self._matrix
        )

    def __repr__(self) -> str:
        kind = "deterministic" if self.is_deterministic else "stochastic"
        return (
            f"{type(self).__name__}({self.id!r}, {self.source.id!r} -> "
            f"{self.target.id!r}, {kind})"
        )


class ReconstructionChannel(Channel):
    """A channel read in the reconstruction direction: observed letters back
    to the letters an observer infers. Structurally identical to Channel."""


# ---- operations ---------------------------------------------------------


def push_forward(prior: Pmf, c: Channel) -> Pmf:
    """Distribution induced on the target by sending ``prior`` through ``c``.

    Mass is conserved exactly up to float rounding.
    """
    prior.require_valid()
    pvec = prior.aligned_to(c.source.letter_ids)
    if c._image is not None:
        out = np.bincount(c._image, weights=pvec, minlength=c.target.n_letters)
    else:
        out = c._matrix.T.dot(pvec)
    return Pmf.from_vector(c.target.letter_ids, out)


def compose(c1: Channel, c2: Channel) -> Channel:
    """Channel equivalent to applying ``c1`` then ``c2``.

    Deterministic composed with deterministic stays deterministic; any
    stochastic participant makes the result stochastic.
    """
    _require_same_letters(c1.target, c2.source, "compose")
    cid = f"{c1.id}*{c2.id}"
    if c1._image is not None and c2._image is not None:
        return Channel(cid, c1.source, c2.target, image=c2._image[c1._image])
    if c1._image is not None:
        matrix = c2._matrix[c1._image, :]
    elif c2._image is not None:
        n = c2.source.n_letters
        onehot = sparse.csr_matrix(
            (
                np.ones(n, dtype=np.float64),
                c2._image,
                np.arange(n + 1, dtype=np.intp),
            ),
            shape=(n, c2.target.n_letters),
        )
        matrix = c1._matrix @ onehot
    else:
        matrix = c1._matrix @ c2._matrix
    matrix = matrix.tocsr()
    matrix.sort_indices()
    matrix.sum_duplicates()
    return Channel(cid, c1.source, c2.target, matrix=matrix)


def _assemble_rows(
    n_rows: int,
    n_cols: int,
    reach: np.ndarray,
    reach_indices: np.ndarray,
    reach_data: np.ndarray,
    reach_rows: np.ndarray,
    reach_counts: np.ndarray,
    fallback_idx: np.ndarray,
    fallback_val: np.ndarray,
) -> sparse.csr_matrix:
    """CSR whose reachable rows come from the given entry stream (sorted by
    row, contiguous per row) and whose unreachable rows repeat the fallback
    pmf support."""
    nnz_fb = len(fallback_idx)
    row_sizes = np.where(reach, reach_counts, nnz_fb)
    total = int(row_sizes.sum())
    if total > MAX_DERIVED_NONZEROS:
        raise ValueError(
            f"derived channel would need {total} conditional entries, "
            f"more than the {MAX_DERIVED_NONZEROS} supported"
        )
    indptr = np.zeros(n_rows + 1, dtype=np.intp)
    np.cumsum(row_sizes, out=indptr[1:])
    indices = np.empty(total, dtype=np.intp)
    data = np.empty(total, dtype=np.float64)
    if len(reach_rows):
        ex_prefix = np.zeros(n_rows, dtype=np.intp)
        kept_counts = np.where(reach, reach_counts, 0)
        np.cumsum(kept_counts[:-1], out=ex_prefix[1:])
        offsets = np.arange(len(reach_rows), dtype=np.intp) - ex_prefix[reach_rows]
        dest = indptr[reach_rows] + offsets
        indices[dest] = reach_indices
        data[dest] = reach_data
    un = np.flatnonzero(~reach)
    if len(un):
        dest_u = (indptr[un][:, None] + np.arange(nnz_fb, dtype=np.intp)[None, :]).ravel()
        indices[dest_u] = np.tile(fallback_idx, len(un))
        data[dest_u] = np.tile(fallback_val, len(un))
    matrix = sparse.csr_matrix((data, indices, indptr), shape=(n_rows, n_cols))
    matrix.sort_indices()
    return matrix


def bayes_inverse(c: Channel, prior: Pmf) -> ReconstructionChannel:
    """Posterior reconstruction channel of ``c`` under ``prior``.

    Row v carries P(d | v) = prior(d) c(v | d) / sum_d' prior(d') c(v | d').
    Target letters that receive no mass get the prior itself as their row,
    so the result is total over the target alphabet.
    """
    prior.require_valid()
    pvec = prior.aligned_to(c.source.letter_ids)
    n_in, n_out = c.source.n_letters, c.target.n_letters
    fallback_idx = np.flatnonzero(pvec > 0.0).astype(np.intp)
    fallback_val = pvec[fallback_idx]
    if c._image is not None:
        marginal = np.bincount(c._image, weights=pvec, minlength=n_out)
        reach = marginal > 0.0
        order = np.argsort(c._image, kind="stable").astype(np.intp)
        rows_sorted = c._image[order]
        keep = reach[rows_sorted]
        kept = order[keep]
        kept_rows = rows_sorted[keep]
        counts = np.bincount(c._image, minlength=n_out)
        kept_counts = np.where(reach, counts, 0)
        matrix = _assemble_rows(
            n_rows=n_out,
            n_cols=n_in,
            reach=reach,
            reach_indices=kept,
            reach_data=pvec[kept] / marginal[kept_rows],
            reach_rows=kept_rows,
            reach_counts=kept_counts,
            fallback_idx=fallback_idx,
            fallback_val=fallback_val,
        )
    else:
        joint = c._matrix.multiply(pvec[:, None]).tocsr()
        marginal = np.asarray(joint.sum(axis=0)).ravel()
        reach = marginal > 0.0
        flipped = joint.T.tocsr()
        flipped.sort_indices()
        counts = np.diff(flipped.indptr).astype(np.intp)
        row_of_entry = np.repeat(
            np.arange(n_out, dtype=np.intp), counts
        )
        keep = reach[row_of_entry]
        matrix = _assemble_rows(
            n_rows=n_out,
            n_cols=n_in,
            reach=reach,
            reach_indices=flipped.indices[keep].astype(np.intp),
            reach_data=flipped.data[keep] / marginal[row_of_entry[keep]],
            reach_rows=row_of_entry[keep],
            reach_counts=np.where(reach, counts, 0),
            fallback_idx=fallback_idx,
            fallback_val=fallback_val,
        )
    return ReconstructionChannel(f"bayes({c.id})", c.target, c.source, matrix=matrix)


def reconstructed_pmf(prior: Pmf, forward: Channel, recon: ReconstructionChannel) -> Pmf:
    """Distribution an observer lands on after the round trip through
    ``forward`` and back through ``recon``:

        q(d) = sum_v [ sum_d' prior(d') forward(v | d') ] recon(d | v)

    defined over the forward channel's source letters.
    """
    _require_same_letters(forward.target, recon.source, "reconstruction")
    _require_same_letters(forward.source, recon.target, "reconstruction")
    observed = push_forward(prior, forward)
    back = push_forward(observed, recon)
    return Pmf.from_vector(forward.source.letter_ids, back.vec)


def alphabet_compression(prior: Pmf, c: Channel) -> float:
    """Entropy removed by the channel: H(prior) - H(induced output), bits.

    Negative when the channel manufactures variation (for example a
    randomized renderer fanning one input out over many outputs).
    """
    return entropy(prior) - entropy(push_forward(prior, c))


def potential_distortion(
    prior: Pmf, forward: Channel, recon: ReconstructionChannel
) -> float:
    """Divergence of the reconstructed distribution from the prior, bits.

    +inf when reconstruction puts mass on letters the prior excludes.
    """
    return kl_divergence(reconstructed_pmf(prior, forward, recon), prior)
