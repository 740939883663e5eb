"""Digital self-interference cancellation.

The received SI after RF cancellation is linear in the conjugate basis
functions x_j(n-m)^q x_j*(n-m)^(p-q) of the known transmit signals. A
canceller is a term set {(p, q)} plus per-(RX, TX, term) FIR coefficient
vectors of length M, estimated by least squares on an SoI-free block and
used to regenerate and subtract the SI.

Term-set catalog
----------------
linear        {(1,1)}                     classical linear canceller
widely_linear {(1,1),(1,0)}               adds the conjugate (I/Q image)
pa_only(P)    {(p,(p+1)/2): p odd <= P}   PA-induced diagonal terms only
joint_full(P) {(p,q): p odd <= P, 0<=q<=p}
joint_topk(k) linear term + the first k catalog rows in strength order
"""

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.signal import lfilter

from fdsim.errors import ConfigurationError, DomainError, IllConditionedError
from fdsim.signals import ComplexSignal

# Dominant nonlinear SI terms in approximate order of strength. Rows with
# two basis functions count as one entry for the top-k selection.
STRENGTH_ROWS: tuple = (
    ((1, 0),),            # I/Q image
    ((3, 2),),            # PA 3rd order
    ((3, 3), (3, 1)),     # I/Q image x PA 3rd order (strong)
    ((5, 3),),            # PA 5th order
    ((3, 0),),            # I/Q image x PA 3rd order (weak)
    ((7, 4),),            # PA 7th order
    ((5, 4), (5, 2)),     # I/Q image x PA 5th order (strong)
)


@dataclass(frozen=True)
class TermSet:
    name: str
    pairs: tuple  # ordered ((p, q), ...)

    def __post_init__(self):
        seen = set()
        for p, q in self.pairs:
            if p % 2 == 0 or not 0 <= q <= p:
                raise ConfigurationError(f"invalid term (p={p}, q={q})")
            if (p, q) in seen:
                raise ConfigurationError(f"duplicate term (p={p}, q={q})")
            seen.add((p, q))
        if (1, 1) not in seen:
            raise ConfigurationError("the linear term (1,1) must be present")

    def __len__(self):
        return len(self.pairs)


def full_term_order(order: int) -> tuple:
    """Canonical ordering of all terms up to `order`: p ascending, q descending."""
    return tuple((p, q) for p in range(1, order + 1, 2) for q in range(p, -1, -1))


def make_term_set(kind: str, order: int = 5, k: int = 3) -> TermSet:
    """Build a named term set; `order` is the odd polynomial order for the
    pa_only/joint_full families, `k` the row count for joint_topk."""
    if order % 2 == 0 or order < 1:
        raise DomainError("polynomial order must be odd and >= 1")
    kind = kind.lower()
    if kind == "linear":
        return TermSet("linear", ((1, 1),))
    if kind in ("widely_linear", "wl"):
        return TermSet("widely_linear", ((1, 1), (1, 0)))
    if kind == "pa_only":
        pairs = tuple((p, (p + 1) // 2) for p in range(1, order + 1, 2))
        return TermSet(f"pa_only{order}", pairs)
    if kind == "joint_full":
        return TermSet(f"joint_full{order}", full_term_order(order))
    if kind == "joint_topk":
        if not 1 <= k <= len(STRENGTH_ROWS):
            raise DomainError(f"k must be in [1, {len(STRENGTH_ROWS)}]")
        pairs = [(1, 1)]
        for row in STRENGTH_ROWS[:k]:
            pairs.extend(row)
        return TermSet(f"joint_topk{k}", tuple(pairs))
    raise DomainError(f"unknown term-set kind {kind!r}")


def restrict_term_set(ts: TermSet, keep, name: str | None = None) -> TermSet:
    """Subset of `ts` keeping relative order (keep: iterable of (p, q))."""
    keep = set(keep)
    pairs = tuple(pq for pq in ts.pairs if pq in keep)
    return TermSet(name or f"{ts.name}_restricted", pairs)


# ---------------------------------------------------------------------------
# Basis matrix and least squares
# ---------------------------------------------------------------------------

@dataclass
class BasisMatrix:
    matrix: np.ndarray           # (n_rows, n_cols) complex
    columns: list                # (j, p, q, m) per column
    scales: np.ndarray | None    # per-column scaling already applied, or None


def _term_sequences(x: np.ndarray, pairs) -> dict:
    """Basis sample sequences x^q conj(x)^(p-q), computed once per term."""
    out = {}
    conj = np.conj(x)
    for p, q in pairs:
        out[(p, q)] = x ** q * conj ** (p - q)
    return out


def build_basis_matrix(x: list[ComplexSignal], ts: TermSet, m_taps: int,
                       n_rows: int, offset: int,
                       normalize: bool = False) -> BasisMatrix:
    """Assemble the block-Toeplitz basis matrix.

    Row n (starting at `offset`) of the column (j, p, q, m) holds
    x_j(offset + n - m)^q conj(x_j(offset + n - m))^(p - q).
    """
    if m_taps < 1 or n_rows < 1:
        raise ConfigurationError("m_taps and n_rows must be >= 1")
    if offset < m_taps - 1:
        raise DomainError(f"offset must be >= m_taps - 1 = {m_taps - 1}")
    n_needed = offset + n_rows
    if any(len(s) < n_needed for s in x):
        raise DomainError(f"signals too short: need {n_needed} samples")

    blocks, columns = [], []
    for j, sig in enumerate(x):
        seqs = _term_sequences(sig.samples[:n_needed], ts.pairs)
        for (p, q) in ts.pairs:
            v = seqs[(p, q)]
            w = np.lib.stride_tricks.sliding_window_view(v, m_taps)
            block = w[offset - m_taps + 1: offset - m_taps + 1 + n_rows, ::-1]
            blocks.append(block)
            columns.extend((j, p, q, m) for m in range(m_taps))
    psi = np.ascontiguousarray(np.concatenate(blocks, axis=1))

    scales = None
    if normalize:
        scales = np.linalg.norm(psi, axis=0)
        scales[scales == 0.0] = 1.0
        psi = psi / scales
    return BasisMatrix(psi, columns, scales)


_COND_LIMIT = 1e12


def ls_estimate(psi: BasisMatrix, y, ridge: float = 0.0) -> np.ndarray:
    """Least-squares coefficients h minimizing ||y - Psi h||.

    Solved by Householder QR with per-column norm equilibration; the
    normal equations define the solution, not the algorithm. Raises
    IllConditionedError when the equilibrated condition estimate exceeds
    1e12 (unless a positive ridge is supplied for diagnostics).
    """
    a = psi.matrix
    yv = y.samples if isinstance(y, ComplexSignal) else np.asarray(y, dtype=np.complex128)
    squeeze = yv.ndim == 1
    yv = yv.reshape(yv.shape[0], -1)
    if yv.shape[0] != a.shape[0]:
        raise DomainError("y length must equal basis row count")
    if a.shape[0] < a.shape[1]:
        raise DomainError("underdetermined system: rows < columns")

    colnorm = np.linalg.norm(a, axis=0)
    colnorm[colnorm == 0.0] = 1.0
    an = a / colnorm
    if ridge > 0.0:
        an = np.vstack([an, np.sqrt(ridge) * np.eye(an.shape[1], dtype=an.dtype)])
        yv = np.vstack([yv, np.zeros((an.shape[1], yv.shape[1]), dtype=yv.dtype)])

    q, r = sla.qr(an, mode="economic")
    rcond, _ = sla.lapack.ztrcon(r, norm="1")
    cond = np.inf if rcond == 0.0 else 1.0 / rcond
    if ridge <= 0.0 and cond > _COND_LIMIT:
        raise IllConditionedError(cond)
    h = sla.solve_triangular(r, q.conj().T @ yv)
    h = h / colnorm[:, None]
    if psi.scales is not None:
        h = h / psi.scales[:, None]
    return h[:, 0] if squeeze else h


# ---------------------------------------------------------------------------
# Canceller model
# ---------------------------------------------------------------------------

@dataclass
class CancellerModel:
    term_set: TermSet
    m_taps: int
    n_tx: int
    n_rx: int
    coeffs: np.ndarray  # (n_rx, n_tx, n_terms, m_taps)

    def __post_init__(self):
        want = (self.n_rx, self.n_tx, len(self.term_set), self.m_taps)
        if self.coeffs.shape != want:
            raise ConfigurationError(f"coefficient shape {self.coeffs.shape} != {want}")


def coeffs_from_vector(h: np.ndarray, ts: TermSet, m_taps: int,
                       n_tx: int) -> np.ndarray:
    """Reshape stacked LS solutions (cols, n_rx) into (n_rx, n_tx, term, lag)."""
    h = np.atleast_2d(h.T) if h.ndim == 1 else h.T
    return h.reshape(h.shape[0], n_tx, len(ts), m_taps)


def fit_canceller(x: list[ComplexSignal], y: list[ComplexSignal], ts: TermSet,
                  m_taps: int, n_rows: int, offset: int,
                  ridge: float = 0.0) -> CancellerModel:
    """Estimate canceller coefficients from an observation block.

    `x` are the known TX baseband signals, `y` the received signals; rows
    [offset, offset + n_rows) are used.
    """
    psi = build_basis_matrix(x, ts, m_taps, n_rows, offset)
    ymat = np.stack([s.samples[offset: offset + n_rows] for s in y], axis=1)
    h = ls_estimate(psi, ymat, ridge=ridge)
    return CancellerModel(ts, m_taps, len(x), len(y),
                          coeffs_from_vector(h, ts, m_taps, len(x)))


def regenerate_si(model: CancellerModel, x: list[ComplexSignal]) -> list[ComplexSignal]:
    """Regenerate the SI estimate over the full signal span (zero prehistory)."""
    if len(x) != model.n_tx:
        raise DomainError(f"expected {model.n_tx} TX signals")
    out = []
    for i in range(model.n_rx):
        acc = np.zeros(len(x[0]), dtype=np.complex128)
        for j, sig in enumerate(x):
            seqs = _term_sequences(sig.samples, model.term_set.pairs)
            for t, pq in enumerate(model.term_set.pairs):
                acc += lfilter(model.coeffs[i, j, t], [1.0], seqs[pq])
        out.append(x[0].with_samples(acc))
    return out


def cancel(y: list[ComplexSignal], r_hat: list[ComplexSignal]) -> list[ComplexSignal]:
    """Subtract the regenerated SI from the received signals."""
    if len(y) != len(r_hat):
        raise DomainError("receiver count mismatch")
    out = []
    for yi, ri in zip(y, r_hat):
        if len(yi) != len(ri):
            raise DomainError("signal length mismatch")
        out.append(yi.with_samples(yi.samples - ri.samples))
    return out


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def save_canceller_model(model: CancellerModel, path) -> None:
    doc = {
        "term_set": {"name": model.term_set.name,
                     "pairs": [list(pq) for pq in model.term_set.pairs]},
        "m_taps": model.m_taps,
        "n_tx": model.n_tx,
        "n_rx": model.n_rx,
        "coeffs_re": model.coeffs.real.tolist(),
        "coeffs_im": model.coeffs.imag.tolist(),
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=1)


def load_canceller_model(path) -> CancellerModel:
    with open(path) as f:
        doc = json.load(f)
    ts = TermSet(doc["term_set"]["name"],
                 tuple(tuple(pq) for pq in doc["term_set"]["pairs"]))
    coeffs = np.asarray(doc["coeffs_re"]) + 1j * np.asarray(doc["coeffs_im"])
    return CancellerModel(ts, doc["m_taps"], doc["n_tx"], doc["n_rx"], coeffs)
