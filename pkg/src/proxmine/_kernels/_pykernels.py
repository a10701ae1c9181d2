"""Pure-numpy implementations of the hot kernels.

Fallback backend used when the compiled extension is unavailable; the
compiled module in ``_cykernels`` implements the same three functions with
identical semantics.

Filter modes for pair accumulation: 0 = at least one endpoint is a phrase,
1 = both endpoints are phrases.  A node id below ``n_phrase`` is a phrase
(global vocabulary ids place phrases first).
"""

from __future__ import annotations

import numpy as np

AT_LEAST_ONE_PHRASE = 0
PHRASE_PHRASE_ONLY = 1


def accumulate_pairs(positions, node_ids, offsets, kern_table, window, n_phrase, filter_mode):
    """Emit (u, v, w) for every in-window position pair in every document.

    ``positions`` are strictly increasing within each document span given by
    ``offsets``; ``kern_table[d]`` holds the kernel value at distance ``d``
    for ``d in [0, window]``.  Endpoints are ordered ``u <= v``; the caller
    aggregates duplicate pairs.
    """
    positions = np.asarray(positions, dtype=np.int64)
    node_ids = np.asarray(node_ids, dtype=np.int64)
    offsets = np.asarray(offsets, dtype=np.int64)
    n = positions.shape[0]
    if n == 0:
        return (
            np.empty(0, dtype=np.int64),
            np.empty(0, dtype=np.int64),
            np.empty(0, dtype=np.float64),
        )

    # Shift each document's positions so cross-document gaps exceed the
    # window; in-window pairs then never straddle a document boundary.
    shifted = positions.astype(np.int64, copy=True)
    doc_sizes = np.diff(offsets)
    base = np.int64(0)
    for k in range(doc_sizes.shape[0]):
        lo, hi = offsets[k], offsets[k + 1]
        if lo == hi:
            continue
        shift = base - shifted[lo] if k > 0 else np.int64(0)
        if k > 0:
            shifted[lo:hi] += shift
        base = shifted[hi - 1] + window + 1

    us, vs, ws = [], [], []
    max_gap = min(int(window), n - 1)
    for g in range(1, max_gap + 1):
        dp = shifted[g:] - shifted[:-g]
        mask = dp <= window
        if not mask.any():
            # Positions are strictly increasing, so larger index gaps only
            # grow the distance; nothing further can fall inside the window.
            break
        a = node_ids[:-g][mask]
        b = node_ids[g:][mask]
        if filter_mode == PHRASE_PHRASE_ONLY:
            keep = (a < n_phrase) & (b < n_phrase)
        else:
            keep = (a < n_phrase) | (b < n_phrase)
        a, b = a[keep], b[keep]
        us.append(np.minimum(a, b))
        vs.append(np.maximum(a, b))
        ws.append(kern_table[dp[mask][keep]])
    if not us:
        return (
            np.empty(0, dtype=np.int64),
            np.empty(0, dtype=np.int64),
            np.empty(0, dtype=np.float64),
        )
    return np.concatenate(us), np.concatenate(vs), np.concatenate(ws)


def estep_s(counts, pi, ai, theta, eta, phi, out_theta, out_eta, out_phi, resp=None):
    """Responsibilities for one descriptor-attribute edge group.

    Adds expected counts into ``out_theta``, ``out_eta`` (phrase endpoint)
    and ``out_phi`` (attribute endpoint).  For phrase-phrase groups the
    caller passes ``eta``/``out_eta`` as ``phi``/``out_phi`` so both
    endpoints accumulate into the descriptor distribution.  Returns
    (n_degenerate, allocated_total); edges whose responsibility denominator
    is zero are skipped.
    """
    K = theta.shape[0]
    r = theta[:, None] * eta[:, pi] * phi[:, ai]  # (K, E)
    denom = r.sum(axis=0)
    good = denom > 0.0
    n_deg = int(counts.shape[0] - np.count_nonzero(good))
    scale = np.divide(counts, denom, out=np.zeros_like(denom), where=good)
    r *= scale
    out_theta += r.sum(axis=1)
    v_eta = out_eta.shape[1]
    v_phi = out_phi.shape[1]
    for z in range(K):
        out_eta[z] += np.bincount(pi, weights=r[z], minlength=v_eta)
        out_phi[z] += np.bincount(ai, weights=r[z], minlength=v_phi)
    if resp is not None:
        resp[:] = r.T
    return n_deg, float(counts[good].sum())


def estep_l(counts, pi, qi, eta, conn, out_conn, out_eta, resp=None):
    """Responsibilities over ordered event pairs for connection edges.

    Adds expected counts into ``out_conn`` and, for both phrase endpoints,
    into ``out_eta``.  Returns (n_degenerate, allocated_total).
    """
    K = conn.shape[0]
    A = eta[:, pi].T  # (E, K): first endpoint under z1
    B = eta[:, qi].T  # (E, K): second endpoint under z2
    M = A @ conn  # (E, K): sum over z1 of A*conn -> indexed by z2
    denom = np.einsum("ek,ek->e", M, B)
    good = denom > 0.0
    n_deg = int(counts.shape[0] - np.count_nonzero(good))
    scale = np.divide(counts, denom, out=np.zeros_like(denom), where=good)
    As = A * scale[:, None]
    out_conn += conn * (As.T @ B)
    first = As * (B @ conn.T)  # (E, K): row sums over z2 of the pair posterior
    second = B * (As @ conn)  # (E, K): column sums over z1
    v = out_eta.shape[1]
    for z in range(K):
        out_eta[z] += np.bincount(pi, weights=first[:, z], minlength=v)
        out_eta[z] += np.bincount(qi, weights=second[:, z], minlength=v)
    if resp is not None:
        resp[:] = scale[:, None, None] * conn[None, :, :] * A[:, :, None] * B[:, None, :]
    return n_deg, float(counts[good].sum())
