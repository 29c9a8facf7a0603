"""Hot inner loops: K=7 convolutional encoder, hard-decision Viterbi, and the
two-state burst-error Markov chain.

Every kernel exists twice: a numba ``@njit`` loop (``*_nb``) and a numpy path
(``*_np``). Both produce bit-identical output; the public names dispatch on
:data:`pilotscatter._accel.BACKEND`.

Encoder state convention: a 6-bit integer whose bit 5 holds the most recent
input bit and bit 0 the oldest. Feeding bit ``b`` from state ``s`` moves to
``(s >> 1) | (b << 5)``.
"""

import numpy as np

from ._accel import HAS_NUMBA, njit

CONSTRAINT_LENGTH = 7
N_STATES = 64
# 802.11 generators 133 and 171 (octal), tap k multiplies the input delayed by k.
G0_TAPS = np.array([1, 0, 1, 1, 0, 1, 1], dtype=np.uint8)
G1_TAPS = np.array([1, 1, 1, 1, 0, 0, 1], dtype=np.uint8)


def _build_trellis():
    out = np.zeros((N_STATES, 2, 2), dtype=np.uint8)
    for s in range(N_STATES):
        for b in range(2):
            reg = [b] + [(s >> (5 - k)) & 1 for k in range(6)]
            out[s, b, 0] = sum(r * g for r, g in zip(reg, G0_TAPS)) & 1
            out[s, b, 1] = sum(r * g for r, g in zip(reg, G1_TAPS)) & 1
    # predecessor table of each next state; column 0 is the lower-numbered one
    pred = np.zeros((N_STATES, 2), dtype=np.int64)
    for ns in range(N_STATES):
        pred[ns, 0] = (ns << 1) & 63
        pred[ns, 1] = ((ns << 1) & 63) | 1
    return out, pred


TRELLIS_OUT, TRELLIS_PRED = _build_trellis()
# branch outputs indexed by [next_state, which_predecessor, generator]
_NS = np.arange(N_STATES)
_BRANCH_OUT = np.stack(
    [TRELLIS_OUT[TRELLIS_PRED[:, j], _NS >> 5] for j in range(2)], axis=1
)


# --------------------------------------------------------------------------
# convolutional encoder


@njit(cache=True)
def _bcc_encode_nb(bits, state, out_table):
    n = bits.shape[0]
    out = np.empty(2 * n, dtype=np.uint8)
    s = state
    for t in range(n):
        b = bits[t]
        out[2 * t] = out_table[s, b, 0]
        out[2 * t + 1] = out_table[s, b, 1]
        s = (s >> 1) | (b << 5)
    return out


def _bcc_encode_np(bits, state, out_table=None):
    bits = np.asarray(bits, dtype=np.uint8)
    # prepend the register history (oldest first) so a plain convolution applies
    history = np.array([(state >> k) & 1 for k in range(6)], dtype=np.int64)
    ext = np.concatenate([history, bits.astype(np.int64)])
    a = np.convolve(ext, G0_TAPS.astype(np.int64))[6 : 6 + bits.size] & 1
    c = np.convolve(ext, G1_TAPS.astype(np.int64))[6 : 6 + bits.size] & 1
    out = np.empty(2 * bits.size, dtype=np.uint8)
    out[0::2] = a
    out[1::2] = c
    return out


def bcc_encode_bits(bits: np.ndarray, state: int = 0) -> np.ndarray:
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    if HAS_NUMBA:
        return _bcc_encode_nb(bits, np.int64(state), TRELLIS_OUT)
    return _bcc_encode_np(bits, state)


# --------------------------------------------------------------------------
# Viterbi


@njit(cache=True)
def _viterbi_nb(coded, terminated, branch_out):
    n = coded.shape[0] // 2
    big = np.int64(1) << 40
    metric = np.full(64, big, dtype=np.int64)
    metric[0] = 0
    nxt = np.empty(64, dtype=np.int64)
    choice = np.zeros((n, 64), dtype=np.uint8)
    for t in range(n):
        r0 = coded[2 * t]
        r1 = coded[2 * t + 1]
        for ns in range(64):
            p0 = (ns << 1) & 63
            p1 = p0 | 1
            m0 = metric[p0] + (branch_out[ns, 0, 0] != r0) + (branch_out[ns, 0, 1] != r1)
            m1 = metric[p1] + (branch_out[ns, 1, 0] != r0) + (branch_out[ns, 1, 1] != r1)
            if m1 < m0:
                nxt[ns] = m1
                choice[t, ns] = 1
            else:
                nxt[ns] = m0
        for s in range(64):
            metric[s] = nxt[s]
    s = 0
    if not terminated:
        best = metric[0]
        for k in range(1, 64):
            if metric[k] < best:
                best = metric[k]
                s = k
    out = np.empty(n, dtype=np.uint8)
    for t in range(n - 1, -1, -1):
        out[t] = s >> 5
        s = ((s << 1) & 63) | choice[t, s]
    return out


def _viterbi_np(coded, terminated, branch_out=_BRANCH_OUT):
    coded = np.asarray(coded, dtype=np.uint8)
    n = coded.size // 2
    metric = np.full(N_STATES, 1 << 40, dtype=np.int64)
    metric[0] = 0
    choice = np.zeros((n, N_STATES), dtype=np.uint8)
    p0 = TRELLIS_PRED[:, 0]
    p1 = TRELLIS_PRED[:, 1]
    pairs = coded[: 2 * n].reshape(n, 2)
    for t in range(n):
        bm = (branch_out != pairs[t]).sum(axis=2)
        m0 = metric[p0] + bm[:, 0]
        m1 = metric[p1] + bm[:, 1]
        pick = m1 < m0
        choice[t] = pick
        metric = np.where(pick, m1, m0)
    s = 0 if terminated else int(np.argmin(metric))
    out = np.empty(n, dtype=np.uint8)
    for t in range(n - 1, -1, -1):
        out[t] = s >> 5
        s = ((s << 1) & 63) | int(choice[t, s])
    return out


def viterbi_bits(coded: np.ndarray, terminated: bool = False) -> np.ndarray:
    coded = np.ascontiguousarray(coded, dtype=np.uint8)
    if HAS_NUMBA:
        return _viterbi_nb(coded, terminated, _BRANCH_OUT)
    return _viterbi_np(coded, terminated)


# --------------------------------------------------------------------------
# Gilbert-Elliott state sequence


@njit(cache=True)
def _ge_states_nb(u, p_good_to_bad, p_bad_to_good, start_bad):
    n = u.shape[0]
    out = np.empty(n, dtype=np.uint8)
    bad = start_bad
    for t in range(n):
        out[t] = bad
        if bad:
            if u[t] < p_bad_to_good:
                bad = 0
        elif u[t] < p_good_to_bad:
            bad = 1
    return out


def _ge_states_np(u, p_good_to_bad, p_bad_to_good, start_bad):
    # the recursion is inherently sequential; precompute both flip masks and walk them
    leave_good = (np.asarray(u) < p_good_to_bad).tolist()
    leave_bad = (np.asarray(u) < p_bad_to_good).tolist()
    out = np.empty(len(leave_good), dtype=np.uint8)
    bad = int(start_bad)
    for t in range(len(leave_good)):
        out[t] = bad
        if bad:
            if leave_bad[t]:
                bad = 0
        elif leave_good[t]:
            bad = 1
    return out


def ge_states(u: np.ndarray, p_good_to_bad: float, p_bad_to_good: float, start_bad: int) -> np.ndarray:
    """State occupied at each step (1 = bad); transition t uses draw ``u[t]``."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    if HAS_NUMBA:
        return _ge_states_nb(u, float(p_good_to_bad), float(p_bad_to_good), np.uint8(start_bad))
    return _ge_states_np(u, p_good_to_bad, p_bad_to_good, start_bad)
