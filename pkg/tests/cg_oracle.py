"""Independent Clebsch-Gordan / 3j oracle built by ladder construction.

Couples |j1 m1> x |j2 m2> by explicit matrix algebra: the stretched state is
a product state, lowering operators fill each j multiplet, and each new
highest-weight state is obtained by Gram-Schmidt inside its m subspace with
the Condon-Shortley sign fixed (coefficient of m1 = j1 positive). No Racah
formula, no factorials; arbitrates the production 3j implementation.
"""

import numpy as np


def _jm_ops(two_j):
    dim = two_j + 1
    m = np.array([(two_j - 2 * k) / 2.0 for k in range(dim)])
    lower = np.zeros((dim, dim))
    for k in range(dim - 1):
        j = two_j / 2.0
        lower[k + 1, k] = np.sqrt(j * (j + 1) - m[k] * (m[k] - 1))
    return m, lower


def clebsch_table(two_j1, two_j2):
    """Dict {(two_j, two_m, two_m1, two_m2): <j1 m1 j2 m2 | j m>}."""
    m1, low1 = _jm_ops(two_j1)
    m2, low2 = _jm_ops(two_j2)
    d1, d2 = two_j1 + 1, two_j2 + 1
    lower = np.kron(low1, np.eye(d2)) + np.kron(np.eye(d1), low2)
    m_tot = np.add.outer(m1, m2).ravel()

    table = {}
    known = []  # vectors in the product basis, per (j, m)
    for two_j in range(two_j1 + two_j2, abs(two_j1 - two_j2) - 2, -2):
        j = two_j / 2.0
        # highest-weight vector for this j
        mask = np.isclose(m_tot, j)
        basis = np.eye(d1 * d2)[:, mask]
        sub = basis.copy()
        for vec, (jj, mm) in known:
            if np.isclose(mm, j):
                sub = sub - np.outer(vec, vec @ sub)
        # any nonzero column of the projected subspace spans the new state
        norms = np.linalg.norm(sub, axis=0)
        top = sub[:, np.argmax(norms)]
        top = top / np.linalg.norm(top)
        # Condon-Shortley: coefficient with m1 = j1 (largest m1) positive
        idx_sorted = np.where(mask)[0]
        lead = idx_sorted[np.argmax([m1[i // d2] for i in idx_sorted])]
        if top[lead] < 0:
            top = -top
        vec = top
        mm = j
        while True:
            known.append((vec, (j, mm)))
            for flat, amp in enumerate(vec):
                if abs(amp) > 1e-13:
                    i1, i2 = divmod(flat, d2)
                    table[(two_j, int(round(2 * mm)),
                           int(round(2 * m1[i1])), int(round(2 * m2[i2])))] = amp
            nxt = lower @ vec
            nrm = np.linalg.norm(nxt)
            if nrm < 1e-12:
                break
            vec = nxt / nrm
            mm -= 1.0
    return table


def three_j_oracle(j1, j2, j3, m1, m2, m3):
    """3j symbol from the ladder CG table (phase (-1)^{j1-j2-m3}/sqrt(2j3+1))."""
    two = lambda x: int(round(2 * x))
    table = clebsch_table(two(j1), two(j2))
    cg = table.get((two(j3), two(-m3), two(m1), two(m2)), 0.0)
    phase = (-1) ** int(round(j1 - j2 - m3))
    return phase * cg / np.sqrt(2 * j3 + 1)
