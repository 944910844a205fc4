"""Integer Smith normal form with unimodular factor tracking.

Python integers are exact, so the intermediate-entry growth of SNF cannot
overflow; pivoting picks the smallest nonzero absolute value to keep entries
small on the sparse incidence-like matrices we feed it.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class SmithForm:
    """Decomposition A = U @ D @ V with U, V unimodular, D diagonal.

    P and Q satisfy P @ A @ Q = D and are the inverses of U and V; the kernel
    lattice of A is spanned by the columns of Q beyond the rank.
    """

    diagonal: list[int]
    rank: int
    U: list[list[int]]
    V: list[list[int]]
    P: list[list[int]]
    Q: list[list[int]]


def _identity(k: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(k)] for i in range(k)]


def _matmul(a, b):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            v = ai[t]
            if v:
                bt = b[t]
                for j in range(m):
                    if bt[j]:
                        oi[j] += v * bt[j]
    return out


def smith_normal_form(matrix: list[list[int]], check: bool = True) -> SmithForm:
    """SNF of an integer matrix given as a list of rows."""
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    a = [row[:] for row in matrix]
    p, pi = _identity(m), _identity(m)   # P @ A @ Q = D, pi = P^-1
    q, qi = _identity(n), _identity(n)

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        p[i], p[j] = p[j], p[i]
        for r in range(m):
            pi[r][i], pi[r][j] = pi[r][j], pi[r][i]

    def col_swap(i, j):
        for r in range(m):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(n):
            q[r][i], q[r][j] = q[r][j], q[r][i]
        qi[i], qi[j] = qi[j], qi[i]

    def row_add(i, j, k):  # row i += k * row j
        a[i] = [x + k * y for x, y in zip(a[i], a[j])]
        p[i] = [x + k * y for x, y in zip(p[i], p[j])]
        for r in range(m):
            pi[r][j] -= k * pi[r][i]

    def col_add(i, j, k):  # col i += k * col j
        for r in range(m):
            a[r][i] += k * a[r][j]
        for r in range(n):
            q[r][i] += k * q[r][j]
        qi[j] = [x - k * y for x, y in zip(qi[j], qi[i])]

    def row_negate(i):
        a[i] = [-x for x in a[i]]
        p[i] = [-x for x in p[i]]
        for r in range(m):
            pi[r][i] = -pi[r][i]

    t = 0
    while True:
        # locate smallest nonzero entry in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = a[i][j]
                if v and (best is None or abs(v) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        if bi != t:
            row_swap(t, bi)
        if bj != t:
            col_swap(t, bj)
        # clear row/column t; restart if a reduction creates a smaller entry
        dirty = False
        for i in range(t + 1, m):
            if a[i][t]:
                k = a[i][t] // a[t][t]
                row_add(i, t, -k)
                if a[i][t]:
                    dirty = True
        for j in range(t + 1, n):
            if a[t][j]:
                k = a[t][j] // a[t][t]
                col_add(j, t, -k)
                if a[t][j]:
                    dirty = True
        if dirty:
            continue
        # enforce divisibility of the remaining block by the pivot
        piv = a[t][t]
        offender = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if a[i][j] % piv:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            row_add(t, offender, 1)
            continue
        if piv < 0:
            row_negate(t)
        t += 1
        if t == min(m, n):
            break

    diag = [a[i][i] for i in range(min(m, n))]
    rank = sum(1 for d in diag if d)
    form = SmithForm(diagonal=diag, rank=rank, U=pi, V=qi, P=p, Q=q)
    if check:
        recomposed = _matmul(_matmul(pi, a), qi)
        if recomposed != matrix:
            raise AssertionError("SNF recomposition U @ D @ V != A")
        for i in range(rank - 1):
            if diag[i + 1] % diag[i]:
                raise AssertionError("SNF divisibility chain broken")
    return form


def kernel_lattice(matrix: list[list[int]]) -> tuple[SmithForm, list[list[int]]]:
    """SNF plus a basis (as columns) of the integer kernel lattice."""
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    form = smith_normal_form(matrix)
    cols = []
    for j in range(n):
        if j >= len(form.diagonal) or form.diagonal[j] == 0:
            cols.append([form.Q[r][j] for r in range(n)])
    return form, cols


def solve_exact(basis_cols: list[list[int]], target_cols: list[list[int]]) -> list[list[int]]:
    """Solve K @ Y = B for integer Y, K given by columns with full column rank.

    Raises ValueError when no exact integer solution exists.
    """
    if not basis_cols:
        for col in target_cols:
            if any(col):
                raise ValueError("target not in the span of an empty basis")
        return []
    n = len(basis_cols[0])
    k = len(basis_cols)
    kmat = [[basis_cols[j][i] for j in range(k)] for i in range(n)]
    form = smith_normal_form(kmat)
    if form.rank != k:
        raise ValueError("basis columns are dependent")
    ys = []
    for col in target_cols:
        pb = [sum(form.P[i][r] * col[r] for r in range(n)) for i in range(n)]
        z = []
        for i in range(n):
            d = form.diagonal[i] if i < len(form.diagonal) else 0
            if d:
                if pb[i] % d:
                    raise ValueError("no integral solution")
                z.append(pb[i] // d)
            elif pb[i]:
                raise ValueError("target outside the column span")
        ys.append([sum(form.Q[i][j] * z[j] for j in range(k)) for i in range(k)])
    # ys holds columns of Y
    return [[ys[c][r] for c in range(len(target_cols))] for r in range(k)]
