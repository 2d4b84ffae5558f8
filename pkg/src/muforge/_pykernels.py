"""Pure-Python trace-matrix kernels.

A trace matrix is a tuple of rows; entry ``m[i][j]`` is a bitmask whose bit
``p`` is set when some trace segment from formula ``i`` to formula ``j``
has maximal regeneration weight ``p``.
"""

ODD = sum(1 << p for p in range(1, 64, 2))


def maxcomb(x, y):
    """Bitmask of ``max(a, b)`` over bits ``a`` of ``x`` and ``b`` of ``y``."""
    if not x or not y:
        return 0
    lx = x & -x
    ly = y & -y
    return (x & ~(ly - 1)) | (y & ~(lx - 1))


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def compose(a, b, ncols=None):
    if ncols is None:
        ncols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * ncols
        for k, x in enumerate(row):
            if not x:
                continue
            lx = x & -x
            brow = b[k]
            for j in range(ncols):
                y = brow[j]
                if y:
                    ly = y & -y
                    acc[j] |= (x & ~(ly - 1)) | (y & ~(lx - 1))
        out.append(tuple(acc))
    return tuple(out)


def union(a, b):
    return tuple(tuple(x | y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def step(support, m):
    """Columns reachable in one step from the rows in ``support``."""
    out = 0
    i = 0
    while support:
        if support & 1:
            for j, x in enumerate(m[i]):
                if x:
                    out |= 1 << j
        support >>= 1
        i += 1
    return out


def has_mu_trace(support, loop):
    """Does the lasso entering ``loop`` with ``support`` carry an odd trace?

    ``support`` marks the formulas alive where the loop starts.  Looks for a
    formula reachable through some number of iterations that returns to
    itself after ``k`` iterations with an odd maximal weight, scanning the
    powers of ``loop`` until they repeat.
    """
    reach = support
    while True:
        nxt = reach | step(reach, loop)
        if nxt == reach:
            break
        reach = nxt
    alive = [i for i in range(len(loop)) if reach >> i & 1]
    if not alive:
        return False
    seen = set()
    power = loop
    while power not in seen:
        seen.add(power)
        for h in alive:
            if power[h][h] & ODD:
                return True
        power = compose(power, loop)
    return False
