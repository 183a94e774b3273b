"""Hot numeric kernels over Z/n.

Every kernel exists twice: a loop-level version compiled with numba and a
numpy version that vectorises the row and column operations.  The public
names (``howell``, ``smith``, ``kernel_sizes``, ``image_sizes``) dispatch to
one of them according to :mod:`quivrep._accel`.

All matrices are ``int64`` with entries reduced into ``[0, n)``; moduli are
capped at ``MAX_MODULUS`` so that ``s*a + t*b`` never leaves int64.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

MAX_MODULUS = 1 << 24


# ---------------------------------------------------------------- scalars


def _xgcd_py(a, b):
    # prefer the trivial Bezout pair when a | b so eliminations make progress
    if a != 0 and b % a == 0:
        if a < 0:
            return -a, -1, 0
        return a, 1, 0
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b != 0:
        q = a // b
        a, b = b, a - q * b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def _unit_normalizer_py(a, n):
    # returns (g, u): g = gcd(a, n), u a unit mod n with a*u = g (mod n)
    g, _, _ = _xgcd_py(a, n)
    ap = a // g
    mp = n // g
    _, inv, _ = _xgcd_py(ap % mp, mp)
    u = inv % mp
    while _xgcd_py(u, n)[0] != 1:
        u += mp
    return g, u % n


_xgcd_nb = njit(_xgcd_py)


@njit
def _unit_normalizer_nb(a, n):
    g, _, _ = _xgcd_nb(a, n)
    ap = a // g
    mp = n // g
    _, inv, _ = _xgcd_nb(ap % mp, mp)
    u = inv % mp
    while _xgcd_nb(u, n)[0] != 1:
        u += mp
    return g, u % n


# ----------------------------------------------------------- Howell form


@njit
def howell_nb(a, n):
    m, c = a.shape
    R = m + c
    H = np.zeros((R, c), dtype=np.int64)
    for i in range(m):
        for k in range(c):
            H[i, k] = a[i, k] % n
    U = np.zeros((R, R), dtype=np.int64)
    for i in range(R):
        U[i, i] = 1 % n
    r = 0
    for j in range(c):
        if r >= R:
            break
        for i in range(r + 1, R):
            b = H[i, j]
            if b == 0:
                continue
            av = H[r, j]
            if av == 0:
                for k in range(c):
                    tmp = H[r, k]
                    H[r, k] = H[i, k]
                    H[i, k] = tmp
                for k in range(R):
                    tmp = U[r, k]
                    U[r, k] = U[i, k]
                    U[i, k] = tmp
                continue
            g, s, t = _xgcd_nb(av, b)
            p = b // g
            q = av // g
            for k in range(c):
                hr = H[r, k]
                hi = H[i, k]
                H[r, k] = (s * hr + t * hi) % n
                H[i, k] = (q * hi - p * hr) % n
            for k in range(R):
                ur = U[r, k]
                ui = U[i, k]
                U[r, k] = (s * ur + t * ui) % n
                U[i, k] = (q * ui - p * ur) % n
        av = H[r, j]
        if av == 0:
            continue
        g, u = _unit_normalizer_nb(av, n)
        if u != 1:
            for k in range(c):
                H[r, k] = (H[r, k] * u) % n
            for k in range(R):
                U[r, k] = (U[r, k] * u) % n
        for i in range(r):
            q = H[i, j] // g
            if q != 0:
                for k in range(c):
                    H[i, k] = (H[i, k] - q * H[r, k]) % n
                for k in range(R):
                    U[i, k] = (U[i, k] - q * U[r, k]) % n
        f = n // g
        nonzero = False
        for k in range(j + 1, c):
            if (f * H[r, k]) % n != 0:
                nonzero = True
                break
        if nonzero:
            z = -1
            for i in range(r + 1, R):
                empty = True
                for k in range(c):
                    if H[i, k] != 0:
                        empty = False
                        break
                if empty:
                    z = i
                    break
            for k in range(c):
                H[z, k] = (H[z, k] + f * H[r, k]) % n
            for k in range(R):
                U[z, k] = (U[z, k] + f * U[r, k]) % n
        r += 1
    return H, U


def howell_np(a, n):
    a = np.asarray(a, dtype=np.int64)
    m, c = a.shape
    R = m + c
    H = np.zeros((R, c), dtype=np.int64)
    H[:m] = a % n
    U = np.eye(R, dtype=np.int64) % n
    r = 0
    for j in range(c):
        if r >= R:
            break
        for i in np.nonzero(H[r + 1:, j])[0] + r + 1:
            b = int(H[i, j])
            av = int(H[r, j])
            if av == 0:
                H[[r, i]] = H[[i, r]]
                U[[r, i]] = U[[i, r]]
                continue
            g, s, t = _xgcd_py(av, b)
            T = np.array([[s, t], [-(b // g), av // g]], dtype=np.int64)
            H[[r, i]] = (T @ H[[r, i]]) % n
            U[[r, i]] = (T @ U[[r, i]]) % n
        av = int(H[r, j])
        if av == 0:
            continue
        g, u = _unit_normalizer_py(av, n)
        H[r] = (H[r] * u) % n
        U[r] = (U[r] * u) % n
        if r:
            q = H[:r, j] // g
            H[:r] = (H[:r] - np.outer(q, H[r])) % n
            U[:r] = (U[:r] - np.outer(q, U[r])) % n
        ann = ((n // g) * H[r]) % n
        if ann[j + 1:].any():
            rest = H[r + 1:]
            z = r + 1 + int(np.nonzero(~rest.any(axis=1))[0][0])
            H[z] = (H[z] + ann) % n
            U[z] = (U[z] + (n // g) * U[r]) % n
        r += 1
    return H, U


# ---------------------------------------------------------- Smith form


@njit
def smith_nb(a, n):
    """Diagonalise ``a`` (rows are relations) over Z/n.

    Returns ``(d, V, Vinv)`` with ``d[t]`` a divisor of n (``n`` standing for
    a zero diagonal entry), such that ``(Z/n)^k / rowspan(a)`` is
    ``sum_t Z/d[t]`` in the coordinates ``y = x V``.
    """
    r, k = a.shape
    A = np.zeros((r, k), dtype=np.int64)
    for i in range(r):
        for j in range(k):
            A[i, j] = a[i, j] % n
    V = np.zeros((k, k), dtype=np.int64)
    Vi = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        V[i, i] = 1
        Vi[i, i] = 1
    d = np.full(k, n, dtype=np.int64)
    t = 0
    while t < r and t < k:
        bi = -1
        bj = -1
        bg = n
        for i in range(t, r):
            for j in range(t, k):
                if A[i, j] != 0:
                    g, _, _ = _xgcd_nb(A[i, j], n)
                    if g < bg:
                        bg = g
                        bi = i
                        bj = j
        if bi < 0:
            break
        if bi != t:
            for j in range(k):
                tmp = A[t, j]
                A[t, j] = A[bi, j]
                A[bi, j] = tmp
        if bj != t:
            for i in range(r):
                tmp = A[i, t]
                A[i, t] = A[i, bj]
                A[i, bj] = tmp
            for i in range(k):
                tmp = V[i, t]
                V[i, t] = V[i, bj]
                V[i, bj] = tmp
            for j in range(k):
                tmp = Vi[t, j]
                Vi[t, j] = Vi[bj, j]
                Vi[bj, j] = tmp
        while True:
            dirty = False
            for i in range(t + 1, r):
                b = A[i, t]
                if b == 0:
                    continue
                av = A[t, t]
                g, s, tt = _xgcd_nb(av, b)
                p = b // g
                q = av // g
                for j in range(k):
                    x = A[t, j]
                    y = A[i, j]
                    A[t, j] = (s * x + tt * y) % n
                    A[i, j] = (q * y - p * x) % n
            for j in range(t + 1, k):
                b = A[t, j]
                if b == 0:
                    continue
                av = A[t, t]
                g, s, tt = _xgcd_nb(av, b)
                p = b // g
                q = av // g
                for i in range(r):
                    x = A[i, t]
                    y = A[i, j]
                    A[i, t] = (s * x + tt * y) % n
                    A[i, j] = (q * y - p * x) % n
                for i in range(k):
                    x = V[i, t]
                    y = V[i, j]
                    V[i, t] = (s * x + tt * y) % n
                    V[i, j] = (q * y - p * x) % n
                for jj in range(k):
                    x = Vi[t, jj]
                    y = Vi[j, jj]
                    Vi[t, jj] = (q * x + p * y) % n
                    Vi[j, jj] = (s * y - tt * x) % n
            for i in range(t + 1, r):
                if A[i, t] != 0:
                    dirty = True
                    break
            if dirty:
                continue
            g, u = _unit_normalizer_nb(A[t, t], n)
            bad = -1
            for i in range(t + 1, r):
                for j in range(t + 1, k):
                    if A[i, j] % g != 0:
                        bad = i
                        break
                if bad >= 0:
                    break
            if bad >= 0:
                for j in range(k):
                    A[t, j] = (A[t, j] + A[bad, j]) % n
                continue
            if u != 1:
                _, uinv, _ = _xgcd_nb(u, n)
                uinv = uinv % n
                for i in range(r):
                    A[i, t] = (A[i, t] * u) % n
                for i in range(k):
                    V[i, t] = (V[i, t] * u) % n
                for j in range(k):
                    Vi[t, j] = (Vi[t, j] * uinv) % n
            d[t] = g
            break
        t += 1
    return d, V, Vi


def smith_np(a, n):
    a = np.asarray(a, dtype=np.int64)
    r, k = a.shape
    A = a % n
    V = np.eye(k, dtype=np.int64)
    Vi = np.eye(k, dtype=np.int64)
    d = np.full(k, n, dtype=np.int64)
    t = 0
    while t < min(r, k):
        sub = A[t:, t:]
        nz = np.argwhere(sub != 0)
        if len(nz) == 0:
            break
        gs = np.gcd(sub[nz[:, 0], nz[:, 1]], n)
        bi, bj = nz[int(np.argmin(gs))] + t
        A[[t, bi]] = A[[bi, t]]
        A[:, [t, bj]] = A[:, [bj, t]]
        V[:, [t, bj]] = V[:, [bj, t]]
        Vi[[t, bj]] = Vi[[bj, t]]
        while True:
            for i in np.nonzero(A[t + 1:, t])[0] + t + 1:
                av, b = int(A[t, t]), int(A[i, t])
                g, s, tt = _xgcd_py(av, b)
                T = np.array([[s, tt], [-(b // g), av // g]], dtype=np.int64)
                A[[t, i]] = (T @ A[[t, i]]) % n
            for j in np.nonzero(A[t, t + 1:])[0] + t + 1:
                av, b = int(A[t, t]), int(A[t, j])
                g, s, tt = _xgcd_py(av, b)
                p, q = b // g, av // g
                E = np.array([[s, -p], [tt, q]], dtype=np.int64)
                Einv = np.array([[q, p], [-tt, s]], dtype=np.int64)
                A[:, [t, j]] = (A[:, [t, j]] @ E) % n
                V[:, [t, j]] = (V[:, [t, j]] @ E) % n
                Vi[[t, j]] = (Einv @ Vi[[t, j]]) % n
            if A[t + 1:, t].any():
                continue
            g, u = _unit_normalizer_py(int(A[t, t]), n)
            rest = A[t + 1:, t + 1:]
            bad = np.nonzero((rest % g != 0).any(axis=1))[0]
            if len(bad):
                A[t] = (A[t] + A[t + 1 + bad[0]]) % n
                continue
            if u != 1:
                uinv = _xgcd_py(u, n)[1] % n
                A[:, t] = (A[:, t] * u) % n
                V[:, t] = (V[:, t] * u) % n
                Vi[t] = (Vi[t] * uinv) % n
            d[t] = g
            break
        t += 1
    return d, V, Vi


# ------------------------------------------------- brute-force map counts


@njit
def _enumerate_elements_nb(inv):
    k = inv.shape[0]
    total = 1
    for j in range(k):
        total *= inv[j]
    out = np.zeros((total, k), dtype=np.int64)
    for e in range(total):
        rem = e
        for j in range(k - 1, -1, -1):
            out[e, j] = rem % inv[j]
            rem //= inv[j]
    return out


def _enumerate_elements_np(inv):
    inv = np.asarray(inv, dtype=np.int64)
    if len(inv) == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*[np.arange(d) for d in inv], indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)


@njit
def kernel_sizes_nb(mats, src_inv, tgt_inv):
    elems = _enumerate_elements_nb(src_inv)
    B = mats.shape[0]
    tk = tgt_inv.shape[0]
    sk = src_inv.shape[0]
    out = np.zeros(B, dtype=np.int64)
    for b in range(B):
        cnt = 0
        for e in range(elems.shape[0]):
            zero = True
            for i in range(tk):
                acc = 0
                for j in range(sk):
                    acc += mats[b, i, j] * elems[e, j]
                if acc % tgt_inv[i] != 0:
                    zero = False
                    break
            if zero:
                cnt += 1
        out[b] = cnt
    return out


@njit
def image_sizes_nb(mats, src_inv, tgt_inv):
    elems = _enumerate_elements_nb(src_inv)
    B = mats.shape[0]
    tk = tgt_inv.shape[0]
    sk = src_inv.shape[0]
    tsize = 1
    for i in range(tk):
        tsize *= tgt_inv[i]
    out = np.zeros(B, dtype=np.int64)
    seen = np.zeros(tsize, dtype=np.bool_)
    for b in range(B):
        seen[:] = False
        cnt = 0
        for e in range(elems.shape[0]):
            code = 0
            for i in range(tk):
                acc = 0
                for j in range(sk):
                    acc += mats[b, i, j] * elems[e, j]
                code = code * tgt_inv[i] + acc % tgt_inv[i]
            if not seen[code]:
                seen[code] = True
                cnt += 1
        out[b] = cnt
    return out


def _images_np(mats, src_inv, tgt_inv):
    elems = _enumerate_elements_np(src_inv)
    tgt = np.asarray(tgt_inv, dtype=np.int64)
    imgs = np.einsum("bij,ej->bei", mats, elems) % tgt
    radix = np.ones(len(tgt), dtype=np.int64)
    for i in range(len(tgt) - 2, -1, -1):
        radix[i] = radix[i + 1] * tgt[i + 1]
    return imgs @ radix


def kernel_sizes_np(mats, src_inv, tgt_inv):
    mats = np.asarray(mats, dtype=np.int64)
    return (_images_np(mats, src_inv, tgt_inv) == 0).sum(axis=1).astype(np.int64)


def image_sizes_np(mats, src_inv, tgt_inv):
    mats = np.asarray(mats, dtype=np.int64)
    codes = np.sort(_images_np(mats, src_inv, tgt_inv), axis=1)
    if codes.shape[1] == 0:
        return np.zeros(len(mats), dtype=np.int64)
    return 1 + (np.diff(codes, axis=1) != 0).sum(axis=1).astype(np.int64)


# ------------------------------------------------ batched cokernels


@njit
def coker_invariants_nb(mats, tgt_inv, n):
    """Diagonal of the Smith form of ``target / image`` for each map in ``mats``.

    ``mats`` has shape ``(B, t, s)`` in target generator coordinates and the
    target is ``sum_i Z/tgt_inv[i]``; the result has
    shape ``(B, t)`` with entries dividing ``n`` (1 for a trivial factor).
    """
    B, t, s = mats.shape
    out = np.ones((B, t), dtype=np.int64)
    if t == 0:
        return out
    rel = np.zeros((s + t, t), dtype=np.int64)
    for b in range(B):
        for j in range(s):
            for i in range(t):
                rel[j, i] = mats[b, i, j]
        for i in range(t):
            for k in range(t):
                rel[s + i, k] = 0
            rel[s + i, i] = tgt_inv[i]
        d, _, _ = smith_nb(rel, n)
        for i in range(t):
            out[b, i] = d[i]
    return out


def _prime_powers(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def _subgroup_sizes_np(gens, tgt, n):
    """``|<columns of gens[b]>|`` inside ``sum Z/tgt`` for a batch ``(B, t, m)``.

    Subgroups are boolean masks over the enumerated target; each generator is
    absorbed by translating the mask ``n - 1`` times (its order divides ``n``).
    """
    B, t, m = gens.shape
    elems = _enumerate_elements_np(tgt)
    radix = np.ones(t, dtype=np.int64)
    for i in range(t - 2, -1, -1):
        radix[i] = radix[i + 1] * tgt[i + 1]
    sub = np.zeros((B, len(elems)), dtype=bool)
    sub[:, 0] = True
    rows = np.arange(B)[:, None]
    for j in range(m):
        col = gens[:, :, j] % tgt
        if not col.any():
            continue
        shift = ((elems[None, :, :] + col[:, None, :]) % tgt) @ radix  # (B, E)
        grown = sub.copy()
        for _ in range(n - 1):
            moved = np.zeros_like(sub)
            moved[rows, shift] = grown
            if not (moved & ~grown).any():
                break
            grown |= moved
        sub = grown
    return sub.sum(axis=1).astype(np.int64)


def coker_invariants_np(mats, tgt_inv, n, chunk=4096):
    """Same contract as :func:`coker_invariants_nb`, without per-matrix Smith forms.

    For ``C = T / im f`` and each prime power ``q = p^j`` the size
    ``|qC| = |qT + im f| / |im f|`` is a ratio of subgroup sizes; the ratios
    ``|p^j C| / |p^(j+1) C|`` count the cyclic p-factors of order > ``p^j``.
    The result is padded with leading ones, ascending, like the Smith diagonal.
    """
    mats = np.asarray(mats, dtype=np.int64)
    tgt = np.asarray(tgt_inv, dtype=np.int64)
    B, t, s = mats.shape
    out = np.ones((B, t), dtype=np.int64)
    if t == 0 or B == 0:
        return out
    n = int(n)
    n_tgt = int(np.prod(tgt))
    eye = np.eye(t, dtype=np.int64)
    for lo in range(0, B, chunk):
        m = mats[lo:lo + chunk]
        b = len(m)
        im = _subgroup_sizes_np(m, tgt, n)
        primary = []  # per prime: list of (order, multiplicity arrays)
        for p, e in _prime_powers(n):
            sizes = [n_tgt // im]  # |p^0 C|
            q = 1
            for _ in range(e):
                q *= p
                aug = np.concatenate([m, np.broadcast_to(q * eye, (b, t, t))], axis=2)
                sizes.append(_subgroup_sizes_np(aug, tgt, n) // im)
            # at_least[j] = number of p-factors of order >= p^(j+1)
            at_least = []
            for j in range(e):
                ratio = sizes[j] // sizes[j + 1]
                cnt = np.zeros(b, dtype=np.int64)
                while (ratio > 1).any():
                    big = ratio > 1
                    cnt[big] += 1
                    ratio[big] //= p
                at_least.append(cnt)
            primary.append((p, at_least))
        for k in range(b):
            factors = np.ones(t, dtype=np.int64)
            for p, at_least in primary:
                # p-part of the r-th largest factor is p^(#j with at_least[j] > r)
                for r in range(t):
                    power = sum(1 for c in at_least if c[k] > r)
                    factors[t - 1 - r] *= p**power
            out[lo + k] = factors
    return out


# ------------------------------------------------ verdict combination


@njit
def combine_verdicts_nb(bits, starts, sizes, full):
    """AND per-vertex verdict bitmasks over every combination of local choices.

    ``bits[starts[v] + c]`` is the mask of local choice ``c`` at vertex ``v``;
    the combination index runs with the last vertex fastest.  Returns
    ``(per_bit_true_counts, disagreements, first_disagreement)`` where a
    disagreement is a combined mask that is neither 0 nor ``full``.

    Running prefix ANDs are kept per vertex, so the inner loop over the last
    vertex does one AND per combination; masks are tallied in a histogram.
    """
    k = sizes.shape[0]
    nbits = 0
    while (full >> nbits) > 0:
        nbits += 1
    counts = np.zeros(nbits, dtype=np.int64)
    hist = np.zeros(full + 1, dtype=np.int64)
    first = -1
    if k == 0:
        hist[full] = 1
    else:
        for v in range(k):
            if sizes[v] == 0:
                return counts, 0, -1
        idx = np.zeros(k, dtype=np.int64)
        prefix = np.zeros(k, dtype=np.int64)  # prefix[v] = AND of vertices < v
        prefix[0] = full
        for v in range(1, k):
            prefix[v] = prefix[v - 1] & bits[starts[v - 1]]
        last = k - 1
        base = starts[last]
        n_last = sizes[last]
        e = 0
        while True:
            head = prefix[last]
            for c in range(n_last):
                m = head & bits[base + c]
                hist[m] += 1
                if first < 0 and m != 0 and m != full:
                    first = e + c
            e += n_last
            # advance the odometer over vertices 0..last-1
            v = last - 1
            while v >= 0:
                idx[v] += 1
                if idx[v] < sizes[v]:
                    break
                idx[v] = 0
                v -= 1
            if v < 0:
                break
            for w in range(v, last):
                prefix[w + 1] = prefix[w] & bits[starts[w] + idx[w]]
    bad = 0
    for m in range(full + 1):
        if hist[m] == 0:
            continue
        if m != 0 and m != full:
            bad += hist[m]
        for b in range(nbits):
            if (m >> b) & 1:
                counts[b] += hist[m]
    return counts, bad, first


def combine_verdicts_np(bits, starts, sizes, full, chunk=1 << 22):
    bits = np.asarray(bits)
    sizes = [int(x) for x in sizes]
    tables = [bits[int(st):int(st) + sz].astype(np.int64) for st, sz in zip(starts, sizes)]
    nbits = int(full).bit_length()
    counts = np.zeros(nbits, dtype=np.int64)
    bad, first = 0, -1
    # fold all but the last table into a running array, chunking its rows
    head = np.array([int(full)], dtype=np.int64)
    for tab in tables[:-1]:
        head = (head[:, None] & tab[None, :]).ravel()
    last = tables[-1] if tables else np.array([int(full)], dtype=np.int64)
    rows = max(1, chunk // max(1, len(last)))
    for lo in range(0, len(head), rows):
        block = (head[lo:lo + rows, None] & last[None, :]).ravel()
        for b in range(nbits):
            counts[b] += int(((block >> b) & 1).sum())
        mask = (block != 0) & (block != full)
        nb = int(mask.sum())
        if nb and first < 0:
            first = lo * len(last) + int(np.argmax(mask))
        bad += nb
    return counts, bad, first


# --------------------------------------------------------------- dispatch


def _as64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


if USE_NUMBA:

    def howell(a, n):
        return howell_nb(_as64(a), np.int64(n))

    def smith(a, n):
        return smith_nb(_as64(a), np.int64(n))

    def kernel_sizes(mats, src_inv, tgt_inv):
        return kernel_sizes_nb(_as64(mats), _as64(src_inv), _as64(tgt_inv))

    def image_sizes(mats, src_inv, tgt_inv):
        return image_sizes_nb(_as64(mats), _as64(src_inv), _as64(tgt_inv))

    def coker_invariants(mats, tgt_inv, n):
        return coker_invariants_nb(_as64(mats), _as64(tgt_inv), np.int64(n))

    def combine_verdicts(bits, starts, sizes, full):
        return combine_verdicts_nb(_as64(bits), _as64(starts), _as64(sizes), np.int64(full))

else:
    howell = howell_np
    smith = smith_np
    kernel_sizes = kernel_sizes_np
    image_sizes = image_sizes_np
    coker_invariants = coker_invariants_np
    combine_verdicts = combine_verdicts_np
