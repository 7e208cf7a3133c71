# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled (1+lambda) EA run loop.

Consumes the xoshiro256** stream in exactly the order the pure-Python engine
does, so both backends return identical results for the same configuration.
Offspring are never materialized: each is a list of flip positions evaluated
incrementally against the parent.
"""
from libc.math cimport floor, log, log1p
from libc.stdint cimport int64_t, uint8_t, uint64_t
from libc.stdlib cimport free, malloc, calloc


cdef enum:
    STATIC = 0
    EAAB = 1
    TWORATE = 2
    QEA = 3
    HQEA = 4

cdef enum:
    ONEMAX = 0
    LEADINGONES = 1
    NEUTRALITY = 2
    PLATEAU = 3
    RUGGEDNESS = 4

# action codes reported in trace rows
cdef enum:
    ACT_NONE = -1
    ACT_MULT = 0
    ACT_DIVIDE = 1
    ACT_LOW = 2
    ACT_HIGH = 3


cdef struct Rng:
    uint64_t s0
    uint64_t s1
    uint64_t s2
    uint64_t s3


cdef inline uint64_t _splitmix(uint64_t* st) nogil:
    st[0] += <uint64_t>0x9E3779B97F4A7C15ULL
    cdef uint64_t z = st[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline void rng_seed(Rng* r, uint64_t seed) nogil:
    cdef uint64_t sm = seed
    r.s0 = _splitmix(&sm)
    r.s1 = _splitmix(&sm)
    r.s2 = _splitmix(&sm)
    r.s3 = _splitmix(&sm)


cdef inline uint64_t next_u64(Rng* r) nogil:
    cdef uint64_t x = r.s1 * 5
    cdef uint64_t result = ((x << 7) | (x >> 57)) * 9
    cdef uint64_t t = r.s1 << 17
    r.s2 ^= r.s0
    r.s3 ^= r.s1
    r.s1 ^= r.s2
    r.s0 ^= r.s3
    r.s2 ^= t
    r.s3 = (r.s3 << 45) | (r.s3 >> 19)
    return result


cdef inline double next_double(Rng* r) nogil:
    return <double>(next_u64(r) >> 11) * (1.0 / 9007199254740992.0)


cdef inline int64_t next_int(Rng* r, uint64_t m) nogil:
    cdef uint64_t threshold = (<uint64_t>0 - m) % m
    cdef uint64_t v
    while True:
        v = next_u64(r)
        if v >= threshold:
            return <int64_t>(v % m)


cdef inline int64_t sample_flips(Rng* r, int64_t n, double p, double log_q, int64_t* out) nogil:
    cdef int64_t m = 0
    cdef int64_t i
    cdef double pos = -1.0
    cdef double limit = <double>n
    cdef double gap
    if p >= 1.0:
        for i in range(n):
            out[i] = i
        return n
    if p > 0.0:
        while True:
            gap = floor(log(1.0 - next_double(r)) / log_q)
            pos += gap + 1.0
            if pos >= limit:
                break
            out[m] = <int64_t>pos
            m += 1
    if m == 0:
        out[0] = next_int(r, <uint64_t>n)
        m = 1
    return m


cdef inline int64_t ruggedness(int64_t c, int64_t n) nogil:
    if c == n:
        return n
    if (c - n) % 2 == 0:
        return c + 1
    return c - 1 if c > 0 else 0


cdef inline double clamp(double p, double lo, double hi) nogil:
    if p < lo:
        p = lo
    if p > hi:
        p = hi
    return p


cdef struct State:
    int kind
    int64_t n
    int64_t k
    uint8_t* x
    int64_t ones
    int64_t value
    # leadingones
    uint8_t* agree
    int64_t* sigma
    int64_t* rank
    # neutrality
    int64_t* counts
    int64_t limit


cdef inline int64_t transform(State* st, int64_t c) nogil:
    if st.kind == PLATEAU:
        return c // st.k + 1
    if st.kind == RUGGEDNESS:
        return ruggedness(c, st.n)
    return c


cdef inline int64_t lo_scan(State* st, int64_t j) nogil:
    while j < st.n and st.agree[st.sigma[j]]:
        j += 1
    return j


cdef int64_t neutrality_walk(State* st, int64_t* flips, int64_t m, bint keep) nogil:
    cdef int64_t v = st.value
    cdef int64_t i, pos, b
    cdef bint before
    for i in range(m):
        pos = flips[i]
        if pos >= st.limit:
            continue
        b = pos // st.k
        before = 2 * st.counts[b] > st.k
        st.counts[b] += 1 - 2 * st.x[pos]
        v += (2 * st.counts[b] > st.k) - before
    if not keep:
        for i in range(m):
            pos = flips[i]
            if pos < st.limit:
                st.counts[pos // st.k] -= 1 - 2 * st.x[pos]
    return v


cdef int64_t offspring_value(State* st, int64_t* flips, int64_t m) nogil:
    cdef int64_t i, c, rmin, rk, v
    if st.kind == LEADINGONES:
        rmin = st.n
        for i in range(m):
            rk = st.rank[flips[i]]
            if rk < rmin:
                rmin = rk
        if rmin != st.value:
            return rmin if rmin < st.value else st.value
        for i in range(m):
            st.agree[flips[i]] ^= 1
        v = lo_scan(st, st.value)
        for i in range(m):
            st.agree[flips[i]] ^= 1
        return v
    if st.kind == NEUTRALITY:
        return neutrality_walk(st, flips, m, False)
    c = st.ones + m
    for i in range(m):
        c -= 2 * st.x[flips[i]]
    return transform(st, c)


cdef void accept(State* st, int64_t* flips, int64_t m, int64_t value) nogil:
    cdef int64_t i, pos
    if st.kind == NEUTRALITY:
        neutrality_walk(st, flips, m, True)
    for i in range(m):
        pos = flips[i]
        st.ones += 1 - 2 * st.x[pos]
        st.x[pos] ^= 1
        if st.kind == LEADINGONES:
            st.agree[pos] ^= 1
    st.value = value


def run(int64_t n, int64_t lam, int algo, int kind, int64_t k,
        const uint8_t[::1] target, const int64_t[::1] sigma,
        uint64_t seed, double p_min, double p_max,
        double A, double b, bint strict,
        double alpha, double gamma, double a_mult, double a_divide,
        int64_t budget, bint trace):
    """Run one (1+lambda) EA to the optimum or the generation budget.

    Returns ``(generations, hit_optimum, final_fitness, trace_rows)`` where
    ``trace_rows`` is a list of ``(generation, parent_fitness, best_fitness,
    p, state, action_code, reward)`` tuples, or None.
    """
    if n < 1 or lam < 1:
        raise ValueError("n and lambda must be positive")
    cdef Rng rng
    rng_seed(&rng, seed)

    cdef State st
    st.kind = kind
    st.n = n
    st.k = k if k > 0 else 1
    st.x = <uint8_t*>malloc(n * sizeof(uint8_t))
    st.agree = NULL
    st.sigma = NULL
    st.rank = NULL
    st.counts = NULL
    cdef int64_t* cur = <int64_t*>malloc(n * sizeof(int64_t))
    cdef int64_t* best = <int64_t*>malloc(n * sizeof(int64_t))
    cdef double* q = NULL
    if st.x == NULL or cur == NULL or best == NULL:
        free(st.x); free(cur); free(best)
        raise MemoryError()

    cdef int64_t i, j, w, nw, optimum
    cdef uint64_t word
    try:
        nw = (n + 63) >> 6
        for w in range(nw):
            word = next_u64(&rng)
            for j in range(64):
                i = w * 64 + j
                if i >= n:
                    break
                st.x[i] = <uint8_t>((word >> j) & 1)
        st.ones = 0
        for i in range(n):
            st.ones += st.x[i]

        if kind == LEADINGONES:
            st.agree = <uint8_t*>malloc(n * sizeof(uint8_t))
            st.sigma = <int64_t*>malloc(n * sizeof(int64_t))
            st.rank = <int64_t*>malloc(n * sizeof(int64_t))
            if st.agree == NULL or st.sigma == NULL or st.rank == NULL:
                raise MemoryError()
            for i in range(n):
                st.sigma[i] = sigma[i] if sigma.shape[0] == n else i
            for i in range(n):
                st.rank[st.sigma[i]] = i
                st.agree[i] = 1 if st.x[i] == (target[i] if target.shape[0] == n else 1) else 0
            st.value = lo_scan(&st, 0)
            optimum = n
        elif kind == NEUTRALITY:
            st.counts = <int64_t*>calloc(n // st.k + 1, sizeof(int64_t))
            if st.counts == NULL:
                raise MemoryError()
            st.limit = (n // st.k) * st.k
            for i in range(st.limit):
                st.counts[i // st.k] += st.x[i]
            st.value = 0
            for i in range(n // st.k):
                if 2 * st.counts[i] > st.k:
                    st.value += 1
            optimum = n // st.k
        elif kind == PLATEAU:
            st.value = transform(&st, st.ones)
            optimum = n // st.k + 1
        else:
            st.value = transform(&st, st.ones)
            optimum = n

        if algo == QEA or algo == HQEA:
            q = <double*>calloc((lam + 1) * 2, sizeof(double))
            if q == NULL:
                raise MemoryError()

        rows = [] if trace else None
        return _loop(&st, &rng, cur, best, q, lam, algo, optimum,
                     p_min, p_max, A, b, strict, alpha, gamma, a_mult, a_divide,
                     budget, rows)
    finally:
        free(st.x); free(cur); free(best); free(q)
        free(st.agree); free(st.sigma); free(st.rank); free(st.counts)


cdef object _loop(State* st, Rng* rng, int64_t* cur, int64_t* best, double* q,
                  int64_t lam, int algo, int64_t optimum,
                  double p_min, double p_max, double A, double b, bint strict,
                  double alpha, double gamma, double a_mult, double a_divide,
                  int64_t budget, list rows):
    cdef int64_t n = st.n
    cdef double p = 1.0 / <double>n
    cdef double p_used, p_low, p_high, lq, lq_low, lq_high, rate, reward
    cdef double old, nxt, qm, qd
    cdef int64_t gens = 0
    cdef int64_t f_old, f, best_f, ties, m, best_m, n_strict, n_weak, s_new
    cdef int64_t i, n_low, prev_s = -1
    cdef int prev_a = -1, action, tag, best_tag, chosen, lam1_tag
    cdef bint hit = st.value >= optimum
    cdef bint success
    cdef int64_t* swap

    while not hit and gens < budget:
        f_old = st.value
        p_used = p
        if algo == TWORATE:
            p_low = clamp(p / 2, p_min, p_max)
            p_high = clamp(2 * p, p_min, p_max)
            lq_low = log1p(-p_low) if p_low < 1.0 else 0.0
            lq_high = log1p(-p_high) if p_high < 1.0 else 0.0
            if lam == 1:
                lam1_tag = 0 if next_double(rng) < 0.5 else 1
            n_low = (lam + 1) // 2
        else:
            lq = log1p(-p) if p < 1.0 else 0.0

        best_f = -1
        ties = 0
        best_m = 0
        best_tag = -1
        n_strict = 0
        n_weak = 0
        with nogil:
            for i in range(lam):
                if algo == TWORATE:
                    if lam == 1:
                        tag = lam1_tag
                    else:
                        tag = 0 if i < n_low else 1
                    if tag == 0:
                        m = sample_flips(rng, n, p_low, lq_low, cur)
                    else:
                        m = sample_flips(rng, n, p_high, lq_high, cur)
                else:
                    tag = -1
                    m = sample_flips(rng, n, p, lq, cur)
                f = offspring_value(st, cur, m)
                if f > f_old:
                    n_strict += 1
                if f >= f_old:
                    n_weak += 1
                if f > best_f:
                    best_f = f
                    ties = 1
                    swap = best; best = cur; cur = swap
                    best_m = m
                    best_tag = tag
                elif f == best_f:
                    ties += 1
                    if next_int(rng, <uint64_t>ties) == 0:
                        swap = best; best = cur; cur = swap
                        best_m = m
                        best_tag = tag

        gens += 1
        if best_f >= f_old:
            accept(st, best, best_m, best_f)
        s_new = n_strict if strict else n_weak
        reward = <double>best_f / <double>(f_old if f_old > 1 else 1) - 1.0
        action = ACT_NONE

        if best_f >= optimum:
            hit = True
        elif algo == EAAB:
            success = best_f > f_old if strict else best_f >= f_old
            if success:
                p = clamp(A * p, p_min, p_max)
                action = ACT_MULT
            else:
                p = clamp(b * p, p_min, p_max)
                action = ACT_DIVIDE
        elif algo == TWORATE:
            if next_double(rng) < 0.75:
                chosen = best_tag
            else:
                chosen = 1 - best_tag
            if chosen == 0:
                p = clamp(p / 2, p_min, p_max)
                action = ACT_LOW
            else:
                p = clamp(2 * p, p_min, p_max)
                action = ACT_HIGH
        elif algo == QEA or algo == HQEA:
            if prev_s >= 0 and prev_a >= 0:
                old = q[prev_s * 2 + prev_a]
                qm = q[s_new * 2]
                qd = q[s_new * 2 + 1]
                nxt = qm if qm >= qd else qd
                q[prev_s * 2 + prev_a] = old + alpha * ((reward + gamma * nxt) - old)
            prev_s = s_new
            qm = q[s_new * 2]
            qd = q[s_new * 2 + 1]
            if qm != qd:
                action = ACT_MULT if qm > qd else ACT_DIVIDE
            elif algo == QEA:
                action = ACT_MULT if next_double(rng) < 0.5 else ACT_DIVIDE
            else:
                success = best_f > f_old if strict else best_f >= f_old
                action = ACT_MULT if success else ACT_DIVIDE
            prev_a = action
            p = clamp((a_mult if action == ACT_MULT else a_divide) * p, p_min, p_max)

        if rows is not None:
            rows.append((gens, f_old, best_f, p_used, s_new, action, reward))

    return gens, hit, st.value, rows
