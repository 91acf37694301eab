# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_purepy``.

The loops call MPFR directly on C arrays with the GIL released.  Each
routine performs exactly the same sequence of correctly rounded
operations as its pure-Python counterpart, so results agree bit for bit.
Numbers cross the boundary as exact (mantissa, exponent) pairs; no MPFR
structure is ever shared with gmpy2, whose bundled library may differ
from the one linked here.
"""

from libc.stdlib cimport malloc, free

import gmpy2
from gmpy2 import mpc, mpfr

from .numerics import workprec

NAME = "compiled"

_MPFR = type(mpfr(0))
_MPC = type(mpc(0))
_MPZ = type(gmpy2.mpz(0))


cdef extern from "gmp.h":
    ctypedef struct __mpz_struct:
        pass
    ctypedef __mpz_struct* mpz_ptr
    void mpz_init(mpz_ptr)
    void mpz_clear(mpz_ptr)
    int mpz_set_str(mpz_ptr, const char*, int)
    char* mpz_get_str(char*, int, mpz_ptr)
    size_t mpz_sizeinbase(mpz_ptr, int)


cdef extern from "mpfr.h":
    ctypedef long mpfr_prec_t
    ctypedef long mpfr_exp_t
    ctypedef enum mpfr_rnd_t:
        MPFR_RNDN
    ctypedef struct __mpfr_struct:
        pass
    ctypedef __mpfr_struct* mpfr_ptr
    void mpfr_init2(mpfr_ptr, mpfr_prec_t) nogil
    void mpfr_clear(mpfr_ptr) nogil
    int mpfr_set(mpfr_ptr, mpfr_ptr, mpfr_rnd_t) nogil
    int mpfr_set_ui(mpfr_ptr, unsigned long, mpfr_rnd_t) nogil
    void mpfr_set_zero(mpfr_ptr, int) nogil
    void mpfr_set_nan(mpfr_ptr) nogil
    void mpfr_set_inf(mpfr_ptr, int) nogil
    void mpfr_swap(mpfr_ptr, mpfr_ptr) nogil
    int mpfr_set_z_2exp(mpfr_ptr, mpz_ptr, mpfr_exp_t, mpfr_rnd_t)
    mpfr_exp_t mpfr_get_z_2exp(mpz_ptr, mpfr_ptr)
    int mpfr_add(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t) nogil
    int mpfr_sub(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t) nogil
    int mpfr_mul(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t) nogil
    int mpfr_div(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t) nogil
    int mpfr_div_ui(mpfr_ptr, mpfr_ptr, unsigned long, mpfr_rnd_t) nogil
    int mpfr_mul_2ui(mpfr_ptr, mpfr_ptr, unsigned long, mpfr_rnd_t) nogil
    int mpfr_fmma(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t) nogil
    int mpfr_fmms(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t) nogil
    int mpfr_neg(mpfr_ptr, mpfr_ptr, mpfr_rnd_t) nogil
    int mpfr_abs(mpfr_ptr, mpfr_ptr, mpfr_rnd_t) nogil
    int mpfr_exp(mpfr_ptr, mpfr_ptr, mpfr_rnd_t) nogil
    int mpfr_sin_cos(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t) nogil
    int mpfr_greater_p(mpfr_ptr, mpfr_ptr) nogil
    int mpfr_lessequal_p(mpfr_ptr, mpfr_ptr) nogil
    int mpfr_zero_p(mpfr_ptr) nogil
    int mpfr_nan_p(mpfr_ptr) nogil
    int mpfr_inf_p(mpfr_ptr) nogil
    int mpfr_signbit(mpfr_ptr) nogil
    int mpfr_sgn(mpfr_ptr) nogil


cdef struct cnum:
    __mpfr_struct re
    __mpfr_struct im


cdef struct work:
    cnum t
    cnum p
    cnum f
    __mpfr_struct a
    __mpfr_struct b


# ---------------------------------------------------------------- memory

cdef cnum* cnew(Py_ssize_t n, mpfr_prec_t prec) except NULL:
    cdef Py_ssize_t i
    cdef cnum* a = <cnum*> malloc((n if n > 0 else 1) * sizeof(cnum))
    if a == NULL:
        raise MemoryError()
    for i in range(n):
        mpfr_init2(&a[i].re, prec)
        mpfr_init2(&a[i].im, prec)
        mpfr_set_zero(&a[i].re, 1)
        mpfr_set_zero(&a[i].im, 1)
    return a


cdef void cfree(cnum* a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(n):
        mpfr_clear(&a[i].re)
        mpfr_clear(&a[i].im)
    free(a)


cdef __mpfr_struct* rnew(Py_ssize_t n, mpfr_prec_t prec) except NULL:
    cdef Py_ssize_t i
    cdef __mpfr_struct* a = <__mpfr_struct*> malloc((n if n > 0 else 1) * sizeof(__mpfr_struct))
    if a == NULL:
        raise MemoryError()
    for i in range(n):
        mpfr_init2(&a[i], prec)
        mpfr_set_zero(&a[i], 1)
    return a


cdef void rfree(__mpfr_struct* a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(n):
        mpfr_clear(&a[i])
    free(a)


cdef void wnew(work* w, mpfr_prec_t prec) noexcept nogil:
    mpfr_init2(&w.t.re, prec)
    mpfr_init2(&w.t.im, prec)
    mpfr_init2(&w.p.re, prec)
    mpfr_init2(&w.p.im, prec)
    mpfr_init2(&w.f.re, prec)
    mpfr_init2(&w.f.im, prec)
    mpfr_init2(&w.a, prec)
    mpfr_init2(&w.b, prec)


cdef void wfree(work* w) noexcept nogil:
    mpfr_clear(&w.t.re)
    mpfr_clear(&w.t.im)
    mpfr_clear(&w.p.re)
    mpfr_clear(&w.p.im)
    mpfr_clear(&w.f.re)
    mpfr_clear(&w.f.im)
    mpfr_clear(&w.a)
    mpfr_clear(&w.b)


# ---------------------------------------------------------------- conversion

cdef int rset_py(mpfr_ptr r, object x) except -1:
    cdef __mpz_struct z
    if isinstance(x, (int, _MPZ)):
        man, ex = x, 0
    else:
        if not isinstance(x, _MPFR):
            x = mpfr(x, 53) if isinstance(x, float) else mpfr(x)
        if gmpy2.is_nan(x):
            mpfr_set_nan(r)
            return 0
        if gmpy2.is_infinite(x):
            mpfr_set_inf(r, 1 if x > 0 else -1)
            return 0
        if x == 0:
            mpfr_set_zero(r, -1 if gmpy2.is_signed(x) else 1)
            return 0
        man, ex = x.as_mantissa_exp()
    s = _MPZ(man).digits(16).encode("ascii")
    mpz_init(&z)
    try:
        mpz_set_str(&z, s, 16)
        mpfr_set_z_2exp(r, &z, <mpfr_exp_t> int(ex), MPFR_RNDN)
    finally:
        mpz_clear(&z)
    return 0


cdef object rget_py(mpfr_ptr x, long bits):
    # caller holds a workprec(bits) context
    cdef __mpz_struct z
    cdef mpfr_exp_t e
    cdef char* buf
    if mpfr_nan_p(x):
        return mpfr("nan")
    if mpfr_inf_p(x):
        return mpfr("inf") if mpfr_sgn(x) > 0 else mpfr("-inf")
    if mpfr_zero_p(x):
        return mpfr("-0") if mpfr_signbit(x) else mpfr(0)
    mpz_init(&z)
    try:
        e = mpfr_get_z_2exp(&z, x)
        buf = <char*> malloc(mpz_sizeinbase(&z, 16) + 2)
        if buf == NULL:
            raise MemoryError()
        try:
            mpz_get_str(buf, 16, &z)
            s = buf.decode("ascii")
        finally:
            free(buf)
    finally:
        mpz_clear(&z)
    return gmpy2.mul_2exp(mpfr(gmpy2.mpz(s, 16), bits), e)


cdef int cset_py(cnum* r, object z) except -1:
    if isinstance(z, _MPC):
        rset_py(&r.re, z.real)
        rset_py(&r.im, z.imag)
    else:
        rset_py(&r.re, z)
        mpfr_set_zero(&r.im, 1)
    return 0


cdef object cget_py(cnum* z, long bits):
    return mpc(rget_py(&z.re, bits), rget_py(&z.im, bits))


# ---------------------------------------------------------------- arithmetic

cdef inline void cset(cnum* r, cnum* a) noexcept nogil:
    mpfr_set(&r.re, &a.re, MPFR_RNDN)
    mpfr_set(&r.im, &a.im, MPFR_RNDN)


cdef inline void cone(cnum* r) noexcept nogil:
    mpfr_set_ui(&r.re, 1, MPFR_RNDN)
    mpfr_set_zero(&r.im, 1)


cdef inline void czero(cnum* r) noexcept nogil:
    mpfr_set_zero(&r.re, 1)
    mpfr_set_zero(&r.im, 1)


cdef inline void cneg(cnum* r, cnum* a) noexcept nogil:
    mpfr_neg(&r.re, &a.re, MPFR_RNDN)
    mpfr_neg(&r.im, &a.im, MPFR_RNDN)


cdef inline void cadd(cnum* r, cnum* a, cnum* b) noexcept nogil:
    mpfr_add(&r.re, &a.re, &b.re, MPFR_RNDN)
    mpfr_add(&r.im, &a.im, &b.im, MPFR_RNDN)


cdef inline void csub(cnum* r, cnum* a, cnum* b) noexcept nogil:
    mpfr_sub(&r.re, &a.re, &b.re, MPFR_RNDN)
    mpfr_sub(&r.im, &a.im, &b.im, MPFR_RNDN)


cdef inline void cmul(cnum* r, cnum* a, cnum* b, cnum* t) noexcept nogil:
    mpfr_fmms(&t.re, &a.re, &b.re, &a.im, &b.im, MPFR_RNDN)
    mpfr_fmma(&t.im, &a.re, &b.im, &a.im, &b.re, MPFR_RNDN)
    mpfr_swap(&r.re, &t.re)
    mpfr_swap(&r.im, &t.im)


cdef inline void cdiv(cnum* r, cnum* a, cnum* b, cnum* t, mpfr_ptr den) noexcept nogil:
    mpfr_fmma(den, &b.re, &b.re, &b.im, &b.im, MPFR_RNDN)
    mpfr_fmma(&t.re, &a.re, &b.re, &a.im, &b.im, MPFR_RNDN)
    mpfr_div(&t.re, &t.re, den, MPFR_RNDN)
    mpfr_fmms(&t.im, &a.im, &b.re, &a.re, &b.im, MPFR_RNDN)
    mpfr_div(&t.im, &t.im, den, MPFR_RNDN)
    mpfr_swap(&r.re, &t.re)
    mpfr_swap(&r.im, &t.im)


cdef inline void cl1(mpfr_ptr r, cnum* a, mpfr_ptr t) noexcept nogil:
    mpfr_abs(r, &a.re, MPFR_RNDN)
    mpfr_abs(t, &a.im, MPFR_RNDN)
    mpfr_add(r, r, t, MPFR_RNDN)


cdef inline bint ciszero(cnum* a) noexcept nogil:
    return mpfr_zero_p(&a.re) and mpfr_zero_p(&a.im)


# ---------------------------------------------------------------- elimination

cdef void c_det(cnum* a, int* rows, int n, cnum* d, work* w,
                mpfr_ptr best, mpfr_ptr v) noexcept nogil:
    # a is row-major n*n, addressed through the permutation ``rows``
    cdef int col, r, c, piv, tmp
    cdef cnum* pv
    cdef cnum* row
    cdef cnum* rowc
    for r in range(n):
        rows[r] = r
    cone(d)
    for col in range(n):
        piv = col
        cl1(best, &a[rows[col] * n + col], &w.a)
        for r in range(col + 1, n):
            cl1(v, &a[rows[r] * n + col], &w.a)
            if mpfr_greater_p(v, best):
                piv = r
                mpfr_set(best, v, MPFR_RNDN)
        if mpfr_zero_p(best):
            czero(d)
            return
        if piv != col:
            tmp = rows[col]
            rows[col] = rows[piv]
            rows[piv] = tmp
            cneg(d, d)
        rowc = &a[rows[col] * n]
        pv = &rowc[col]
        cmul(d, d, pv, &w.t)
        for r in range(col + 1, n):
            row = &a[rows[r] * n]
            cdiv(&w.f, &row[col], pv, &w.t, &w.a)
            for c in range(col + 1, n):
                cmul(&w.p, &w.f, &rowc[c], &w.t)
                csub(&row[c], &row[c], &w.p)


cdef class _Mat:
    """Scratch square matrix with permutation and workspace."""
    cdef cnum* a
    cdef int* rows
    cdef int n
    cdef work w
    cdef __mpfr_struct best
    cdef __mpfr_struct v
    cdef cnum d

    def __cinit__(self, int n, long prec):
        self.n = n
        self.a = cnew(n * n, prec)
        self.rows = <int*> malloc((n if n > 0 else 1) * sizeof(int))
        if self.rows == NULL:
            raise MemoryError()
        wnew(&self.w, prec)
        mpfr_init2(&self.best, prec)
        mpfr_init2(&self.v, prec)
        mpfr_init2(&self.d.re, prec)
        mpfr_init2(&self.d.im, prec)

    def __dealloc__(self):
        if self.a != NULL:
            cfree(self.a, self.n * self.n)
        if self.rows != NULL:
            free(self.rows)
        wfree(&self.w)
        mpfr_clear(&self.best)
        mpfr_clear(&self.v)
        mpfr_clear(&self.d.re)
        mpfr_clear(&self.d.im)

    cdef void det(self) noexcept nogil:
        c_det(self.a, self.rows, self.n, &self.d, &self.w, &self.best, &self.v)


def det(matrix, bits):
    """Determinant by Gaussian elimination with partial pivoting."""
    cdef int n = len(matrix)
    cdef int i, j
    cdef _Mat m = _Mat(n, bits)
    for i in range(n):
        row = matrix[i]
        for j in range(n):
            cset_py(&m.a[i * n + j], row[j])
    with nogil:
        m.det()
    with workprec(bits):
        return cget_py(&m.d, bits)


def solve(matrix, rhs, bits):
    """Solve ``A x = b``; returns ``(x, det)`` with ``x`` None if singular."""
    cdef int n = len(matrix)
    cdef int i, j, col, r, c, piv, tmp
    cdef bint singular = False
    cdef _Mat m = _Mat(n, bits)
    cdef cnum* b = cnew(n, bits)
    cdef cnum* x = cnew(n, bits)
    cdef cnum* a = m.a
    cdef int* rows = m.rows
    cdef cnum* pv
    cdef cnum* row
    cdef cnum* rowc
    cdef cnum s
    mpfr_init2(&s.re, bits)
    mpfr_init2(&s.im, bits)
    try:
        for i in range(n):
            rowp = matrix[i]
            for j in range(n):
                cset_py(&a[i * n + j], rowp[j])
            cset_py(&b[i], rhs[i])
        with nogil:
            for r in range(n):
                rows[r] = r
            cone(&m.d)
            for col in range(n):
                piv = col
                cl1(&m.best, &a[rows[col] * n + col], &m.w.a)
                for r in range(col + 1, n):
                    cl1(&m.v, &a[rows[r] * n + col], &m.w.a)
                    if mpfr_greater_p(&m.v, &m.best):
                        piv = r
                        mpfr_set(&m.best, &m.v, MPFR_RNDN)
                if mpfr_zero_p(&m.best):
                    singular = True
                    break
                if piv != col:
                    tmp = rows[col]
                    rows[col] = rows[piv]
                    rows[piv] = tmp
                    cneg(&m.d, &m.d)
                rowc = &a[rows[col] * n]
                pv = &rowc[col]
                cmul(&m.d, &m.d, pv, &m.w.t)
                for r in range(col + 1, n):
                    row = &a[rows[r] * n]
                    cdiv(&m.w.f, &row[col], pv, &m.w.t, &m.w.a)
                    for c in range(col + 1, n):
                        cmul(&m.w.p, &m.w.f, &rowc[c], &m.w.t)
                        csub(&row[c], &row[c], &m.w.p)
                    cmul(&m.w.p, &m.w.f, &b[rows[col]], &m.w.t)
                    csub(&b[rows[r]], &b[rows[r]], &m.w.p)
            if not singular:
                for r in range(n - 1, -1, -1):
                    row = &a[rows[r] * n]
                    cset(&s, &b[rows[r]])
                    for c in range(r + 1, n):
                        cmul(&m.w.p, &row[c], &x[c], &m.w.t)
                        csub(&s, &s, &m.w.p)
                    cdiv(&x[r], &s, &row[r], &m.w.t, &m.w.a)
        with workprec(bits):
            if singular:
                return None, mpc(0)
            return [cget_py(&x[i], bits) for i in range(n)], cget_py(&m.d, bits)
    finally:
        cfree(b, n)
        cfree(x, n)
        mpfr_clear(&s.re)
        mpfr_clear(&s.im)


# ---------------------------------------------------------------- moments

def moment_series(omega, m, nterms, wp, bits):
    """mu_0..mu_m of exp(i omega x) on [-1, 1] by the power series."""
    cdef long mm = m
    cdef long J = nterms
    cdef long j, n
    cdef __mpfr_struct* sr = rnew(mm + 1, wp)
    cdef __mpfr_struct* si = rnew(mm + 1, wp)
    cdef __mpfr_struct* s = rnew(8, wp)
    # s: 0 zr, 1 zi, 2 ar, 3 ai, 4 tr, 5 ti, 6 pr/q, 7 pi
    cdef __mpfr_struct* o = rnew(2, bits)
    try:
        om = omega if isinstance(omega, _MPC) else mpc(omega, 1024)
        rset_py(&s[1], om.real)
        rset_py(&s[0], om.imag)
        with nogil:
            mpfr_neg(&s[0], &s[0], MPFR_RNDN)
            mpfr_set_ui(&s[2], 1, MPFR_RNDN)
            mpfr_set_zero(&s[3], 1)
            for j in range(J + 1):
                mpfr_mul_2ui(&s[4], &s[2], 1, MPFR_RNDN)
                mpfr_mul_2ui(&s[5], &s[3], 1, MPFR_RNDN)
                n = j & 1
                while n <= mm:
                    mpfr_div_ui(&s[6], &s[4], n + j + 1, MPFR_RNDN)
                    mpfr_add(&sr[n], &sr[n], &s[6], MPFR_RNDN)
                    mpfr_div_ui(&s[6], &s[5], n + j + 1, MPFR_RNDN)
                    mpfr_add(&si[n], &si[n], &s[6], MPFR_RNDN)
                    n += 2
                mpfr_fmms(&s[6], &s[2], &s[0], &s[3], &s[1], MPFR_RNDN)
                mpfr_fmma(&s[7], &s[2], &s[1], &s[3], &s[0], MPFR_RNDN)
                mpfr_div_ui(&s[2], &s[6], j + 1, MPFR_RNDN)
                mpfr_div_ui(&s[3], &s[7], j + 1, MPFR_RNDN)
        out = []
        with workprec(bits):
            for n in range(mm + 1):
                mpfr_set(&o[0], &sr[n], MPFR_RNDN)
                mpfr_set(&o[1], &si[n], MPFR_RNDN)
                out.append(mpc(rget_py(&o[0], bits), rget_py(&o[1], bits)))
        return out
    finally:
        rfree(sr, mm + 1)
        rfree(si, mm + 1)
        rfree(s, 8)
        rfree(o, 2)


# ---------------------------------------------------------------- Hankel

cdef void fill_rows(cnum* a, cnum* mu, int n, int* kind) noexcept nogil:
    # kind 0: mu_{r+k}; 1: i mu_{r+k+1}; 2: -mu_{r+k+2}
    cdef int r, k
    cdef cnum* src
    cdef cnum* dst
    for r in range(n + 1):
        for k in range(n + 1):
            dst = &a[r * (n + 1) + k]
            if kind[r] == 0:
                cset(dst, &mu[r + k])
            elif kind[r] == 1:
                src = &mu[r + k + 1]
                mpfr_neg(&dst.re, &src.im, MPFR_RNDN)
                mpfr_set(&dst.im, &src.re, MPFR_RNDN)
            else:
                cneg(dst, &mu[r + k + 2])


def hankel_jet(mu, n, order, bits):
    """``[h_n, h_n', h_n'']`` (up to ``order``) from the moments."""
    cdef int nn = n
    cdef int L = 2 * nn + 1 + order
    cdef int r, t, i
    cdef int ordr = order
    cdef _Mat m = _Mat(nn + 1, bits)
    cdef cnum* mus = cnew(L, bits)
    cdef cnum* acc = cnew(4, bits)
    cdef int* kind = <int*> malloc((nn + 1) * sizeof(int))
    try:
        for i in range(L):
            cset_py(&mus[i], mu[i])
        with nogil:
            for i in range(nn + 1):
                kind[i] = 0
            fill_rows(m.a, mus, nn, kind)
            m.det()
            cset(&acc[0], &m.d)
            if ordr >= 1:
                czero(&acc[1])
                for r in range(nn + 1):
                    kind[r] = 1
                    fill_rows(m.a, mus, nn, kind)
                    m.det()
                    cadd(&acc[1], &acc[1], &m.d)
                    kind[r] = 0
            if ordr >= 2:
                czero(&acc[2])
                for r in range(nn + 1):
                    kind[r] = 2
                    fill_rows(m.a, mus, nn, kind)
                    m.det()
                    cadd(&acc[2], &acc[2], &m.d)
                    kind[r] = 0
                czero(&acc[3])
                for r in range(nn + 1):
                    for t in range(r + 1, nn + 1):
                        kind[r] = 1
                        kind[t] = 1
                        fill_rows(m.a, mus, nn, kind)
                        m.det()
                        cadd(&acc[3], &acc[3], &m.d)
                        kind[r] = 0
                        kind[t] = 0
                mpfr_mul_2ui(&acc[3].re, &acc[3].re, 1, MPFR_RNDN)
                mpfr_mul_2ui(&acc[3].im, &acc[3].im, 1, MPFR_RNDN)
                cadd(&acc[2], &acc[2], &acc[3])
        with workprec(bits):
            return [cget_py(&acc[i], bits) for i in range(ordr + 1)]
    finally:
        cfree(mus, L)
        cfree(acc, 4)
        free(kind)


def tilde_coeffs(mu, n, bits):
    """Cofactor coefficients of the unnormalized orthogonal polynomial."""
    cdef int nn = n
    cdef int k, j, c, rr
    cdef int L = 2 * nn if nn > 0 else 1
    cdef cnum* mus = cnew(L, bits)
    cdef _Mat m = _Mat(nn, bits)
    cdef cnum* res = cnew(nn + 1, bits)
    try:
        for j in range(2 * nn):
            cset_py(&mus[j], mu[j])
        with nogil:
            for k in range(nn + 1):
                rr = 0
                for j in range(nn + 1):
                    if j == k:
                        continue
                    for c in range(nn):
                        cset(&m.a[rr * nn + c], &mus[j + c])
                    rr += 1
                m.det()
                if (k + nn) % 2 == 0:
                    cset(&res[k], &m.d)
                else:
                    cneg(&res[k], &m.d)
        with workprec(bits):
            return [cget_py(&res[k], bits) for k in range(nn + 1)]
    finally:
        cfree(mus, L)
        cfree(res, nn + 1)


# ---------------------------------------------------------------- polynomials

def horner(coeffs, z, bits):
    """Evaluate ``sum c_k z^k`` (coefficients lowest first)."""
    cdef int d = len(coeffs) - 1
    cdef int k
    cdef cnum* c = cnew(d + 1, bits)
    cdef cnum* v = cnew(3, bits)  # z, p, tmp
    try:
        for k in range(d + 1):
            cset_py(&c[k], coeffs[k])
        cset_py(&v[0], z)
        with nogil:
            cset(&v[1], &c[d])
            for k in range(d - 1, -1, -1):
                cmul(&v[1], &v[1], &v[0], &v[2])
                cadd(&v[1], &v[1], &c[k])
        with workprec(bits):
            return cget_py(&v[1], bits)
    finally:
        cfree(c, d + 1)
        cfree(v, 3)


def aberth(coeffs, init, bits, maxiter, eps):
    """Aberth-Ehrlich iteration in Gauss-Seidel form (see ``_purepy``)."""
    cdef int d = len(coeffs) - 1
    cdef int it, i, j, k, ndone
    cdef int used = -1
    cdef int cap = maxiter
    cdef cnum* c = cnew(d + 1, bits)
    cdef cnum* z = cnew(d, bits)
    # v: 0 zi, 1 p, 2 dp, 3 s, 4 den, 5 w, 6 tmp, 7 diff, 8 one
    cdef cnum* v = cnew(9, bits)
    cdef __mpfr_struct* r = rnew(8, bits)  # rel, eps, l1w, bound, scratch, tolp, sa, az
    cdef char* done = <char*> malloc(d if d > 0 else 1)
    try:
        for k in range(d + 1):
            cset_py(&c[k], coeffs[k])
        for k in range(d):
            cset_py(&z[k], init[k])
            done[k] = 0
        rset_py(&r[0], gmpy2.mul_2exp(mpfr(1), -(bits - 8)))
        rset_py(&r[5], gmpy2.mul_2exp(mpfr(8 * (d + 1)), -bits))
        with workprec(bits):
            rset_py(&r[1], +mpfr(eps))
        with nogil:
            cone(&v[8])
            for it in range(1, cap + 1):
                for i in range(d):
                    if done[i]:
                        continue
                    cset(&v[0], &z[i])
                    cset(&v[1], &c[d])
                    czero(&v[2])
                    cl1(&r[7], &v[0], &r[4])
                    cl1(&r[6], &v[1], &r[4])
                    for k in range(d - 1, -1, -1):
                        cmul(&v[2], &v[2], &v[0], &v[6])
                        cadd(&v[2], &v[2], &v[1])
                        cmul(&v[1], &v[1], &v[0], &v[6])
                        cadd(&v[1], &v[1], &c[k])
                        mpfr_mul(&r[6], &r[6], &r[7], MPFR_RNDN)
                        cl1(&r[2], &c[k], &r[4])
                        mpfr_add(&r[6], &r[6], &r[2], MPFR_RNDN)
                    if ciszero(&v[1]):
                        done[i] = 1
                        continue
                    czero(&v[3])
                    for j in range(d):
                        if j != i:
                            csub(&v[7], &v[0], &z[j])
                            cdiv(&v[7], &v[8], &v[7], &v[6], &r[4])
                            cadd(&v[3], &v[3], &v[7])
                    cmul(&v[4], &v[1], &v[3], &v[6])
                    csub(&v[4], &v[2], &v[4])
                    if ciszero(&v[4]):
                        continue
                    cdiv(&v[5], &v[1], &v[4], &v[6], &r[4])
                    csub(&z[i], &v[0], &v[5])
                    cl1(&r[2], &v[5], &r[4])
                    cl1(&r[3], &z[i], &r[4])
                    mpfr_mul(&r[3], &r[0], &r[3], MPFR_RNDN)
                    if mpfr_greater_p(&r[1], &r[3]):
                        mpfr_set(&r[3], &r[1], MPFR_RNDN)
                    if mpfr_lessequal_p(&r[2], &r[3]):
                        done[i] = 1
                    else:
                        mpfr_mul(&r[6], &r[6], &r[5], MPFR_RNDN)
                        cl1(&r[2], &v[1], &r[4])
                        if mpfr_lessequal_p(&r[2], &r[6]):
                            done[i] = 1
                ndone = 0
                for i in range(d):
                    ndone += done[i]
                if ndone == d:
                    used = it
                    break
            for i in range(d):
                cset(&v[0], &z[i])
                cset(&v[1], &c[d])
                czero(&v[2])
                for k in range(d - 1, -1, -1):
                    cmul(&v[2], &v[2], &v[0], &v[6])
                    cadd(&v[2], &v[2], &v[1])
                    cmul(&v[1], &v[1], &v[0], &v[6])
                    cadd(&v[1], &v[1], &c[k])
                if ciszero(&v[1]):
                    continue
                czero(&v[3])
                for j in range(d):
                    if j != i:
                        csub(&v[7], &v[0], &z[j])
                        cdiv(&v[7], &v[8], &v[7], &v[6], &r[4])
                        cadd(&v[3], &v[3], &v[7])
                cmul(&v[4], &v[1], &v[3], &v[6])
                csub(&v[4], &v[2], &v[4])
                if not ciszero(&v[4]):
                    cdiv(&v[5], &v[1], &v[4], &v[6], &r[4])
                    csub(&z[i], &v[0], &v[5])
        with workprec(bits):
            return [cget_py(&z[k], bits) for k in range(d)], used
    finally:
        cfree(c, d + 1)
        cfree(z, d)
        cfree(v, 9)
        rfree(r, 8)
        free(done)


# ---------------------------------------------------------------- Heine sums

def heine_sum(nodes, weights, omega, n, x, bits, lo, hi):
    """Partial sums of the n-fold Heine quadrature (see ``_purepy``)."""
    cdef int q = len(nodes)
    cdef int nn = n
    cdef int i, l, level, j, first
    cdef int flo = lo
    cdef int fhi = hi
    cdef bint has_x = x is not None
    cdef __mpfr_struct* xs = rnew(q, bits)
    cdef __mpfr_struct* ws = rnew(q, bits)
    cdef __mpfr_struct* pv = rnew(nn + 1, bits)
    cdef __mpfr_struct* s = rnew(6, bits)  # a, b, t, amp, dd, v
    cdef cnum* e = cnew(q, bits)
    cdef cnum* pe = cnew(nn + 1, bits)
    cdef cnum* tot = cnew(fhi - flo if fhi > flo else 1, bits)
    cdef cnum* cx = cnew(3, bits)  # x, tmp, scratch
    cdef int* idx = <int*> malloc((nn if nn > 0 else 1) * sizeof(int))
    try:
        for i in range(q):
            rset_py(&xs[i], nodes[i])
            rset_py(&ws[i], weights[i])
        om = omega if isinstance(omega, _MPC) else mpc(omega, 1024)
        rset_py(&s[0], om.real)
        rset_py(&s[1], om.imag)
        if has_x:
            cset_py(&cx[0], x)
        with nogil:
            for i in range(q):
                mpfr_mul(&s[2], &s[0], &xs[i], MPFR_RNDN)
                mpfr_mul(&s[3], &s[1], &xs[i], MPFR_RNDN)
                mpfr_neg(&s[3], &s[3], MPFR_RNDN)
                mpfr_exp(&s[3], &s[3], MPFR_RNDN)
                mpfr_mul(&s[3], &ws[i], &s[3], MPFR_RNDN)
                mpfr_sin_cos(&e[i].im, &e[i].re, &s[2], MPFR_RNDN)
                mpfr_mul(&e[i].re, &s[3], &e[i].re, MPFR_RNDN)
                mpfr_mul(&e[i].im, &s[3], &e[i].im, MPFR_RNDN)
                if has_x:
                    mpfr_sub(&cx[1].re, &cx[0].re, &xs[i], MPFR_RNDN)
                    mpfr_set(&cx[1].im, &cx[0].im, MPFR_RNDN)
                    cmul(&e[i], &e[i], &cx[1], &cx[2])
            cone(&pe[0])
            mpfr_set_ui(&pv[0], 1, MPFR_RNDN)
            for first in range(flo, fhi):
                czero(&tot[first - flo])
                if q - first < nn:
                    continue
                idx[0] = first
                cmul(&pe[1], &pe[0], &e[first], &cx[2])
                mpfr_set(&pv[1], &pv[0], MPFR_RNDN)
                if nn == 1:
                    mpfr_mul(&cx[1].re, &pe[1].re, &pv[1], MPFR_RNDN)
                    mpfr_mul(&cx[1].im, &pe[1].im, &pv[1], MPFR_RNDN)
                    cadd(&tot[first - flo], &tot[first - flo], &cx[1])
                    continue
                level = 1
                idx[1] = first
                while level >= 1:
                    idx[level] += 1
                    if idx[level] > q - (nn - level):
                        level -= 1
                        continue
                    j = idx[level]
                    mpfr_set(&s[5], &pv[level], MPFR_RNDN)
                    for l in range(level):
                        mpfr_sub(&s[4], &xs[j], &xs[idx[l]], MPFR_RNDN)
                        mpfr_mul(&s[4], &s[4], &s[4], MPFR_RNDN)
                        mpfr_mul(&s[5], &s[5], &s[4], MPFR_RNDN)
                    mpfr_set(&pv[level + 1], &s[5], MPFR_RNDN)
                    cmul(&pe[level + 1], &pe[level], &e[j], &cx[2])
                    if level == nn - 1:
                        mpfr_mul(&cx[1].re, &pe[nn].re, &s[5], MPFR_RNDN)
                        mpfr_mul(&cx[1].im, &pe[nn].im, &s[5], MPFR_RNDN)
                        cadd(&tot[first - flo], &tot[first - flo], &cx[1])
                    else:
                        level += 1
                        idx[level] = j
        with workprec(bits):
            return [cget_py(&tot[i], bits) for i in range(fhi - flo)]
    finally:
        rfree(xs, q)
        rfree(ws, q)
        rfree(pv, nn + 1)
        rfree(s, 6)
        cfree(e, q)
        cfree(pe, nn + 1)
        cfree(tot, fhi - flo if fhi > flo else 1)
        cfree(cx, 3)
        free(idx)
