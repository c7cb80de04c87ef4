// Properties of the runtime header, checked against a naive model.
#include "tym_runtime.hpp"

#include <iostream>
#include <random>

using tym::dim_vector;
using tym::idx_vector;
using tym::IntArray;

static int failures = 0;

#define EXPECT(cond)                                                              \
    do {                                                                          \
        if (!(cond)) {                                                            \
            ++failures;                                                           \
            std::cerr << __LINE__ << ": expected " #cond << std::endl;            \
        }                                                                         \
    } while (0)

// Column-major reference matrix.
struct Model {
    int64_t r, c;
    std::vector<int32_t> v;
    int32_t at(int64_t i, int64_t j) const { return v[i + j * r]; }
};

static IntArray make(const Model& m) {
    IntArray a(dim_vector(m.r, m.c));
    for (int64_t k = 0; k < m.r * m.c; ++k) a.xelem(k) = m.v[k];
    return a;
}

static bool same(const IntArray& a, const Model& m) {
    if (a.rows() != m.r || a.columns() != m.c) return false;
    for (int64_t k = 0; k < m.r * m.c; ++k)
        if (int32_t(a.xelem(k)) != m.v[k]) return false;
    return true;
}

struct Sel {
    int kind;  // 0 scalar, 1 range, 2 colon
    int64_t a, b, s;
    idx_vector idx() const {
        if (kind == 0) return idx_vector(a);
        if (kind == 1) return idx_vector(a, b, s);
        return idx_vector::colon;
    }
    // Positions, or false when one falls outside [0, extent).
    bool positions(int64_t extent, std::vector<int64_t>& out) const {
        out.clear();
        if (kind == 2) {
            for (int64_t i = 0; i < extent; ++i) out.push_back(i);
            return true;
        }
        for (int64_t i = a; i < b; i += s) {
            if (i < 0 || i >= extent) return false;
            out.push_back(i);
        }
        return true;
    }
};

static Sel random_sel(std::mt19937& g, int64_t extent) {
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_int_distribution<int64_t> pos(-1, extent);
    std::uniform_int_distribution<int64_t> step(1, 3);
    Sel s{kind(g), pos(g), 0, 1};
    if (s.kind == 0) s.b = s.a + 1;
    if (s.kind == 1) {
        s.a = std::max<int64_t>(s.a, 0);
        s.b = s.a + std::uniform_int_distribution<int64_t>(0, extent)(g);
        s.s = step(g);
    }
    return s;
}

static void refcounts() {
    IntArray a(dim_vector(3, 3));
    EXPECT(a.ref_count() == 1);
    IntArray b = a;
    IntArray c;
    c = b;
    EXPECT(a.ref_count() == 3 && a.shares_with(c));
    {
        IntArray d = a;
        EXPECT(a.ref_count() == 4);
    }
    EXPECT(a.ref_count() == 3);
    IntArray e = std::move(c);
    EXPECT(a.ref_count() == 3 && e.shares_with(a));
    b.xelem(0) = 7;
    EXPECT(!b.shares_with(a) && a.ref_count() == 2 && b.ref_count() == 1);
    a = a;
    EXPECT(a.ref_count() == 2);
    e = b;
    EXPECT(a.ref_count() == 1 && b.ref_count() == 2);
}

static void copy_on_write() {
    IntArray a(dim_vector(2, 2), tym::Int(1));
    IntArray b = a;
    b.checkelem(1, 1) = 5;
    EXPECT(int32_t(a.xelem(1, 1)) == 1 && int32_t(b.xelem(1, 1)) == 5);
    const IntArray& ca = a;
    IntArray c = a;
    EXPECT(int32_t(ca.xelem(0)) == 1 && c.shares_with(a));
    c.assign(idx_vector::colon, IntArray(dim_vector(1, 1), tym::Int(9)));
    EXPECT(int32_t(a.xelem(3)) == 1 && int32_t(c.xelem(3)) == 9);
}

static void saturation() {
    EXPECT(tym::saturate(int64_t(1) << 40) == INT32_MAX);
    EXPECT(tym::saturate(-(int64_t(1) << 40)) == INT32_MIN);
    EXPECT(tym::saturate_real(3e9) == INT32_MAX && tym::saturate_real(-3e9) == INT32_MIN);
    EXPECT(tym::saturate_real(-2.9) == -2 && tym::saturate_real(2.9) == 2);
    IntArray a(dim_vector(1, 1), tym::Int(INT32_MAX));
    IntArray b = a + int64_t(1);
    EXPECT(int32_t(b.xelem(0)) == INT32_MAX);
    EXPECT(int32_t(IntArray(dim_vector(1, 2)).xelem(1)) == 0);
}

static void random_index_assign(int cases) {
    std::mt19937 g(1234);
    std::uniform_int_distribution<int64_t> dim(1, 8);
    std::uniform_int_distribution<int32_t> val(-100, 100);
    std::vector<int64_t> rp, cp;
    for (int n = 0; n < cases; ++n) {
        Model m{dim(g), dim(g), {}};
        for (int64_t k = 0; k < m.r * m.c; ++k) m.v.push_back(val(g));
        IntArray a = make(m);
        IntArray alias = a;
        Sel rs = random_sel(g, m.r), cs = random_sel(g, m.c);
        bool ok = rs.positions(m.r, rp) && cs.positions(m.c, cp);

        bool threw = false;
        try {
            IntArray got = a.index(rs.idx(), cs.idx());
            Model want{int64_t(rp.size()), int64_t(cp.size()), {}};
            for (int64_t q : cp)
                for (int64_t p : rp) want.v.push_back(m.at(p, q));
            EXPECT(same(got, want));
        } catch (const tym::runtime_error&) {
            threw = true;
        }
        EXPECT(threw == !ok);

        bool scalar_src = g() % 2 == 0;
        Model src{scalar_src ? 1 : int64_t(rp.size()), scalar_src ? 1 : int64_t(cp.size()), {}};
        for (int64_t k = 0; k < src.r * src.c; ++k) src.v.push_back(val(g));
        threw = false;
        try {
            a.assign(rs.idx(), cs.idx(), make(src));
        } catch (const tym::runtime_error&) {
            threw = true;
        }
        EXPECT(threw == !ok);
        Model want = m;
        if (ok) {
            int64_t k = 0;
            for (int64_t q : cp)
                for (int64_t p : rp) want.v[p + q * m.r] = src.v[scalar_src ? 0 : k++];
        }
        EXPECT(same(a, want));
        EXPECT(same(alias, m));

        if (ok) {
            IntArray d = make(m);
            d.assign(rs.idx(), cs.idx(), d.index(rs.idx(), cs.idx()));
            EXPECT(same(d, m));
        }

        // Linear indexing of the same array.
        Sel ls = random_sel(g, m.r * m.c);
        std::vector<int64_t> lp;
        bool lok = ls.positions(m.r * m.c, lp);
        threw = false;
        try {
            IntArray got = alias.index(ls.idx());
            EXPECT(got.numel() == int64_t(lp.size()));
            for (size_t k = 0; k < lp.size(); ++k) EXPECT(int32_t(got.xelem(k)) == m.v[lp[k]]);
        } catch (const tym::runtime_error&) {
            threw = true;
        }
        EXPECT(threw == !lok);
    }
}

int main() {
    refcounts();
    copy_on_write();
    saturation();
    random_index_assign(1000);
    if (failures) {
        std::cerr << failures << " failures" << std::endl;
        return 1;
    }
    std::cout << "ok" << std::endl;
    return 0;
}
