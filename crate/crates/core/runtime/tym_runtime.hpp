// Runtime support for C++ generated by tymc's standalone target.
//
// A small, dependency-free subset of the Octave array library: reference
// counted column-major arrays with copy-on-write, saturating int32 elements,
// idx_vector selectors, plus the entry-point harness that reads an args file,
// calls the generated function and prints the result.

#ifndef TYM_RUNTIME_HPP
#define TYM_RUNTIME_HPP

#include <atomic>
#include <chrono>
#include <cmath>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace tym {

class runtime_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline int32_t saturate(int64_t v) {
    if (v > INT32_MAX) return INT32_MAX;
    if (v < INT32_MIN) return INT32_MIN;
    return static_cast<int32_t>(v);
}

// Truncate toward zero, then clamp. NaN maps to zero.
inline int32_t saturate_real(double v) {
    if (std::isnan(v)) return 0;
    if (v >= 2147483647.0) return INT32_MAX;
    if (v <= -2147483648.0) return INT32_MIN;
    return static_cast<int32_t>(v);
}

// 32-bit integer that saturates instead of wrapping. Arithmetic happens on
// the int64_t it converts to; only construction and += saturate.
class SatInt32 {
public:
    SatInt32() : v_(0) {}

    template <class T, class = typename std::enable_if<std::is_arithmetic<T>::value>::type>
    SatInt32(T x) : v_(convert(x)) {}

    operator int64_t() const { return v_; }
    int64_t value() const { return v_; }

    SatInt32& operator+=(int64_t d) {
        v_ = saturate(static_cast<int64_t>(v_) + d);
        return *this;
    }

private:
    template <class T>
    static int32_t convert(T x) {
        if (std::is_floating_point<T>::value) return saturate_real(static_cast<double>(x));
        if (std::is_unsigned<T>::value && static_cast<uint64_t>(x) > static_cast<uint64_t>(INT64_MAX))
            return INT32_MAX;
        return saturate(static_cast<int64_t>(x));
    }

    int32_t v_;
};

typedef SatInt32 Int;

inline int64_t idiv(int64_t a, int64_t b) {
    if (b == 0) throw runtime_error("integer division by zero");
    if (a == INT64_MIN && b == -1) throw runtime_error("integer overflow in intermediate result");
    return a / b;
}

inline int64_t checked(int64_t a, char op, int64_t b) {
    int64_t r = 0;
    bool overflow = false;
    switch (op) {
    case '+': overflow = __builtin_add_overflow(a, b, &r); break;
    case '-': overflow = __builtin_sub_overflow(a, b, &r); break;
    case '*': overflow = __builtin_mul_overflow(a, b, &r); break;
    default: return idiv(a, b);
    }
    if (overflow) throw runtime_error("integer overflow in intermediate result");
    return r;
}

struct dim_vector {
    int64_t r, c;
    dim_vector(int64_t rows, int64_t cols) : r(rows), c(cols) {
        if (r < 0) throw runtime_error("negative array dimension " + std::to_string(r));
        if (c < 0) throw runtime_error("negative array dimension " + std::to_string(c));
    }
};

[[noreturn]] inline void bound_error(int64_t index, int64_t bound) {
    throw runtime_error("index out of bounds: index " + std::to_string(index) + " out of bound " +
                        std::to_string(bound));
}

// A single index, a half-open stepped range [start, stop) or a colon.
class idx_vector {
public:
    enum Kind { SCALAR, RANGE, COLON };

    idx_vector(int64_t i) : kind_(SCALAR), start_(i), stop_(i + 1), step_(1) {}
    idx_vector(int64_t start, int64_t stop, int64_t step) : kind_(RANGE), start_(start), stop_(stop), step_(step) {}

    static const idx_vector colon;

    Kind kind() const { return kind_; }

    // Zero-based positions selected in a dimension of `extent` elements.
    std::vector<int64_t> positions(int64_t extent) const {
        std::vector<int64_t> out;
        if (kind_ == COLON) {
            for (int64_t i = 0; i < extent; ++i) out.push_back(i);
            return out;
        }
        if (step_ <= 0)
            throw runtime_error("invalid range selector with step " + std::to_string(step_));
        for (int64_t i = start_; i < stop_;) {
            if (i < 0 || i >= extent) bound_error(i + 1, extent);
            out.push_back(i);
            if (__builtin_add_overflow(i, step_, &i)) break;
        }
        return out;
    }

private:
    struct colon_tag {};
    explicit idx_vector(colon_tag) : kind_(COLON), start_(0), stop_(0), step_(1) {}

    Kind kind_;
    int64_t start_, stop_, step_;
};

inline const idx_vector idx_vector::colon = idx_vector(idx_vector::colon_tag());

// Column-major array sharing its storage between handles. Writes through a
// shared handle copy the storage first.
template <class T>
class NumArray {
public:
    NumArray() : rep_(new Rep(0)), rows_(0), cols_(0) {}

    // Allocates without filling; element types with a default constructor
    // (SatInt32) still start at zero.
    explicit NumArray(dim_vector d) : rep_(new Rep(d.r * d.c)), rows_(d.r), cols_(d.c) {}

    NumArray(dim_vector d, const T& fill) : NumArray(d) {
        for (int64_t k = 0; k < rep_->len; ++k) rep_->data[k] = fill;
    }

    NumArray(const NumArray& o) : rep_(o.rep_), rows_(o.rows_), cols_(o.cols_) { ++rep_->count; }

    NumArray(NumArray&& o) noexcept : rep_(o.rep_), rows_(o.rows_), cols_(o.cols_) { o.rep_ = nullptr; }

    NumArray& operator=(const NumArray& o) {
        if (rep_ != o.rep_) {
            ++o.rep_->count;
            release();
            rep_ = o.rep_;
        }
        rows_ = o.rows_;
        cols_ = o.cols_;
        return *this;
    }

    NumArray& operator=(NumArray&& o) noexcept {
        if (this != &o) {
            release();
            rep_ = o.rep_;
            rows_ = o.rows_;
            cols_ = o.cols_;
            o.rep_ = nullptr;
        }
        return *this;
    }

    ~NumArray() { release(); }

    int64_t rows() const { return rows_; }
    int64_t columns() const { return cols_; }
    int64_t numel() const { return rep_->len; }
    int ref_count() const { return rep_->count.load(); }
    const T* data() const { return rep_->data; }
    bool shares_with(const NumArray& o) const { return rep_ == o.rep_; }

    // Unchecked access.
    const T& xelem(int64_t k) const { return rep_->data[k]; }
    const T& xelem(int64_t i, int64_t j) const { return rep_->data[i + j * rows_]; }
    T& xelem(int64_t k) {
        make_unique();
        return rep_->data[k];
    }
    T& xelem(int64_t i, int64_t j) {
        make_unique();
        return rep_->data[i + j * rows_];
    }

    // Checked access, kept out of line like the library it mirrors.
    __attribute__((noinline)) const T& checkelem(int64_t k) const { return rep_->data[linear(k)]; }
    __attribute__((noinline)) const T& checkelem(int64_t i, int64_t j) const { return rep_->data[offset(i, j)]; }
    __attribute__((noinline)) T& checkelem(int64_t k) {
        int64_t n = linear(k);
        make_unique();
        return rep_->data[n];
    }
    __attribute__((noinline)) T& checkelem(int64_t i, int64_t j) {
        int64_t n = offset(i, j);
        make_unique();
        return rep_->data[n];
    }

    const T& operator()(int64_t k) const { return checkelem(k); }

    NumArray index(const idx_vector& s) const {
        std::vector<int64_t> p = s.positions(numel());
        dim_vector d = linear_shape(s, static_cast<int64_t>(p.size()));
        NumArray out(d);
        for (size_t n = 0; n < p.size(); ++n) out.rep_->data[n] = rep_->data[p[n]];
        return out;
    }

    NumArray index(const idx_vector& rs, const idx_vector& cs) const {
        std::vector<int64_t> ri = rs.positions(rows_), ci = cs.positions(cols_);
        int64_t nr = static_cast<int64_t>(ri.size()), nc = static_cast<int64_t>(ci.size());
        NumArray out(dim_vector(nr, nc));
        for (int64_t q = 0; q < nc; ++q)
            for (int64_t p = 0; p < nr; ++p) out.rep_->data[p + q * nr] = rep_->data[ri[p] + ci[q] * rows_];
        return out;
    }

    void assign(const idx_vector& s, const NumArray& src) {
        std::vector<int64_t> p = s.positions(numel());
        int64_t n = static_cast<int64_t>(p.size());
        if (src.numel() != 1 && src.numel() != n) {
            dim_vector d = linear_shape(s, n);
            shape_error(d.r, d.c, src.rows_, src.cols_);
        }
        NumArray keep(src);
        make_unique();
        for (int64_t k = 0; k < n; ++k) rep_->data[p[k]] = keep.rep_->data[keep.numel() == 1 ? 0 : k];
    }

    void assign(const idx_vector& rs, const idx_vector& cs, const NumArray& src) {
        std::vector<int64_t> ri = rs.positions(rows_), ci = cs.positions(cols_);
        int64_t nr = static_cast<int64_t>(ri.size()), nc = static_cast<int64_t>(ci.size());
        if (src.numel() != 1 && (src.rows_ != nr || src.cols_ != nc)) shape_error(nr, nc, src.rows_, src.cols_);
        NumArray keep(src);
        make_unique();
        int64_t k = 0;
        for (int64_t q = 0; q < nc; ++q)
            for (int64_t p = 0; p < nr; ++p, ++k)
                rep_->data[ri[p] + ci[q] * rows_] = keep.rep_->data[keep.numel() == 1 ? 0 : k];
    }

    // Copies shared storage so this handle owns it alone.
    void make_unique() {
        if (rep_->count.load(std::memory_order_acquire) > 1) {
            Rep* fresh = new Rep(rep_->len);
            for (int64_t k = 0; k < rep_->len; ++k) fresh->data[k] = rep_->data[k];
            release();
            rep_ = fresh;
        }
    }

    [[noreturn]] static void shape_error(int64_t r1, int64_t c1, int64_t r2, int64_t c2) {
        throw runtime_error("nonconformant arguments: (" + std::to_string(r1) + "x" + std::to_string(c1) + " vs " +
                            std::to_string(r2) + "x" + std::to_string(c2) + ")");
    }

private:
    struct Rep {
        T* data;
        int64_t len;
        std::atomic<int> count;
        explicit Rep(int64_t n) : data(new T[n > 0 ? n : 1]), len(n), count(1) {}
        ~Rep() { delete[] data; }
    };

    void release() {
        if (rep_ && rep_->count.fetch_sub(1, std::memory_order_acq_rel) == 1) delete rep_;
        rep_ = nullptr;
    }

    int64_t linear(int64_t k) const {
        if (k < 0 || k >= rep_->len) bound_error(k + 1, rep_->len);
        return k;
    }

    int64_t offset(int64_t i, int64_t j) const {
        if (i < 0 || i >= rows_) bound_error(i + 1, rows_);
        if (j < 0 || j >= cols_) bound_error(j + 1, cols_);
        return i + j * rows_;
    }

    // A colon or a column vector source gives a column; anything else a row.
    dim_vector linear_shape(const idx_vector& s, int64_t n) const {
        bool column = s.kind() == idx_vector::COLON || (cols_ == 1 && rows_ != 1);
        return column ? dim_vector(n, 1) : dim_vector(1, n);
    }

    Rep* rep_;
    int64_t rows_, cols_;
};

typedef NumArray<SatInt32> IntArray;
typedef NumArray<double> RealArray;

// Elementwise combination with 1x1 broadcasting.
template <class R, class A, class B, class F>
NumArray<R> zip(const NumArray<A>& a, const NumArray<B>& b, F f) {
    int64_t r, c;
    if ((a.rows() == b.rows() && a.columns() == b.columns()) || b.numel() == 1) {
        r = a.rows();
        c = a.columns();
    } else if (a.numel() == 1) {
        r = b.rows();
        c = b.columns();
    } else {
        NumArray<R>::shape_error(a.rows(), a.columns(), b.rows(), b.columns());
    }
    NumArray<R> out((dim_vector(r, c)));
    for (int64_t k = 0; k < r * c; ++k)
        out.xelem(k) = f(a.xelem(a.numel() == 1 ? 0 : k), b.xelem(b.numel() == 1 ? 0 : k));
    return out;
}

template <class R, class A, class F>
NumArray<R> map(const NumArray<A>& a, F f) {
    NumArray<R> out((dim_vector(a.rows(), a.columns())));
    for (int64_t k = 0; k < a.numel(); ++k) out.xelem(k) = f(a.xelem(k));
    return out;
}

#define TYM_INT_ARRAY_OPS(OP, CH)                                                                      \
    inline IntArray operator OP(const IntArray& a, const IntArray& b) {                                \
        return zip<SatInt32>(a, b, [](SatInt32 x, SatInt32 y) { return SatInt32(checked(x, CH, y)); }); \
    }                                                                                                  \
    inline IntArray operator OP(const IntArray& a, int64_t s) {                                        \
        return map<SatInt32>(a, [s](SatInt32 x) { return SatInt32(checked(x, CH, s)); });              \
    }                                                                                                  \
    inline IntArray operator OP(int64_t s, const IntArray& a) {                                        \
        return map<SatInt32>(a, [s](SatInt32 x) { return SatInt32(checked(s, CH, x)); });              \
    }

#define TYM_REAL_ARRAY_OPS(OP)                                                                        \
    inline RealArray operator OP(const RealArray& a, const RealArray& b) {                            \
        return zip<double>(a, b, [](double x, double y) { return x OP y; });                          \
    }                                                                                                 \
    inline RealArray operator OP(const RealArray& a, double s) {                                      \
        return map<double>(a, [s](double x) { return x OP s; });                                      \
    }                                                                                                 \
    inline RealArray operator OP(double s, const RealArray& a) {                                      \
        return map<double>(a, [s](double x) { return s OP x; });                                      \
    }                                                                                                 \
    inline RealArray operator OP(const IntArray& a, double s) {                                       \
        return map<double>(a, [s](SatInt32 x) { return static_cast<double>(x.value()) OP s; });       \
    }                                                                                                 \
    inline RealArray operator OP(double s, const IntArray& a) {                                       \
        return map<double>(a, [s](SatInt32 x) { return s OP static_cast<double>(x.value()); });       \
    }

TYM_INT_ARRAY_OPS(+, '+')
TYM_INT_ARRAY_OPS(-, '-')
TYM_INT_ARRAY_OPS(*, '*')
TYM_INT_ARRAY_OPS(/, '/')
TYM_REAL_ARRAY_OPS(+)
TYM_REAL_ARRAY_OPS(-)
TYM_REAL_ARRAY_OPS(*)
TYM_REAL_ARRAY_OPS(/)

#undef TYM_INT_ARRAY_OPS
#undef TYM_REAL_ARRAY_OPS

inline IntArray operator-(const IntArray& a) {
    return map<SatInt32>(a, [](SatInt32 x) { return SatInt32(-x.value()); });
}

inline RealArray operator-(const RealArray& a) {
    return map<double>(a, [](double x) { return -x; });
}

// Formats like printf("%.17g"), except that every NaN prints as "nan".
inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// A function argument or result.
class Value {
public:
    enum Kind { INT, REAL, FLOAT, INT_ARRAY, REAL_ARRAY };

    Value() : kind_(REAL), i_(0), r_(0), f_(0) {}
    Value(SatInt32 v) : kind_(INT), i_(v), r_(0), f_(0) {}
    Value(double v) : kind_(REAL), i_(0), r_(v), f_(0) {}
    Value(float v) : kind_(FLOAT), i_(0), r_(0), f_(v) {}
    Value(const IntArray& a) : kind_(INT_ARRAY), i_(0), r_(0), f_(0), ia_(a) {}
    Value(const RealArray& a) : kind_(REAL_ARRAY), i_(0), r_(0), f_(0), ra_(a) {}

    Kind kind() const { return kind_; }

    RealArray array_value() const {
        switch (kind_) {
        case REAL: return RealArray(dim_vector(1, 1), r_);
        case FLOAT: return RealArray(dim_vector(1, 1), static_cast<double>(f_));
        case INT: return RealArray(dim_vector(1, 1), static_cast<double>(i_.value()));
        case REAL_ARRAY: return ra_;
        case INT_ARRAY: return map<double>(ia_, [](SatInt32 x) { return static_cast<double>(x.value()); });
        }
        return RealArray();
    }

    RealArray float_array_value() const { return array_value(); }

    IntArray int32_array_value() const {
        switch (kind_) {
        case INT: return IntArray(dim_vector(1, 1), i_);
        case REAL: return IntArray(dim_vector(1, 1), SatInt32(r_));
        case FLOAT: return IntArray(dim_vector(1, 1), SatInt32(f_));
        case INT_ARRAY: return ia_;
        case REAL_ARRAY: return map<SatInt32>(ra_, [](double x) { return SatInt32(x); });
        }
        return IntArray();
    }

    std::string format() const {
        switch (kind_) {
        case INT: return std::to_string(i_.value()) + "\n";
        case REAL: return format_real(r_) + "\n";
        case FLOAT: return format_real(static_cast<double>(f_)) + "\n";
        case INT_ARRAY: return format_array(ia_, [](SatInt32 x) { return std::to_string(x.value()); });
        case REAL_ARRAY: return format_array(ra_, [](double x) { return format_real(x); });
        }
        return "";
    }

private:
    template <class T, class F>
    static std::string format_array(const NumArray<T>& a, F f) {
        std::string out = "array " + std::to_string(a.rows()) + " " + std::to_string(a.columns()) + "\n";
        for (int64_t i = 0; i < a.rows(); ++i) {
            for (int64_t j = 0; j < a.columns(); ++j) {
                if (j) out += ' ';
                out += f(a.xelem(i, j));
            }
            out += '\n';
        }
        return out;
    }

    Kind kind_;
    SatInt32 i_;
    double r_;
    float f_;
    IntArray ia_;
    RealArray ra_;
};

class value_list {
public:
    value_list() {}
    explicit value_list(std::vector<Value> v) : v_(std::move(v)) {}

    int64_t length() const { return static_cast<int64_t>(v_.size()); }

    const Value& operator()(int64_t k) const {
        if (k < 0 || k >= length()) throw runtime_error("missing argument " + std::to_string(k + 1));
        return v_[k];
    }

    Value& operator()(int64_t k) {
        if (k >= length()) v_.resize(k + 1);
        return v_[k];
    }

private:
    std::vector<Value> v_;
};

inline bool& error_raised() {
    static bool raised = false;
    return raised;
}

// The `error` builtin: report and let the caller return early.
inline void error(const char* msg) {
    std::fprintf(stderr, "error: %s\n", msg);
    error_raised() = true;
}

class ArgsReader {
public:
    explicit ArgsReader(std::istream& in) : in_(in) {}

    bool next(std::string& tok) { return static_cast<bool>(in_ >> tok); }

    std::string expect(const char* what) {
        std::string tok;
        if (!next(tok)) throw std::invalid_argument(std::string("args file ended, expected ") + what);
        return tok;
    }

    int64_t integer(const char* what) {
        std::string tok = expect(what);
        char* end = nullptr;
        errno = 0;
        long long v = std::strtoll(tok.c_str(), &end, 10);
        if (*end || errno) throw std::invalid_argument("bad integer '" + tok + "' for " + what);
        return v;
    }

    int32_t int32(const char* what) {
        int64_t v = integer(what);
        if (v < INT32_MIN || v > INT32_MAX) throw std::invalid_argument("integer out of int32 range for " + std::string(what));
        return static_cast<int32_t>(v);
    }

    double real(const char* what) {
        std::string tok = expect(what);
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (*end) throw std::invalid_argument("bad real '" + tok + "' for " + what);
        return v;
    }

private:
    std::istream& in_;
};

inline std::vector<Value> read_args(std::istream& in) {
    ArgsReader rd(in);
    std::vector<Value> out;
    std::string kind;
    while (rd.next(kind)) {
        if (kind == "int") {
            out.push_back(Value(SatInt32(rd.int32("int"))));
        } else if (kind == "real") {
            out.push_back(Value(rd.real("real")));
        } else if (kind == "float") {
            out.push_back(Value(static_cast<float>(rd.real("float"))));
        } else if (kind == "intarray" || kind == "realarray") {
            int64_t r = rd.integer("rows"), c = rd.integer("columns");
            if (r < 0 || c < 0) throw std::invalid_argument("negative array shape");
            if (kind == "intarray") {
                IntArray a((dim_vector(r, c)));
                for (int64_t i = 0; i < r; ++i)
                    for (int64_t j = 0; j < c; ++j) a.xelem(i, j) = rd.int32("element");
                out.push_back(Value(a));
            } else {
                RealArray a((dim_vector(r, c)));
                for (int64_t i = 0; i < r; ++i)
                    for (int64_t j = 0; j < c; ++j) a.xelem(i, j) = rd.real("element");
                out.push_back(Value(a));
            }
        } else {
            throw std::invalid_argument("unknown argument kind '" + kind + "'");
        }
    }
    return out;
}

// Checks an argument against a signature letter: i int, r real, f float,
// I intArray, R realArray. Scalars also accept a 1x1 array.
inline bool matches(const Value& v, char sig) {
    switch (sig) {
    case 'i': return v.kind() == Value::INT || (v.kind() == Value::INT_ARRAY && v.int32_array_value().numel() == 1);
    case 'r':
        return v.kind() == Value::REAL || (v.kind() == Value::REAL_ARRAY && v.array_value().numel() == 1);
    case 'f':
        return v.kind() == Value::FLOAT || v.kind() == Value::REAL ||
               (v.kind() == Value::REAL_ARRAY && v.array_value().numel() == 1);
    case 'I': return v.kind() == Value::INT_ARRAY;
    case 'R': return v.kind() == Value::REAL_ARRAY;
    }
    return false;
}

typedef value_list (*entry_fn)(const value_list&);

// Usage: <binary> [args-file] [--time]
// Exit status: 0 normal, 1 bad arguments, 2 runtime error or error return.
inline int run_main(int argc, char** argv, const char* name, const char* signature, entry_fn fn) {
    const char* path = nullptr;
    bool time = false;
    for (int k = 1; k < argc; ++k) {
        if (std::strcmp(argv[k], "--time") == 0)
            time = true;
        else
            path = argv[k];
    }
    std::vector<Value> args;
    try {
        if (path) {
            std::ifstream in(path);
            if (!in) throw std::invalid_argument(std::string("cannot open args file ") + path);
            args = read_args(in);
        }
        size_t n = std::strlen(signature);
        if (args.size() != n)
            throw std::invalid_argument(std::string(name) + " expects " + std::to_string(n) + " arguments, got " +
                                        std::to_string(args.size()));
        for (size_t k = 0; k < n; ++k)
            if (!matches(args[k], signature[k]))
                throw std::invalid_argument("argument " + std::to_string(k + 1) + " of " + name + " has the wrong type");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: %s\n", name, e.what());
        return 1;
    }

    value_list result;
    try {
        value_list in(args);
        auto t0 = std::chrono::steady_clock::now();
        result = fn(in);
        auto t1 = std::chrono::steady_clock::now();
        if (time) std::fprintf(stderr, "time %.9f\n", std::chrono::duration<double>(t1 - t0).count());
    } catch (const runtime_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    if (error_raised()) return 2;
    for (int64_t k = 0; k < result.length(); ++k) std::fputs(result(k).format().c_str(), stdout);
    return 0;
}

}  // namespace tym

#endif
