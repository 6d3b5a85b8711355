#pragma once

// Dense complex linear algebra for the reference semantics. Scalars are 1x1,
// vectors are n x 1; nothing here is meant to be fast, only unambiguous.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace qiral {

class Dense {
public:
    Dense() : r_(0), c_(0) {}
    Dense(long rows, long cols) : r_(rows), c_(cols), a_(size_t(rows) * cols) {}

    static Dense ident(long n) {
        Dense m(n, n);
        for (long i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Dense scalar(std::complex<double> v) {
        Dense m(1, 1);
        m(0, 0) = v;
        return m;
    }
    static Dense column(std::vector<std::complex<double>> v) {
        Dense m;
        m.r_ = long(v.size());
        m.c_ = 1;
        m.a_ = std::move(v);
        return m;
    }

    long rows() const { return r_; }
    long cols() const { return c_; }
    bool is_scalar() const { return r_ == 1 && c_ == 1; }
    bool is_column() const { return c_ == 1; }

    std::complex<double>& operator()(long r, long c) { return a_[size_t(r) * c_ + c]; }
    const std::complex<double>& operator()(long r, long c) const { return a_[size_t(r) * c_ + c]; }

    const std::vector<std::complex<double>>& data() const { return a_; }
    std::vector<std::complex<double>> take() && { return std::move(a_); }

    Dense operator+(const Dense& o) const {
        require_same(o, "+");
        Dense m(r_, c_);
        for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] + o.a_[i];
        return m;
    }
    Dense operator-(const Dense& o) const {
        require_same(o, "-");
        Dense m(r_, c_);
        for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] - o.a_[i];
        return m;
    }
    Dense operator-() const {
        Dense m(r_, c_);
        for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = -a_[i];
        return m;
    }
    Dense operator*(const Dense& o) const {
        if (is_scalar()) return o.scaled(a_[0]);
        if (o.is_scalar()) return scaled(o.a_[0]);
        if (c_ != o.r_)
            throw std::runtime_error("dense product shape mismatch: " + dim_str() + " * " + o.dim_str());
        Dense m(r_, o.c_);
        for (long i = 0; i < r_; ++i)
            for (long k = 0; k < c_; ++k) {
                auto v = (*this)(i, k);
                if (v == std::complex<double>(0.0, 0.0)) continue;
                for (long j = 0; j < o.c_; ++j) m(i, j) += v * o(k, j);
            }
        return m;
    }

    Dense scaled(std::complex<double> s) const {
        Dense m(r_, c_);
        for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] * s;
        return m;
    }

    Dense transpose() const {
        Dense m(c_, r_);
        for (long i = 0; i < r_; ++i)
            for (long j = 0; j < c_; ++j) m(j, i) = (*this)(i, j);
        return m;
    }
    Dense dagger() const {
        Dense m(c_, r_);
        for (long i = 0; i < r_; ++i)
            for (long j = 0; j < c_; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    Dense kron(const Dense& o) const {
        Dense m(r_ * o.r_, c_ * o.c_);
        for (long i = 0; i < r_; ++i)
            for (long j = 0; j < c_; ++j) {
                auto v = (*this)(i, j);
                if (v == std::complex<double>(0.0, 0.0)) continue;
                for (long p = 0; p < o.r_; ++p)
                    for (long q = 0; q < o.c_; ++q)
                        m(i * o.r_ + p, j * o.c_ + q) = v * o(p, q);
            }
        return m;
    }

    double max_abs() const {
        double m = 0.0;
        for (auto& v : a_) m = std::max(m, std::abs(v));
        return m;
    }
    double max_abs_diff(const Dense& o) const {
        require_same(o, "diff");
        double m = 0.0;
        for (size_t i = 0; i < a_.size(); ++i) m = std::max(m, std::abs(a_[i] - o.a_[i]));
        return m;
    }
    double norm2() const {
        double s = 0.0;
        for (auto& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    std::string dim_str() const { return std::to_string(r_) + "x" + std::to_string(c_); }

private:
    long r_, c_;
    std::vector<std::complex<double>> a_;

    void require_same(const Dense& o, const char* op) const {
        if (r_ != o.r_ || c_ != o.c_)
            throw std::runtime_error(std::string("dense shape mismatch in ") + op + ": " +
                                     dim_str() + " vs " + o.dim_str());
    }
};

inline std::complex<double> dense_dot(const Dense& a, const Dense& b) {
    if (!a.is_column() || !b.is_column() || a.rows() != b.rows())
        throw std::runtime_error("inner product needs equal-length columns");
    std::complex<double> s = 0.0;
    for (long i = 0; i < a.rows(); ++i) s += std::conj(a(i, 0)) * b(i, 0);
    return s;
}

// LU with partial pivoting; solves A X = B for (possibly multi-column) B.
inline Dense dense_solve(Dense A, Dense B) {
    if (A.rows() != A.cols()) throw std::runtime_error("dense_solve: matrix not square");
    if (A.rows() != B.rows()) throw std::runtime_error("dense_solve: rhs height mismatch");
    const long n = A.rows();
    std::vector<long> perm(n);
    for (long i = 0; i < n; ++i) perm[i] = i;
    for (long k = 0; k < n; ++k) {
        long p = k;
        double best = std::abs(A(k, k));
        for (long i = k + 1; i < n; ++i) {
            double v = std::abs(A(i, k));
            if (v > best) { best = v; p = i; }
        }
        if (best == 0.0) throw std::runtime_error("dense_solve: singular matrix");
        if (p != k) {
            for (long j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
            for (long j = 0; j < B.cols(); ++j) std::swap(B(k, j), B(p, j));
        }
        for (long i = k + 1; i < n; ++i) {
            auto f = A(i, k) / A(k, k);
            A(i, k) = f;
            if (f == std::complex<double>(0.0, 0.0)) continue;
            for (long j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
            for (long j = 0; j < B.cols(); ++j) B(i, j) -= f * B(k, j);
        }
    }
    for (long k = n - 1; k >= 0; --k)
        for (long j = 0; j < B.cols(); ++j) {
            auto s = B(k, j);
            for (long i = k + 1; i < n; ++i) s -= A(k, i) * B(i, j);
            B(k, j) = s / A(k, k);
        }
    return B;
}

inline Dense dense_inverse(const Dense& A) { return dense_solve(A, Dense::ident(A.rows())); }

} // namespace qiral
