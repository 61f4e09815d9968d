// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "irschest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "irschest/errors.hpp"

namespace irschest {

namespace {

void require_same_shape(const CMatrix& a, const CMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        std::ostringstream os;
        os << op << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
           << b.cols();
        throw ShapeError(os.str());
    }
}

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols) : CMatrix(rows, cols, cplx{}) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, cplx fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) throw ShapeError("CMatrix: dimensions must be positive");
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    if (rows_ == 0 || cols_ == 0) throw ShapeError("CMatrix: dimensions must be positive");
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ShapeError("CMatrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diagonal(std::span<const cplx> d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

CMatrix CMatrix::column(std::size_t c) const {
    if (c >= cols_) throw ShapeError("CMatrix::column: index out of range");
    CMatrix v(rows_, 1);
    for (std::size_t r = 0; r < rows_; ++r) v(r, 0) = (*this)(r, c);
    return v;
}

void CMatrix::set_column(std::size_t c, const CMatrix& v) {
    if (c >= cols_ || v.rows() != rows_ || v.cols() != 1)
        throw ShapeError("CMatrix::set_column: shape mismatch");
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v(r, 0);
}

CMatrix& CMatrix::operator+=(const CMatrix& rhs) {
    require_same_shape(*this, rhs, "operator+");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& rhs) {
    require_same_shape(*this, rhs, "operator-");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s) noexcept {
    for (auto& x : data_) x *= s;
    return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) {
        std::ostringstream os;
        os << "matmul: inner dimensions differ (" << a.rows() << "x" << a.cols() << " * " << b.rows()
           << "x" << b.cols() << ")";
        throw ShapeError(os.str());
    }
    CMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

CMatrix matmul_hn(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows()) throw ShapeError("matmul_hn: row counts differ");
    CMatrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const cplx aki = std::conj(a(k, i));
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aki * b(k, j);
        }
    }
    return c;
}

CMatrix matmul_nh(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.cols()) throw ShapeError("matmul_nh: column counts differ");
    CMatrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.rows(); ++j) {
            cplx s{};
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * std::conj(b(j, k));
            c(i, j) = s;
        }
    }
    return c;
}

CMatrix hermitian(const CMatrix& a) {
    if (a.empty()) return {};
    CMatrix h(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) h(j, i) = std::conj(a(i, j));
    return h;
}

double frobenius_norm_sq(const CMatrix& a) noexcept {
    double s = 0.0;
    for (const cplx& x : a.data()) s += std::norm(x);
    return s;
}

cplx trace(const CMatrix& a) {
    if (a.rows() != a.cols()) throw ShapeError("trace: matrix is not square");
    cplx t{};
    for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
    return t;
}

double hermitian_defect(const CMatrix& a) {
    if (a.rows() != a.cols()) throw ShapeError("hermitian_defect: matrix is not square");
    double d = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j <= i; ++j) d = std::max(d, std::abs(a(i, j) - std::conj(a(j, i))));
    return d;
}

CMatrix sample_cscg(std::size_t rows, std::size_t cols, double variance, SeededRng& rng) {
    if (!(variance >= 0.0)) throw DomainError("sample_cscg: variance must be non-negative");
    CMatrix m(rows, cols);
    if (variance == 0.0) return m;
    for (cplx& x : m.data()) x = rng.cscg(variance);
    return m;
}

CMatrix cholesky(const CMatrix& a) {
    if (a.rows() != a.cols()) throw ShapeError("cholesky: matrix is not square");
    const std::size_t n = a.rows();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i).real()));
    const double tol = 1e-14 * std::max(scale, 1e-300);

    CMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (!(d > tol)) {
            std::ostringstream os;
            os << "cholesky: matrix is not positive definite (pivot " << j << " = " << d << ")";
            throw NumericalError(os.str(), j);
        }
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / ljj;
        }
    }
    return l;
}

CMatrix solve_hermitian(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != a.cols() || a.rows() != b.rows())
        throw ShapeError("solve_hermitian: shape mismatch");
    const CMatrix l = cholesky(a);
    const std::size_t n = a.rows();
    CMatrix x = b;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        // L y = b
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = x(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
            x(i, c) = s / l(i, i).real();
        }
        // L^H x = y
        for (std::size_t ii = n; ii-- > 0;) {
            cplx s = x(ii, c);
            for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(l(k, ii)) * x(k, c);
            x(ii, c) = s / l(ii, ii).real();
        }
    }
    return x;
}

}  // namespace irschest
