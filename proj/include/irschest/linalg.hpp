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

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "irschest/rng.hpp"

namespace irschest {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. Every channel, pilot book and observation is one of these.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols);
    CMatrix(std::size_t rows, std::size_t cols, cplx fill);
    CMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static CMatrix identity(std::size_t n);
    static CMatrix diagonal(std::span<const cplx> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    cplx& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<cplx> data() noexcept { return data_; }
    std::span<const cplx> data() const noexcept { return data_; }

    CMatrix column(std::size_t c) const;
    void set_column(std::size_t c, const CMatrix& v);

    CMatrix& operator+=(const CMatrix& rhs);
    CMatrix& operator-=(const CMatrix& rhs);
    CMatrix& operator*=(cplx s) noexcept;

    bool operator==(const CMatrix& rhs) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(CMatrix a, cplx s);
CMatrix operator*(cplx s, CMatrix a);
inline CMatrix operator*(const CMatrix& a, const CMatrix& b);

/// Standard product; ShapeError unless a.cols() == b.rows().
CMatrix matmul(const CMatrix& a, const CMatrix& b);

/// a^H b without materializing a^H.
CMatrix matmul_hn(const CMatrix& a, const CMatrix& b);

/// a b^H without materializing b^H.
CMatrix matmul_nh(const CMatrix& a, const CMatrix& b);

CMatrix hermitian(const CMatrix& a);

double frobenius_norm_sq(const CMatrix& a) noexcept;

cplx trace(const CMatrix& a);

/// Largest |a(i,j) - conj(a(j,i))|; ShapeError if a is not square.
double hermitian_defect(const CMatrix& a);

/// i.i.d. CSCG entries with E|x|^2 = variance. DomainError if variance < 0.
CMatrix sample_cscg(std::size_t rows, std::size_t cols, double variance, SeededRng& rng);

/// Lower Cholesky factor of a Hermitian positive definite matrix (only the lower triangle is read).
/// NumericalError names the first pivot that is not positive.
CMatrix cholesky(const CMatrix& a);

/// Solve a x = b for Hermitian positive definite a.
CMatrix solve_hermitian(const CMatrix& a, const CMatrix& b);

inline CMatrix operator*(const CMatrix& a, const CMatrix& b) { return matmul(a, b); }

}  // namespace irschest
