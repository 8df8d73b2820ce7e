#include "tonestack/linalg.hpp"

#include "tonestack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace tonestack::linalg {

namespace {

constexpr double kPivotFloor = 1e-300;

bool finite(const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

void check_system(const ComplexMatrix& z, const ComplexVector& v) {
    if (z.dim() == 0) {
        throw DimensionMismatch("empty system");
    }
    if (v.size() != z.dim()) {
        throw DimensionMismatch("right-hand side has " + std::to_string(v.size()) + " entries, matrix is " +
                                std::to_string(z.dim()) + "x" + std::to_string(z.dim()));
    }
    if (!z.all_finite() || !v.all_finite()) {
        throw NumericalError("non-finite entry in linear system");
    }
}

}  // namespace

bool ComplexVector::all_finite() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(), finite);
}

double ComplexVector::norm2() const noexcept {
    // Scaled accumulation; entries here range over many decades.
    double scale = 0.0;
    for (const auto& e : entries_) scale = std::max(scale, std::abs(e));
    if (scale == 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& e : entries_) sum += std::norm(e / scale);
    return scale * std::sqrt(sum);
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : n_(rows.size()), entries_() {
    entries_.reserve(n_ * n_);
    for (const auto& row : rows) {
        if (row.size() != n_) {
            throw DimensionMismatch("matrix initializer is not square");
        }
        entries_.insert(entries_.end(), row.begin(), row.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool ComplexMatrix::all_finite() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(), finite);
}

double ComplexMatrix::max_modulus() const noexcept {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, std::abs(e));
    return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix t(n_);
    for (std::size_t r = 0; r < n_; ++r)
        for (std::size_t c = 0; c < n_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

ComplexVector multiply(const ComplexMatrix& z, const ComplexVector& x) {
    if (x.size() != z.dim()) {
        throw DimensionMismatch("vector length does not match matrix dimension");
    }
    ComplexVector out(z.dim());
    for (std::size_t r = 0; r < z.dim(); ++r) {
        Complex acc = 0.0;
        for (std::size_t c = 0; c < z.dim(); ++c) acc += z(r, c) * x[c];
        out[r] = acc;
    }
    return out;
}

ComplexVector solve_elimination(const ComplexMatrix& z, const ComplexVector& v) {
    check_system(z, v);
    const std::size_t n = z.dim();
    const double threshold = kPivotFloor * z.max_modulus();

    ComplexMatrix a = z;
    ComplexVector b = v;
    std::vector<std::size_t> row(n);
    std::iota(row.begin(), row.end(), std::size_t{0});

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        double best = std::abs(a(row[k], k));
        for (std::size_t r = k + 1; r < n; ++r) {
            const double mag = std::abs(a(row[r], k));
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (!(best > threshold)) {
            throw SingularMatrix("pivot " + std::to_string(k) + " below singularity threshold");
        }
        std::swap(row[k], row[pivot]);

        const Complex p = a(row[k], k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const Complex factor = a(row[r], k) / p;
            if (factor == Complex{}) continue;
            a(row[r], k) = 0.0;
            for (std::size_t c = k + 1; c < n; ++c) a(row[r], c) -= factor * a(row[k], c);
            b[row[r]] -= factor * b[row[k]];
        }
    }

    ComplexVector x(n);
    for (std::size_t k = n; k-- > 0;) {
        Complex acc = b[row[k]];
        for (std::size_t c = k + 1; c < n; ++c) acc -= a(row[k], c) * x[c];
        x[k] = acc / a(row[k], k);
    }
    if (!x.all_finite()) {
        throw NumericalError("elimination produced a non-finite solution");
    }
    return x;
}

Complex determinant3(const ComplexMatrix& z) {
    if (z.dim() != 3) {
        throw DimensionMismatch("determinant3 requires a 3x3 matrix");
    }
    return z(0, 0) * (z(1, 1) * z(2, 2) - z(1, 2) * z(2, 1)) -
           z(0, 1) * (z(1, 0) * z(2, 2) - z(1, 2) * z(2, 0)) +
           z(0, 2) * (z(1, 0) * z(2, 1) - z(1, 1) * z(2, 0));
}

ComplexVector solve_cramer3(const ComplexMatrix& z, const ComplexVector& v) {
    if (z.dim() != 3) {
        throw DimensionMismatch("Cramer solver is defined for 3x3 systems only");
    }
    check_system(z, v);

    const double scale = z.max_modulus();
    const Complex det = determinant3(z);
    if (!(std::abs(det) > kPivotFloor * scale * scale * scale)) {
        throw SingularMatrix("determinant below singularity threshold");
    }

    ComplexVector x(3);
    for (std::size_t col = 0; col < 3; ++col) {
        ComplexMatrix replaced = z;
        for (std::size_t r = 0; r < 3; ++r) replaced(r, col) = v[r];
        x[col] = determinant3(replaced) / det;
    }
    return x;
}

ComplexMatrix invert(const ComplexMatrix& z) {
    const std::size_t n = z.dim();
    ComplexMatrix inv(n);
    for (std::size_t c = 0; c < n; ++c) {
        ComplexVector unit(n);
        unit[c] = 1.0;
        const ComplexVector col = solve_elimination(z, unit);
        for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
    }
    return inv;
}

double residual(const ComplexMatrix& z, const ComplexVector& i, const ComplexVector& v) {
    if (i.size() != z.dim() || v.size() != z.dim()) {
        throw DimensionMismatch("residual operands have inconsistent dimensions");
    }
    ComplexVector diff = multiply(z, i);
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] -= v[k];
    const double denom = v.norm2();
    return denom == 0.0 ? diff.norm2() : diff.norm2() / denom;
}

}  // namespace tonestack::linalg
