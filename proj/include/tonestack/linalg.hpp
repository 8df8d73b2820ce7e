#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace tonestack::linalg {

using Complex = std::complex<double>;

class ComplexVector {
public:
    ComplexVector() = default;
    explicit ComplexVector(std::size_t n) : entries_(n) {}
    ComplexVector(std::initializer_list<Complex> values) : entries_(values) {}
    explicit ComplexVector(std::vector<Complex> values) : entries_(std::move(values)) {}

    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    Complex& operator[](std::size_t i) { return entries_[i]; }
    const Complex& operator[](std::size_t i) const { return entries_[i]; }

    [[nodiscard]] std::span<const Complex> values() const noexcept { return entries_; }
    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

    [[nodiscard]] bool all_finite() const noexcept;
    [[nodiscard]] double norm2() const noexcept;

    friend bool operator==(const ComplexVector&, const ComplexVector&) = default;

private:
    std::vector<Complex> entries_;
};

/// Square, row-major dense complex matrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t n) : n_(n), entries_(n * n) {}
    /// Row-wise initializer; throws DimensionMismatch unless square.
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t dim() const noexcept { return n_; }
    Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * n_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * n_ + c]; }

    [[nodiscard]] bool all_finite() const noexcept;
    [[nodiscard]] double max_modulus() const noexcept;
    [[nodiscard]] ComplexMatrix transpose() const;

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Complex> entries_;
};

ComplexVector multiply(const ComplexMatrix& z, const ComplexVector& x);

/// Gaussian elimination with partial pivoting (largest modulus in column).
/// Throws SingularMatrix when a pivot drops below 1e-300 times the largest
/// initial entry modulus, DimensionMismatch on shape conflict and
/// NumericalError when an input entry is not finite.
ComplexVector solve_elimination(const ComplexMatrix& z, const ComplexVector& v);

/// Cramer's rule with explicit 3x3 determinants. Only defined for n == 3.
ComplexVector solve_cramer3(const ComplexMatrix& z, const ComplexVector& v);

Complex determinant3(const ComplexMatrix& z);

/// Explicit inverse, one elimination solve per unit column.
ComplexMatrix invert(const ComplexMatrix& z);

/// ||z*i - v||_2 / ||v||_2. For v == 0 the absolute norm ||z*i||_2 is returned.
double residual(const ComplexMatrix& z, const ComplexVector& i, const ComplexVector& v);

}  // namespace tonestack::linalg
