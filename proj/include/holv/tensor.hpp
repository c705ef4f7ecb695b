#pragma once

#include "holv/types.hpp"

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace holv {

// Dense order-m tensor with every mode of dimension n, stored row-major over
// the multi-index (i1, ..., im) with i1 varying slowest. Indices are 0-based.
class CubicalTensor {
public:
    // Zero tensor.
    CubicalTensor(int order, int dim);
    CubicalTensor(int order, int dim, std::vector<double> entries);

    static CubicalTensor from_matrix(const Matrix& m);
    // Tensor with every entry equal to value.
    static CubicalTensor filled(int order, int dim, double value);

    int order() const { return order_; }
    int dim() const { return dim_; }
    std::size_t size() const { return entries_.size(); }
    // Number of entries in one row slice A(i, :, ..., :), i.e. n^(m-1).
    std::size_t row_size() const { return row_size_; }

    std::span<const double> entries() const { return entries_; }
    double operator[](std::size_t flat) const { return entries_[flat]; }
    double operator()(std::initializer_list<int> idx) const;
    double at(std::span<const int> idx) const { return entries_[flat_index(idx)]; }

    void set(std::initializer_list<int> idx, double value);
    void set(std::span<const int> idx, double value);
    void set_flat(std::size_t flat, double value);

    std::size_t flat_index(std::span<const int> idx) const;
    // Writes the multi-index of a flat position into idx (length order()).
    void unravel(std::size_t flat, std::span<int> idx) const;
    std::size_t diagonal_flat(int i) const { return static_cast<std::size_t>(i) * diag_stride_; }
    double diagonal(int i) const { return entries_[diagonal_flat(i)]; }
    bool is_diagonal_flat(std::size_t flat) const { return flat % diag_stride_ == 0; }

    Matrix to_matrix() const;
    double max_abs() const;

    CubicalTensor operator+(const CubicalTensor& other) const;
    CubicalTensor operator-(const CubicalTensor& other) const;
    CubicalTensor operator*(double s) const;
    CubicalTensor operator-() const { return *this * -1.0; }
    bool operator==(const CubicalTensor& other) const = default;

private:
    void check_same_shape(const CubicalTensor& other) const;

    int order_;
    int dim_;
    std::size_t row_size_;
    // Flat distance between consecutive full-diagonal entries.
    std::size_t diag_stride_;
    std::vector<double> entries_;
};

inline CubicalTensor operator*(double s, const CubicalTensor& t) { return t * s; }

// (A x^{m-1})_i = sum over i2..im of A(i, i2, ..., im) x_{i2} ... x_{im}.
// Summation runs in ascending flat order, so results are bit-reproducible.
Vector tvp(const CubicalTensor& a, const Vector& x);

// Derivative of x -> A x^{m-1}: M(i, j) sums, over every position p >= 2
// holding j, the entry times the product of the other x factors.
Matrix tvp_jacobian(const CubicalTensor& a, const Vector& x);

// Componentwise power. Negative bases are rejected unless p is an integer.
Vector hadamard_power(const Vector& x, double p);

CubicalTensor identity_tensor(int order, int dim);

// |diagonal| on the diagonal, -|entry| everywhere else.
CubicalTensor comparison_tensor(const CubicalTensor& a);

struct RowSums {
    double plus = 0.0;   // sum of nonnegative off-diagonal entries in the row
    double minus = 0.0;  // sum of |negative off-diagonal entries| in the row
};
RowSums row_sums(const CubicalTensor& a, int i);

bool is_metzler(const CubicalTensor& a);
// All off-diagonal entries <= 0.
bool has_nonpositive_off_diagonal(const CubicalTensor& a);
bool is_nonnegative(const CubicalTensor& a);

// Restriction to the index set `keep` (every mode), in the given order.
CubicalTensor sub_tensor(const CubicalTensor& a, std::span<const int> keep);

}  // namespace holv
