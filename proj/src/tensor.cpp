#include "holv/tensor.hpp"

#include "holv/error.hpp"

#include <cmath>
#include <string>

namespace holv {

namespace {

std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int k = 0; k < exp; ++k) r *= base;
    return r;
}

void check_finite(double v) {
    if (!std::isfinite(v)) throw InputError("tensor entries must be finite");
}

void check_dim(const CubicalTensor& a, const Vector& x) {
    if (x.size() != a.dim()) {
        throw InputError("vector length " + std::to_string(x.size()) + " does not match tensor dimension " +
                         std::to_string(a.dim()));
    }
}

}  // namespace

CubicalTensor::CubicalTensor(int order, int dim) : CubicalTensor(order, dim, {}) {}

CubicalTensor::CubicalTensor(int order, int dim, std::vector<double> entries)
    : order_(order), dim_(dim), entries_(std::move(entries)) {
    if (order < 2) throw InputError("tensor order must be at least 2");
    if (dim < 1) throw InputError("tensor dimension must be at least 1");
    if (order > 8 || ipow(static_cast<std::size_t>(dim), order) > (std::size_t{1} << 28)) {
        throw InputError("tensor too large for dense storage");
    }
    const std::size_t total = ipow(static_cast<std::size_t>(dim), order);
    if (entries_.empty()) entries_.assign(total, 0.0);
    if (entries_.size() != total) {
        throw InputError("tensor of order " + std::to_string(order) + " and dimension " + std::to_string(dim) +
                         " needs " + std::to_string(total) + " entries, got " + std::to_string(entries_.size()));
    }
    for (double v : entries_) check_finite(v);
    row_size_ = total / static_cast<std::size_t>(dim);
    // Diagonal (i, ..., i) sits at i * (1 + n + ... + n^(m-1)).
    diag_stride_ = 0;
    for (int k = 0; k < order; ++k) diag_stride_ += ipow(static_cast<std::size_t>(dim), k);
}

CubicalTensor CubicalTensor::from_matrix(const Matrix& m) {
    if (m.rows() != m.cols()) throw InputError("matrix must be square");
    const int n = static_cast<int>(m.rows());
    std::vector<double> e(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) e[static_cast<std::size_t>(i) * n + j] = m(i, j);
    return CubicalTensor(2, n, std::move(e));
}

CubicalTensor CubicalTensor::filled(int order, int dim, double value) {
    CubicalTensor t(order, dim);
    check_finite(value);
    for (auto& v : t.entries_) v = value;
    return t;
}

std::size_t CubicalTensor::flat_index(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != order_) throw InputError("multi-index length does not match tensor order");
    std::size_t f = 0;
    for (int k : idx) {
        if (k < 0 || k >= dim_) throw InputError("tensor index out of range");
        f = f * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(k);
    }
    return f;
}

void CubicalTensor::unravel(std::size_t flat, std::span<int> idx) const {
    for (int p = order_ - 1; p >= 0; --p) {
        idx[static_cast<std::size_t>(p)] = static_cast<int>(flat % static_cast<std::size_t>(dim_));
        flat /= static_cast<std::size_t>(dim_);
    }
}

double CubicalTensor::operator()(std::initializer_list<int> idx) const {
    return entries_[flat_index(std::span<const int>(idx.begin(), idx.size()))];
}

void CubicalTensor::set(std::initializer_list<int> idx, double value) {
    set(std::span<const int>(idx.begin(), idx.size()), value);
}

void CubicalTensor::set(std::span<const int> idx, double value) { set_flat(flat_index(idx), value); }

void CubicalTensor::set_flat(std::size_t flat, double value) {
    check_finite(value);
    if (flat >= entries_.size()) throw InputError("flat tensor index out of range");
    entries_[flat] = value;
}

Matrix CubicalTensor::to_matrix() const {
    if (order_ != 2) throw InputError("only order-2 tensors convert to matrices");
    Matrix m(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) m(i, j) = entries_[static_cast<std::size_t>(i) * dim_ + j];
    return m;
}

double CubicalTensor::max_abs() const {
    double m = 0.0;
    for (double v : entries_) m = std::max(m, std::abs(v));
    return m;
}

void CubicalTensor::check_same_shape(const CubicalTensor& other) const {
    if (order_ != other.order_ || dim_ != other.dim_) throw InputError("tensor shapes differ");
}

CubicalTensor CubicalTensor::operator+(const CubicalTensor& other) const {
    check_same_shape(other);
    CubicalTensor r = *this;
    for (std::size_t k = 0; k < r.entries_.size(); ++k) r.entries_[k] += other.entries_[k];
    return r;
}

CubicalTensor CubicalTensor::operator-(const CubicalTensor& other) const {
    check_same_shape(other);
    CubicalTensor r = *this;
    for (std::size_t k = 0; k < r.entries_.size(); ++k) r.entries_[k] -= other.entries_[k];
    return r;
}

CubicalTensor CubicalTensor::operator*(double s) const {
    check_finite(s);
    CubicalTensor r = *this;
    for (auto& v : r.entries_) v *= s;
    return r;
}

Vector tvp(const CubicalTensor& a, const Vector& x) {
    check_dim(a, x);
    const int n = a.dim();
    const int m = a.order();
    const std::size_t row = a.row_size();
    const auto e = a.entries();
    Vector out = Vector::Zero(n);
    if (m == 2) {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += e[static_cast<std::size_t>(i) * n + j] * x(j);
            out(i) = s;
        }
        return out;
    }
    // Products of x over the trailing m-1 indices, in the same flat order as
    // each row slice. Shared by all rows.
    std::vector<double> prod(row);
    std::vector<int> idx(static_cast<std::size_t>(m - 1), 0);
    for (std::size_t f = 0; f < row; ++f) {
        double p = 1.0;
        for (int k : idx) p *= x(k);
        prod[f] = p;
        for (int q = m - 2; q >= 0; --q) {
            if (++idx[static_cast<std::size_t>(q)] < n) break;
            idx[static_cast<std::size_t>(q)] = 0;
        }
    }
    for (int i = 0; i < n; ++i) {
        const double* r = e.data() + static_cast<std::size_t>(i) * row;
        double s = 0.0;
        for (std::size_t f = 0; f < row; ++f) s += r[f] * prod[f];
        out(i) = s;
    }
    return out;
}

Matrix tvp_jacobian(const CubicalTensor& a, const Vector& x) {
    check_dim(a, x);
    const int n = a.dim();
    const int m = a.order();
    if (m == 2) return a.to_matrix();
    const std::size_t row = a.row_size();
    const auto e = a.entries();
    Matrix jac = Matrix::Zero(n, n);
    std::vector<int> idx(static_cast<std::size_t>(m - 1), 0);
    for (std::size_t f = 0; f < row; ++f) {
        // d/dx_j of the product x_{i2}...x_{im}: one term per position holding j.
        for (int p = 0; p < m - 1; ++p) {
            double rest = 1.0;
            for (int q = 0; q < m - 1; ++q)
                if (q != p) rest *= x(idx[static_cast<std::size_t>(q)]);
            const int j = idx[static_cast<std::size_t>(p)];
            for (int i = 0; i < n; ++i) jac(i, j) += e[static_cast<std::size_t>(i) * row + f] * rest;
        }
        for (int q = m - 2; q >= 0; --q) {
            if (++idx[static_cast<std::size_t>(q)] < n) break;
            idx[static_cast<std::size_t>(q)] = 0;
        }
    }
    return jac;
}

Vector hadamard_power(const Vector& x, double p) {
    const bool integral = std::floor(p) == p;
    Vector out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x(i) < 0.0 && !integral) throw InputError("negative base with a fractional exponent");
        out(i) = std::pow(x(i), p);
    }
    return out;
}

CubicalTensor identity_tensor(int order, int dim) {
    CubicalTensor t(order, dim);
    for (int i = 0; i < dim; ++i) t.set_flat(t.diagonal_flat(i), 1.0);
    return t;
}

CubicalTensor comparison_tensor(const CubicalTensor& a) {
    CubicalTensor c = a;
    for (std::size_t f = 0; f < a.size(); ++f) {
        const double v = std::abs(a[f]);
        c.set_flat(f, a.is_diagonal_flat(f) ? v : -v);
    }
    return c;
}

RowSums row_sums(const CubicalTensor& a, int i) {
    if (i < 0 || i >= a.dim()) throw InputError("row index out of range");
    RowSums s;
    const std::size_t begin = static_cast<std::size_t>(i) * a.row_size();
    for (std::size_t f = begin; f < begin + a.row_size(); ++f) {
        if (a.is_diagonal_flat(f)) continue;
        if (a[f] >= 0.0)
            s.plus += a[f];
        else
            s.minus -= a[f];
    }
    return s;
}

bool is_metzler(const CubicalTensor& a) {
    for (std::size_t f = 0; f < a.size(); ++f)
        if (!a.is_diagonal_flat(f) && a[f] < 0.0) return false;
    return true;
}

bool has_nonpositive_off_diagonal(const CubicalTensor& a) {
    for (std::size_t f = 0; f < a.size(); ++f)
        if (!a.is_diagonal_flat(f) && a[f] > 0.0) return false;
    return true;
}

bool is_nonnegative(const CubicalTensor& a) {
    for (double v : a.entries())
        if (v < 0.0) return false;
    return true;
}

CubicalTensor sub_tensor(const CubicalTensor& a, std::span<const int> keep) {
    const int s = static_cast<int>(keep.size());
    if (s == 0) throw InputError("empty index set");
    CubicalTensor out(a.order(), s);
    std::vector<int> local(static_cast<std::size_t>(a.order()));
    std::vector<int> global(static_cast<std::size_t>(a.order()));
    for (std::size_t f = 0; f < out.size(); ++f) {
        out.unravel(f, local);
        for (std::size_t p = 0; p < local.size(); ++p) global[p] = keep[static_cast<std::size_t>(local[p])];
        out.set_flat(f, a.at(global));
    }
    return out;
}

}  // namespace holv
