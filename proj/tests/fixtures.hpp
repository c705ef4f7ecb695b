#pragma once

// Worked examples and seeded instance generators shared by the unit tests and
// the acceptance binary.

#include "holv/lv_model.hpp"
#include "holv/poly_solver.hpp"
#include "holv/random.hpp"
#include "holv/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace fixture {

using holv::CubicalTensor;
using holv::Matrix;
using holv::PolySystem;
using holv::Vector;

// Diagonal 11 with A_122 = A_211 = -1 (0-based (0,1,1) and (1,0,0)).
inline CubicalTensor example1_a3() {
    CubicalTensor a(3, 2);
    a.set({0, 0, 0}, 11.0);
    a.set({1, 1, 1}, 11.0);
    a.set({0, 1, 1}, -1.0);
    a.set({1, 0, 0}, -1.0);
    return a;
}

inline Matrix example1_a2() {
    Matrix a(2, 2);
    a << 2, -1, -1, 2;
    return a;
}

inline PolySystem example1_system() {
    return PolySystem({example1_a3(), CubicalTensor::from_matrix(example1_a2())}, Vector::Ones(2));
}

// Positive root of 10 x^2 + x = 1.
inline double example1_root() { return (-1.0 + std::sqrt(41.0)) / 20.0; }

inline CubicalTensor example2_a3() {
    CubicalTensor a(3, 2);
    a.set({0, 0, 0}, 11.0);
    a.set({1, 1, 1}, 11.0);
    a.set({0, 0, 1}, -1.0);
    a.set({0, 1, 1}, -1.0);
    a.set({1, 0, 0}, -1.0);
    a.set({1, 0, 1}, -1.0);
    a.set({0, 1, 0}, 10.0);
    a.set({1, 1, 0}, 5.0);
    return a;
}

inline Matrix example2_a2() {
    Matrix a(2, 2);
    a << 0.8883, 1, 0, 1;
    return a;
}

inline PolySystem example2_system() {
    return PolySystem({example2_a3(), CubicalTensor::from_matrix(example2_a2())}, Vector::Ones(2));
}

inline Vector example2_certificate() { return Vector{{0.1117, 1.0}}; }

// Z-pattern tensor (off-diagonals <= 0) whose diagonal beats the absolute
// off-diagonal row sum by a factor in [1.1, 3]. Such tensors are nonsingular M
// and share the certificate 1.
inline CubicalTensor random_z_sdd(holv::Rng& rng, int order, int dim) {
    CubicalTensor t(order, dim);
    for (int i = 0; i < dim; ++i) {
        double off = 0.0;
        for (std::size_t f = static_cast<std::size_t>(i) * t.row_size(); f < (static_cast<std::size_t>(i) + 1) * t.row_size(); ++f) {
            if (t.is_diagonal_flat(f)) continue;
            const double v = rng.uniform() < 0.3 ? 0.0 : -rng.uniform(0.0, 1.0);
            t.set_flat(f, v);
            off += -v;
        }
        t.set_flat(t.diagonal_flat(i), (off + 0.05) * rng.uniform(1.1, 3.0));
    }
    return t;
}

// System A3 x^2 + A2 x = b with Z-pattern diagonally dominant terms.
inline PolySystem random_z_system(holv::Rng& rng, int dim) {
    Vector b(dim);
    for (int i = 0; i < dim; ++i) b(i) = rng.uniform(0.2, 3.0);
    return PolySystem({random_z_sdd(rng, 3, dim), random_z_sdd(rng, 2, dim)}, b);
}

// Mixed-sign tensor whose positive diagonal exceeds the absolute sum of the
// negative off-diagonal entries of its row by a factor in [1.1, 3].
inline CubicalTensor random_grsdd(holv::Rng& rng, int order, int dim) {
    CubicalTensor t(order, dim);
    for (int i = 0; i < dim; ++i) {
        double neg = 0.0;
        for (std::size_t f = static_cast<std::size_t>(i) * t.row_size(); f < (static_cast<std::size_t>(i) + 1) * t.row_size(); ++f) {
            if (t.is_diagonal_flat(f)) continue;
            const double v = rng.uniform(-1.0, 1.0);
            t.set_flat(f, v);
            if (v < 0.0) neg -= v;
        }
        t.set_flat(t.diagonal_flat(i), (neg + 0.05) * rng.uniform(1.1, 3.0));
    }
    return t;
}

// Cooperative model whose self terms beat the off-diagonal row sums in both A
// and B, so trajectories stay bounded: at the largest coordinate M the growth
// factor is at most 1 - c1 M - c2 M^2 with c1, c2 > 0.
inline holv::LVModel random_bounded_cooperative(holv::Rng& rng, int n) {
    Vector r(n);
    Matrix a(n, n);
    CubicalTensor b(3, n);
    for (int i = 0; i < n; ++i) {
        r(i) = rng.uniform(0.5, 2.0);
        double off = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            a(i, j) = rng.uniform(0.1, 1.0);
            off += a(i, j);
        }
        a(i, i) = -(off + rng.uniform(0.2, 1.5));
        double boff = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                if (i == j && j == k) continue;
                const double v = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 0.5);
                b.set({i, j, k}, v);
                boff += v;
            }
        b.set({i, i, i}, -(boff + rng.uniform(0.1, 1.0)));
    }
    return holv::LVModel(r, a, b, holv::Scenario::cooperative);
}

// Two-faction analogue: within each faction the self terms outweigh the
// mutualism, and cross-faction terms only suppress, so orbits stay bounded.
inline holv::LVModel random_bounded_two_faction(holv::Rng& rng, int m, int n) {
    auto faction = [&rng](int size, Vector& r, Matrix& a, std::vector<double>& c) {
        r = Vector(size);
        a = Matrix(size, size);
        c.assign(static_cast<std::size_t>(size * size * size), 0.0);
        for (int i = 0; i < size; ++i) {
            r(i) = rng.uniform(0.5, 2.0);
            double off = 0.0;
            for (int j = 0; j < size; ++j) {
                if (j == i) continue;
                a(i, j) = rng.uniform(0.1, 1.0);
                off += a(i, j);
            }
            a(i, i) = off + rng.uniform(0.2, 1.5);
            double coff = 0.0;
            for (int j = 0; j < size; ++j)
                for (int k = 0; k < size; ++k) {
                    if (i == j && j == k) continue;
                    const double v = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 0.5);
                    c[static_cast<std::size_t>((i * size + j) * size + k)] = v;
                    coff += v;
                }
            c[static_cast<std::size_t>((i * size + i) * size + i)] = coff + rng.uniform(0.1, 1.0);
        }
    };
    auto cross = [&rng](int rows, int cols, Matrix& b, std::vector<double>& d) {
        b = Matrix(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) b(i, j) = rng.uniform(0.0, 1.0);
        d.resize(static_cast<std::size_t>(rows * cols * cols));
        for (auto& v : d) v = rng.uniform(0.0, 0.5);
    };
    holv::TwoFactionParams p;
    faction(m, p.r, p.a, p.c);
    faction(n, p.r_hat, p.a_hat, p.c_hat);
    cross(m, n, p.b, p.d);
    cross(n, m, p.b_hat, p.d_hat);
    return holv::make_two_faction(p);
}

// Two species with 1 - x1 + eps x1 x2 = 0 and x2 = 1 + x1, so x1 solves
// eps x^2 + (eps - 1) x + 1 = 0. The branch from eps = 0 folds at 3 - 2 sqrt 2.
// The [0, 10] two-faction draw, made self-limiting: each self term a_ii, c_iii
// absorbs its row's within-faction cooperative sum, and every cross-faction
// term is multiplied by kappa. Large self-competition keeps orbits bounded.
inline holv::LVModel self_limited_two_faction(std::uint64_t seed, const std::vector<int>& dims, double kappa) {
    const holv::LVModel base = holv::random_scenario(holv::Scenario::two_faction, dims, seed);
    const int m = dims.at(0), n = base.dim();
    Matrix a = base.a();
    CubicalTensor b = base.b();
    auto same = [m](int i, int j) { return (i < m) == (j < m); };
    for (int i = 0; i < n; ++i) {
        double s = 0.0, t = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j != i && same(i, j)) s += a(i, j);
            if (!same(i, j)) a(i, j) *= kappa;
            for (int k = 0; k < n; ++k) {
                if (same(i, j) && same(i, k)) {
                    if (!(j == i && k == i)) t += b({i, j, k});
                } else {
                    b.set({i, j, k}, b({i, j, k}) * kappa);
                }
            }
        }
        a(i, i) -= s;
        b.set({i, i, i}, b({i, i, i}) - t);
    }
    return holv::LVModel(base.r(), a, b, holv::Scenario::two_faction, base.blocks());
}

inline holv::LVModel fold_model() {
    Matrix a(2, 2);
    a << -1, 0, 1, -1;
    CubicalTensor b(3, 2);
    b.set({0, 0, 1}, 1.0);
    return holv::LVModel(Vector::Ones(2), a, b);
}

inline double fold_epsilon() { return 3.0 - 2.0 * std::sqrt(2.0); }

}  // namespace fixture
