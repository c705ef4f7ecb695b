#include "holv/model.hpp"

#include "holv/error.hpp"
#include "holv/tensor_class.hpp"

#include <cmath>
#include <string>

namespace holv {

namespace {

std::string idx1(int i) { return std::to_string(i + 1); }

std::string idx3(int i, int j, int k) { return "(" + idx1(i) + "," + idx1(j) + "," + idx1(k) + ")"; }

void require(bool ok, const std::string& what) {
    if (!ok) throw InputError(what);
}

void validate_two_faction(const Matrix& a, const CubicalTensor& b, const FactionBlocks& fb) {
    const int n = static_cast<int>(a.rows());
    require(fb.m >= 1 && fb.n >= 1 && fb.m + fb.n == n, "faction blocks must be positive and sum to the dimension");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const bool same = in_first_faction(fb, i) == in_first_faction(fb, j);
            if (same)
                require(a(i, j) >= 0.0, "two-faction A(" + idx1(i) + "," + idx1(j) + ") within a faction must be >= 0");
            else
                require(a(i, j) <= 0.0, "two-faction A(" + idx1(i) + "," + idx1(j) + ") across factions must be <= 0");
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                if (i == j && j == k) continue;
                const double v = b({i, j, k});
                const bool fj = in_first_faction(fb, j), fk = in_first_faction(fb, k), fi = in_first_faction(fb, i);
                if (fj != fk)
                    require(v == 0.0, "two-faction B" + idx3(i, j, k) + " mixes the factions and must be 0");
                else if (fj == fi)
                    require(v >= 0.0, "two-faction B" + idx3(i, j, k) + " within a faction must be >= 0");
                else
                    require(v <= 0.0, "two-faction B" + idx3(i, j, k) + " from the other faction must be <= 0");
            }
    require(is_irreducible(CubicalTensor::from_matrix(a)), "two-faction A must be irreducible");
}

}  // namespace

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::general: return "general";
        case Scenario::cooperative: return "cooperative";
        case Scenario::two_faction: return "two_faction";
        case Scenario::competitive: return "competitive";
    }
    return "general";
}

Scenario scenario_from_string(const std::string& s) {
    if (s == "general") return Scenario::general;
    if (s == "cooperative") return Scenario::cooperative;
    if (s == "two_faction") return Scenario::two_faction;
    if (s == "competitive") return Scenario::competitive;
    throw InputError("unknown scenario '" + s + "'");
}

LVModel::LVModel(Vector r, Matrix a, CubicalTensor b, Scenario scenario, std::optional<FactionBlocks> blocks)
    : r_(std::move(r)), a_(std::move(a)), b_(std::move(b)), scenario_(scenario), blocks_(blocks) {
    const int n = dim();
    require(n >= 1, "model needs at least one species");
    require(a_.rows() == n && a_.cols() == n, "A must be " + std::to_string(n) + "x" + std::to_string(n));
    require(b_.order() == 3 && b_.dim() == n, "B must be an order-3 tensor of dimension " + std::to_string(n));
    for (int i = 0; i < n; ++i) require(r_(i) > 0.0 && std::isfinite(r_(i)), "r(" + idx1(i) + ") must be positive");
    require(a_.allFinite(), "A entries must be finite");
    for (int i = 0; i < n; ++i) {
        require(a_(i, i) <= 0.0, "A(" + idx1(i) + "," + idx1(i) + ") must be <= 0 (intra-specific competition)");
        require(b_.diagonal(i) <= 0.0, "B" + idx3(i, i, i) + " must be <= 0 (intra-specific competition)");
    }
    if (scenario_ == Scenario::two_faction) {
        require(blocks_.has_value(), "two_faction scenario needs faction blocks");
    } else {
        require(!blocks_.has_value(), "faction blocks are only meaningful for the two_faction scenario");
    }
    switch (scenario_) {
        case Scenario::general: break;
        case Scenario::cooperative: {
            const CubicalTensor at = CubicalTensor::from_matrix(a_);
            require(is_metzler(at), "cooperative A must be Metzler (off-diagonal >= 0)");
            require(is_irreducible(at), "cooperative A must be irreducible");
            require(is_metzler(b_), "cooperative B must be Metzler (off-diagonal >= 0)");
            break;
        }
        case Scenario::two_faction: validate_two_faction(a_, b_, *blocks_); break;
        case Scenario::competitive: {
            require((a_.array() <= 0.0).all(), "competitive A must be entrywise <= 0");
            for (int i = 0; i < n; ++i) require(a_(i, i) < 0.0, "competitive A(" + idx1(i) + "," + idx1(i) + ") must be < 0");
            for (double v : b_.entries()) require(v <= 0.0, "competitive B must be entrywise <= 0");
            break;
        }
    }
}

Vector LVModel::growth(const Vector& x) const {
    if (x.size() != dim()) throw InputError("state length does not match the model dimension");
    return Vector::Ones(dim()) + a_ * x + tvp(b_, x);
}

Vector LVModel::rhs(const Vector& x) const { return r_.cwiseProduct(x).cwiseProduct(growth(x)); }

Matrix LVModel::jacobian(const Vector& x) const {
    const Vector l = growth(x);
    Matrix j = (r_.cwiseProduct(x)).asDiagonal() * (a_ + tvp_jacobian(b_, x));
    j.diagonal() += r_.cwiseProduct(l);
    return j;
}

LVModel LVModel::with_scaled_hoi(double eps) const {
    return LVModel(r_, a_, b_ * eps, scenario_, blocks_);
}

}  // namespace holv
