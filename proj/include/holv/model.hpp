#pragma once

#include "holv/tensor.hpp"

#include <optional>
#include <string>

namespace holv {

enum class Scenario { general, cooperative, two_faction, competitive };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

// Sizes of the two factions; indices [0, m) form the first, [m, m+n) the second.
struct FactionBlocks {
    int m = 0;
    int n = 0;
};

// dx/dt = r o x o (1 + A x + B x^2), with every sign stored in A and B.
class LVModel {
public:
    // Validates the scenario's sign pattern; throws InputError naming the
    // first violated condition.
    LVModel(Vector r, Matrix a, CubicalTensor b, Scenario scenario = Scenario::general,
            std::optional<FactionBlocks> blocks = std::nullopt);

    const Vector& r() const { return r_; }
    const Matrix& a() const { return a_; }
    const CubicalTensor& b() const { return b_; }
    Scenario scenario() const { return scenario_; }
    const std::optional<FactionBlocks>& blocks() const { return blocks_; }
    int dim() const { return static_cast<int>(r_.size()); }

    // Per-capita growth factor L(x) = 1 + A x + B x^2.
    Vector growth(const Vector& x) const;
    Vector rhs(const Vector& x) const;
    // J = diag(r o L(x)) + diag(r o x) (A + d/dx (B x^2)).
    Matrix jacobian(const Vector& x) const;

    // Same model with B replaced by eps * B (perturbation family).
    LVModel with_scaled_hoi(double eps) const;

private:
    Vector r_;
    Matrix a_;
    CubicalTensor b_;
    Scenario scenario_;
    std::optional<FactionBlocks> blocks_;
};

// First faction of index i under blocks (true for the x-species).
inline bool in_first_faction(const FactionBlocks& fb, int i) { return i < fb.m; }

}  // namespace holv
