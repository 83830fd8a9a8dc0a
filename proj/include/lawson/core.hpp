#pragma once

// Shared basic types for the cone-foliation library.

#include <cmath>
#include <stdexcept>
#include <string>

namespace lawson {

// Cone over S^k x S^l sitting in R^{k+l+2}, k,l >= 1.
struct ConeParams {
    int k = 1;
    int l = 1;

    ConeParams() = default;
    ConeParams(int k_, int l_) : k(k_), l(l_) {
        if (k < 1 || l < 1) {
            throw std::invalid_argument("ConeParams: k and l must be >= 1");
        }
    }

    // ambient dimension of the enclosing Euclidean space
    int ambient_dim() const { return k + l + 2; }
    ConeParams swapped() const { return ConeParams(l, k); }
};

inline double sq(double x) { return x * x; }

inline int sgn(double x) { return (x > 0) - (x < 0); }

// Error thrown when a construction's mathematical preconditions fail
// (incompatible exponents, mismatched jets, degenerate convexity, ...).
class construction_error : public std::runtime_error {
  public:
    explicit construction_error(const std::string& what) : std::runtime_error(what) {}
};

// Error thrown when a solve diverges, leaves its trapping region, or a
// fixed-point iteration fails to contract.
class solve_error : public std::runtime_error {
  public:
    explicit solve_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lawson
