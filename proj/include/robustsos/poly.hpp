#ifndef ROBUSTSOS_POLY_HPP
#define ROBUSTSOS_POLY_HPP

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "robustsos/errors.hpp"
#include "robustsos/linalg.hpp"

namespace robustsos {

// Sparse exponent list: sorted (variable, power) pairs, power >= 1.
using Monomial = std::vector<std::pair<int, int>>;

int mono_degree(const Monomial& m);
Monomial mono_mul(const Monomial& a, const Monomial& b);
double mono_eval(const Monomial& m, const Vec& point);

// C(m+k, k), guarded against overflow.
std::int64_t basis_size(int m, int k);

// Bijection between exponent vectors of total degree <= k over m variables
// and dense indices 0..B-1 in graded lexicographic order: lower total degree
// first, ties broken lexicographically with earlier variables dominating.
// Index 0 is the constant monomial and degree-<=j monomials form a prefix.
class MonomialIndex {
public:
    MonomialIndex(int num_vars, int max_degree);

    int num_vars() const { return m_; }
    int max_degree() const { return k_; }
    std::int64_t size() const { return static_cast<std::int64_t>(exps_.size()); }

    const std::vector<int>& exponents(std::int64_t index) const { return exps_[index]; }
    std::int64_t index_of(const std::vector<int>& exp) const;
    std::int64_t index_of(const Monomial& mono) const;

    // Number of monomials with total degree <= j (a prefix length).
    std::int64_t prefix_size(int j) const;

private:
    int m_, k_;
    std::vector<std::vector<int>> exps_;
    std::map<std::vector<int>, std::int64_t> lookup_;
};

// Sparse multivariate polynomial over real coefficients. Zero coefficients
// are never stored.
class Poly {
public:
    Poly() = default;
    explicit Poly(double c);
    static Poly variable(int v);
    static Poly term(double c, const Monomial& m);

    int degree() const;
    bool is_zero() const { return terms_.empty(); }
    std::size_t num_terms() const { return terms_.size(); }

    double coeff(const Monomial& m) const;
    const std::map<Monomial, double>& terms() const { return terms_; }

    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(double s);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, double s) { return a *= s; }
    friend Poly operator*(double s, Poly a) { return a *= s; }
    friend Poly operator*(const Poly& a, const Poly& b) { return poly_mul(a, b); }

    void add_term(double c, const Monomial& m);

    // l2 norm of the coefficient vector.
    double coeff_norm() const;

    friend Poly poly_mul(const Poly& p, const Poly& q);
    friend double poly_eval(const Poly& p, const Vec& point);

private:
    std::map<Monomial, double> terms_;
};

Poly poly_mul(const Poly& p, const Poly& q);
double poly_eval(const Poly& p, const Vec& point);

}  // namespace robustsos

#endif
