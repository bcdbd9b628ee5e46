#include "robustsos/poly.hpp"

#include <algorithm>
#include <cmath>

namespace robustsos {

int mono_degree(const Monomial& m) {
    int d = 0;
    for (const auto& [v, p] : m) d += p;
    return d;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first == b[j].first) {
            out.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i;
            ++j;
        } else if (a[i].first < b[j].first) {
            out.push_back(a[i++]);
        } else {
            out.push_back(b[j++]);
        }
    }
    while (i < a.size()) out.push_back(a[i++]);
    while (j < b.size()) out.push_back(b[j++]);
    return out;
}

double mono_eval(const Monomial& m, const Vec& point) {
    double s = 1.0;
    for (const auto& [v, p] : m) {
        if (v < 0 || v >= static_cast<int>(point.size()))
            throw InvalidInput("mono_eval: variable out of range");
        double base = point[v];
        for (int t = 0; t < p; ++t) s *= base;
    }
    return s;
}

std::int64_t basis_size(int m, int k) {
    if (m < 0 || k < 0) throw InvalidInput("basis_size: m, k must be >= 0");
    // C(m+k, k) computed incrementally; guard each step against overflow.
    const std::int64_t limit = std::int64_t(1) << 62;
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        if (r > limit / (m + i)) throw CapacityExceeded("basis_size overflow");
        r = r * (m + i) / i;  // exact: r*(m+i) divisible by i at each step
    }
    return r;
}

namespace {

void enumerate_degree(int m, int deg, std::vector<int>& cur, int pos,
                      std::vector<std::vector<int>>& out) {
    if (pos == m - 1) {
        cur[pos] = deg;
        out.push_back(cur);
        return;
    }
    for (int e = deg; e >= 0; --e) {
        cur[pos] = e;
        enumerate_degree(m, deg - e, cur, pos + 1, out);
    }
    cur[pos] = 0;
}

}  // namespace

MonomialIndex::MonomialIndex(int num_vars, int max_degree) : m_(num_vars), k_(max_degree) {
    if (m_ < 1) throw InvalidInput("MonomialIndex: need >= 1 variable");
    if (k_ < 0) throw InvalidInput("MonomialIndex: negative degree");
    std::int64_t total = basis_size(m_, k_);
    if (total > (std::int64_t(1) << 31))
        throw CapacityExceeded("MonomialIndex: basis too large to enumerate");
    exps_.reserve(static_cast<std::size_t>(total));
    std::vector<int> cur(m_, 0);
    for (int deg = 0; deg <= k_; ++deg) enumerate_degree(m_, deg, cur, 0, exps_);
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(exps_.size()); ++i)
        lookup_[exps_[i]] = i;
}

std::int64_t MonomialIndex::index_of(const std::vector<int>& exp) const {
    auto it = lookup_.find(exp);
    if (it == lookup_.end()) throw InvalidInput("MonomialIndex: exponent out of range");
    return it->second;
}

std::int64_t MonomialIndex::index_of(const Monomial& mono) const {
    std::vector<int> exp(m_, 0);
    for (const auto& [v, p] : mono) {
        if (v < 0 || v >= m_) throw InvalidInput("MonomialIndex: variable out of range");
        exp[v] = p;
    }
    return index_of(exp);
}

std::int64_t MonomialIndex::prefix_size(int j) const {
    if (j < 0) return 0;
    return basis_size(m_, std::min(j, k_));
}

Poly::Poly(double c) {
    if (c != 0.0) terms_[Monomial{}] = c;
}

Poly Poly::variable(int v) {
    Poly p;
    p.terms_[Monomial{{v, 1}}] = 1.0;
    return p;
}

Poly Poly::term(double c, const Monomial& m) {
    Poly p;
    if (c != 0.0) p.terms_[m] = c;
    return p;
}

int Poly::degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, mono_degree(m));
    return d;
}

double Poly::coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
}

void Poly::add_term(double c, const Monomial& m) {
    if (c == 0.0) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

Poly& Poly::operator+=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(c, m);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(-c, m);
    return *this;
}

Poly& Poly::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
}

double Poly::coeff_norm() const {
    double s = 0.0;
    for (const auto& [m, c] : terms_) s += c * c;
    return std::sqrt(s);
}

Poly poly_mul(const Poly& p, const Poly& q) {
    Poly out;
    for (const auto& [mp, cp] : p.terms_)
        for (const auto& [mq, cq] : q.terms_) out.add_term(cp * cq, mono_mul(mp, mq));
    return out;
}

double poly_eval(const Poly& p, const Vec& point) {
    double s = 0.0;
    for (const auto& [m, c] : p.terms_) s += c * mono_eval(m, point);
    return s;
}

}  // namespace robustsos
