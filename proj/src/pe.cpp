#include "robustsos/pe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace robustsos {

PseudoExpectation::PseudoExpectation(int num_vars, int degree, double tau)
    : num_vars_(num_vars), degree_(degree), tau_(tau) {
    if (degree < 2 || degree % 2 != 0)
        throw InvalidInput("PseudoExpectation: degree must be even and >= 2");
    index_ = std::make_shared<MonomialIndex>(num_vars, degree);
    moments_.assign(static_cast<std::size_t>(index_->size()), 0.0);
}

PseudoExpectation PseudoExpectation::dirac(int num_vars, int degree, const Vec& point,
                                           double tau) {
    if (static_cast<int>(point.size()) != num_vars)
        throw InvalidInput("dirac: point dimension mismatch");
    PseudoExpectation pe(num_vars, degree, tau);
    for (std::int64_t i = 0; i < pe.index_->size(); ++i) {
        const auto& exp = pe.index_->exponents(i);
        double v = 1.0;
        for (int j = 0; j < num_vars; ++j)
            for (int t = 0; t < exp[j]; ++t) v *= point[j];
        pe.moments_[i] = v;
    }
    return pe;
}

PseudoExpectation PseudoExpectation::mixture(
    const std::vector<std::pair<double, PseudoExpectation>>& parts) {
    if (parts.empty()) throw InvalidInput("mixture: empty");
    PseudoExpectation out(parts[0].second.num_vars_, parts[0].second.degree_,
                          parts[0].second.tau_);
    double total = 0.0;
    for (const auto& [w, pe] : parts) {
        if (pe.num_vars_ != out.num_vars_ || pe.degree_ != out.degree_)
            throw InvalidInput("mixture: incompatible components");
        if (w < 0.0) throw InvalidInput("mixture: negative weight");
        total += w;
        for (std::size_t i = 0; i < out.moments_.size(); ++i)
            out.moments_[i] += w * pe.moments_[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
        for (double& m : out.moments_) m /= total;
    return out;
}

double PseudoExpectation::apply(const Poly& p) const {
    if (p.degree() > degree_) throw DegreeExceeded("pe_apply: polynomial degree above k");
    double s = 0.0;
    for (const auto& [m, c] : p.terms()) s += c * moments_[index_->index_of(m)];
    return s;
}

double pe_apply(const PseudoExpectation& pe, const Poly& p) { return pe.apply(p); }

SymMat PseudoExpectation::moment_matrix(int half_degree) const {
    if (2 * half_degree > degree_)
        throw DegreeExceeded("moment_matrix: needs 2*half_degree <= k");
    const std::int64_t dim = index_->prefix_size(half_degree);
    SymMat m(static_cast<int>(dim));
    std::vector<int> sum(num_vars_);
    for (std::int64_t a = 0; a < dim; ++a) {
        const auto& ea = index_->exponents(a);
        for (std::int64_t b = a; b < dim; ++b) {
            const auto& eb = index_->exponents(b);
            for (int v = 0; v < num_vars_; ++v) sum[v] = ea[v] + eb[v];
            m.at(static_cast<int>(a), static_cast<int>(b)) = moments_[index_->index_of(sum)];
        }
    }
    return m;
}

void PseudoExpectation::write(std::ostream& os) const {
    char buf[64];
    for (std::size_t i = 0; i < moments_.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu %.17g\n", i, moments_[i]);
        os << buf;
    }
}

PseudoExpectation PseudoExpectation::read(std::istream& is, int num_vars, int degree,
                                          double tau) {
    PseudoExpectation pe(num_vars, degree, tau);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::size_t idx;
        double val;
        if (!(ss >> idx >> val)) throw InvalidInput("pe read: bad line");
        if (idx >= pe.moments_.size()) throw InvalidInput("pe read: index out of range");
        pe.moments_[idx] = val;
    }
    return pe;
}

PolyMatrix::PolyMatrix(int dim) : dim_(dim) {
    if (dim < 1) throw InvalidInput("PolyMatrix: dim must be >= 1");
    entries_.assign(static_cast<std::size_t>(dim) * (dim + 1) / 2, Poly{});
}

Poly& PolyMatrix::at(int i, int j) {
    if (i > j) std::swap(i, j);
    return entries_[static_cast<std::size_t>(i) * (2 * dim_ - i - 1) / 2 + j];
}

const Poly& PolyMatrix::at(int i, int j) const {
    if (i > j) std::swap(i, j);
    return entries_[static_cast<std::size_t>(i) * (2 * dim_ - i - 1) / 2 + j];
}

void SosProgram::add_inequality(const Poly& g) {
    const int budget = (degree - g.degree()) / 2;
    if (budget < 0) throw DegreeExceeded("add_inequality: constraint degree above k");
    MonomialIndex mi(num_vars, budget);
    const int dim = static_cast<int>(mi.size());
    PolyMatrix h(dim);
    for (int a = 0; a < dim; ++a) {
        Monomial ma;
        const auto& ea = mi.exponents(a);
        for (int v = 0; v < num_vars; ++v)
            if (ea[v] > 0) ma.emplace_back(v, ea[v]);
        for (int b = a; b < dim; ++b) {
            Monomial mb;
            const auto& eb = mi.exponents(b);
            for (int v = 0; v < num_vars; ++v)
                if (eb[v] > 0) mb.emplace_back(v, eb[v]);
            h.at(a, b) = poly_mul(Poly::term(1.0, mono_mul(ma, mb)), g);
        }
    }
    psd_blocks.push_back(std::move(h));
}

void SosProgram::validate() const {
    if (degree < 2 || degree % 2 != 0) throw InvalidInput("SosProgram: degree must be even >= 2");
    for (const auto& g : equalities)
        if (g.degree() > degree) throw DegreeExceeded("equality degree above k");
    for (const auto& h : psd_blocks)
        for (int i = 0; i < h.dim(); ++i)
            for (int j = i; j < h.dim(); ++j)
                if (h.at(i, j).degree() > degree)
                    throw DegreeExceeded("psd block degree above k");
}

SdpProblem build_moment_system(const SosProgram& prog, int psd_dim_cap) {
    prog.validate();
    const int m = prog.num_vars;
    const int k = prog.degree;

    std::int64_t total_dim = basis_size(m, k / 2);
    for (const auto& h : prog.psd_blocks) total_dim += h.dim();
    if (total_dim > psd_dim_cap)
        throw CapacityExceeded("build_moment_system: total PSD dimension " +
                               std::to_string(total_dim) + " above cap " +
                               std::to_string(psd_dim_cap));

    MonomialIndex full(m, k);
    SdpProblem prob;
    prob.num_unknowns = static_cast<int>(full.size());

    LinearRow norm_row;
    norm_row.coeffs.emplace_back(0, 1.0);
    norm_row.rhs = 1.0;
    prob.rows.push_back(std::move(norm_row));

    for (const auto& g : prog.equalities) {
        const int budget = k - g.degree();
        MonomialIndex mult(m, budget);
        for (std::int64_t t = 0; t < mult.size(); ++t) {
            Monomial gamma;
            const auto& exp = mult.exponents(t);
            for (int v = 0; v < m; ++v)
                if (exp[v] > 0) gamma.emplace_back(v, exp[v]);
            Poly row_poly = poly_mul(Poly::term(1.0, gamma), g);
            LinearRow row;
            for (const auto& [mono, c] : row_poly.terms())
                row.coeffs.emplace_back(static_cast<int>(full.index_of(mono)), c);
            std::sort(row.coeffs.begin(), row.coeffs.end());
            row.rhs = 0.0;
            prob.rows.push_back(std::move(row));
        }
    }

    // degree-k moment matrix block
    const int mm_dim = static_cast<int>(full.prefix_size(k / 2));
    AffineBlock mm(mm_dim);
    std::vector<int> sum(m);
    for (int a = 0; a < mm_dim; ++a) {
        const auto& ea = full.exponents(a);
        for (int b = a; b < mm_dim; ++b) {
            const auto& eb = full.exponents(b);
            for (int v = 0; v < m; ++v) sum[v] = ea[v] + eb[v];
            mm.add_term(a, b, static_cast<int>(full.index_of(sum)), 1.0);
        }
    }
    prob.blocks.push_back(std::move(mm));

    for (const auto& h : prog.psd_blocks) {
        AffineBlock block(h.dim());
        for (int i = 0; i < h.dim(); ++i)
            for (int j = i; j < h.dim(); ++j)
                for (const auto& [mono, c] : h.at(i, j).terms())
                    block.add_term(i, j, static_cast<int>(full.index_of(mono)), c);
        prob.blocks.push_back(std::move(block));
    }
    return prob;
}

ViolationReport check_pe(const PseudoExpectation& pe, const SosProgram& prog) {
    prog.validate();
    if (pe.num_vars() != prog.num_vars || pe.degree() < prog.degree)
        throw InvalidInput("check_pe: pe incompatible with program");

    ViolationReport rep;
    rep.normalization_error = std::abs(pe.moments()[0] - 1.0);

    const int m = prog.num_vars;
    for (const auto& g : prog.equalities) {
        const int budget = prog.degree - g.degree();
        MonomialIndex mult(m, budget);
        for (std::int64_t t = 0; t < mult.size(); ++t) {
            Monomial gamma;
            const auto& exp = mult.exponents(t);
            for (int v = 0; v < m; ++v)
                if (exp[v] > 0) gamma.emplace_back(v, exp[v]);
            const double val = pe.apply(poly_mul(Poly::term(1.0, gamma), g));
            rep.max_equality_violation = std::max(rep.max_equality_violation, std::abs(val));
        }
    }

    rep.min_moment_eig = min_eigenvalue(pe.moment_matrix(prog.degree / 2));

    for (const auto& h : prog.psd_blocks) {
        SymMat hm(h.dim());
        for (int i = 0; i < h.dim(); ++i)
            for (int j = i; j < h.dim(); ++j) hm.at(i, j) = pe.apply(h.at(i, j));
        rep.min_block_eigs.push_back(min_eigenvalue(hm));
    }

    const double tau = pe.tau();
    rep.passes = rep.normalization_error <= tau && rep.max_equality_violation <= tau &&
                 rep.min_moment_eig >= -tau;
    for (double e : rep.min_block_eigs)
        if (e < -tau) rep.passes = false;
    return rep;
}

SolvedPe solve_program(const SosProgram& prog, const SolverOptions& opts, int psd_dim_cap) {
    SdpProblem prob = build_moment_system(prog, psd_dim_cap);
    SdpSolution sol = solve_feasibility(prob, opts);
    PseudoExpectation pe(prog.num_vars, prog.degree, 10.0 * opts.tol);
    pe.moments() = sol.unknowns;
    ViolationReport rep = check_pe(pe, prog);
    return SolvedPe{std::move(pe), std::move(sol), std::move(rep)};
}

}  // namespace robustsos
