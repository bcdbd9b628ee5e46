#include "robustsos/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>

namespace robustsos {

AffineBlock::AffineBlock(int dim) : dim_(dim) {
    if (dim < 1) throw InvalidInput("AffineBlock: dim must be >= 1");
    const std::size_t packed = static_cast<std::size_t>(dim) * (dim + 1) / 2;
    constants_.assign(packed, 0.0);
    terms_.assign(packed, {});
}

namespace {
inline std::size_t packed_idx(int dim, int i, int j) {
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(i) * (2 * dim - i - 1) / 2 + j;
}
}  // namespace

void AffineBlock::add_constant(int i, int j, double c) {
    constants_[packed_idx(dim_, i, j)] += c;
}

void AffineBlock::add_term(int i, int j, int unknown, double coeff) {
    if (coeff == 0.0) return;
    terms_[packed_idx(dim_, i, j)].emplace_back(unknown, coeff);
}

void AffineBlock::freeze() {
    if (frozen_) return;
    for (auto& entry : terms_) {
        std::sort(entry.begin(), entry.end());
        std::vector<std::pair<int, double>> merged;
        for (const auto& [u, c] : entry) {
            if (!merged.empty() && merged.back().first == u)
                merged.back().second += c;
            else
                merged.emplace_back(u, c);
        }
        merged.erase(std::remove_if(merged.begin(), merged.end(),
                                    [](const auto& t) { return t.second == 0.0; }),
                     merged.end());
        entry = std::move(merged);
    }
    frozen_ = true;
}

SymMat AffineBlock::evaluate(const Vec& u) const {
    SymMat m(dim_);
    std::size_t p = 0;
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j, ++p) {
            double s = constants_[p];
            for (const auto& [idx, c] : terms_[p]) s += c * u[idx];
            m.at(i, j) = s;
        }
    return m;
}

void AffineBlock::accumulate_transpose(const SymMat& m, Vec& y) const {
    std::size_t p = 0;
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j, ++p) {
            const double w = (i == j) ? 1.0 : 2.0;
            const double v = w * m(i, j);
            if (v == 0.0) continue;
            for (const auto& [idx, c] : terms_[p]) y[idx] += c * v;
        }
}

void AffineBlock::accumulate_gram(
    Vec& diag, std::vector<std::pair<std::pair<int, int>, double>>& off) const {
    std::size_t p = 0;
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j, ++p) {
            const double w = (i == j) ? 1.0 : 2.0;
            const auto& entry = terms_[p];
            for (std::size_t a = 0; a < entry.size(); ++a) {
                diag[entry[a].first] += w * entry[a].second * entry[a].second;
                for (std::size_t b = a + 1; b < entry.size(); ++b)
                    off.push_back({{entry[a].first, entry[b].first},
                                   w * entry[a].second * entry[b].second});
            }
        }
}

void SdpProblem::validate() const {
    for (const auto& row : rows) {
        if (!std::isfinite(row.rhs)) throw InvalidInput("row rhs not finite");
        for (const auto& [u, c] : row.coeffs) {
            if (u < 0 || u >= num_unknowns) throw InvalidInput("row index out of range");
            if (!std::isfinite(c)) throw InvalidInput("row coefficient not finite");
        }
    }
    for (const auto& b : blocks)
        for (double c : b.constants())
            if (!std::isfinite(c)) throw InvalidInput("block constant not finite");
}

std::size_t SdpProblem::total_psd_dim() const {
    std::size_t s = 0;
    for (const auto& b : blocks) s += static_cast<std::size_t>(b.dim());
    return s;
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Solved: return "solved";
        case SolveStatus::MaxIters: return "max-iters";
        case SolveStatus::InfeasibleHeuristic: return "infeasible-heuristic";
    }
    return "?";
}

namespace {

// SPD Gram of all block maps. Unknowns couple only through multi-term block
// entries, so the coupling graph splits into tiny components; each one gets
// a dense inverse, the rest stays diagonal.
class BlockGram {
public:
    struct Component {
        std::vector<int> members;
        Vec inverse;  // dense s x s
    };

    BlockGram(int n, const Vec& diag,
              const std::vector<std::pair<std::pair<int, int>, double>>& off)
        : n_(n) {
        std::vector<int> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int u) {
            while (parent[u] != u) {
                parent[u] = parent[parent[u]];
                u = parent[u];
            }
            return u;
        };
        for (const auto& [pr, v] : off) {
            int a = find(pr.first), b = find(pr.second);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }

        comp_of_.assign(n, -1);
        inv_diag_.assign(n, 0.0);
        std::map<int, std::vector<int>> groups;
        for (int u = 0; u < n; ++u) groups[find(u)].push_back(u);
        std::vector<int> slot(n, 0);
        for (auto& [root, members] : groups) {
            if (members.size() == 1) {
                const int u = members[0];
                inv_diag_[u] = 1.0 / (diag[u] > 0.0 ? diag[u] : 1.0);
                continue;
            }
            const int s = static_cast<int>(members.size());
            if (s > 4096) throw CapacityExceeded("gram component too large");
            Component comp;
            comp.members = members;
            comp.inverse.assign(static_cast<std::size_t>(s) * s, 0.0);
            for (int a = 0; a < s; ++a) {
                comp_of_[members[a]] = static_cast<int>(comps_.size());
                slot[members[a]] = a;
                comp.inverse[a * s + a] = diag[members[a]] > 0.0 ? diag[members[a]] : 1.0;
            }
            comps_.push_back(std::move(comp));
        }
        for (const auto& [pr, v] : off) {
            const int c = comp_of_[pr.first];
            Component& comp = comps_[c];
            const int s = static_cast<int>(comp.members.size());
            const int a = slot[pr.first], b = slot[pr.second];
            comp.inverse[a * s + b] += v;
            comp.inverse[b * s + a] += v;
        }
        for (auto& comp : comps_) invert_spd(comp.inverse, static_cast<int>(comp.members.size()));
    }

    void apply_inverse(Vec& x) const {
        for (int u = 0; u < n_; ++u)
            if (comp_of_[u] < 0) x[u] *= inv_diag_[u];
        Vec scratch;
        for (const auto& comp : comps_) {
            const int s = static_cast<int>(comp.members.size());
            scratch.assign(s, 0.0);
            for (int a = 0; a < s; ++a) scratch[a] = x[comp.members[a]];
            for (int a = 0; a < s; ++a) {
                double acc = 0.0;
                for (int b = 0; b < s; ++b) acc += comp.inverse[a * s + b] * scratch[b];
                x[comp.members[a]] = acc;
            }
        }
    }

    double inv_diag(int u) const { return comp_of_[u] < 0 ? inv_diag_[u] : 0.0; }
    int component_of(int u) const { return comp_of_[u]; }
    const std::vector<Component>& components() const { return comps_; }

private:
    static void invert_spd(Vec& m, int s) {
        // Cholesky factor then invert in place (sizes are tiny).
        Vec l = m;
        for (int i = 0; i < s; ++i) {
            for (int j = 0; j <= i; ++j) {
                double sum = l[i * s + j];
                for (int k = 0; k < j; ++k) sum -= l[i * s + k] * l[j * s + k];
                if (i == j) {
                    if (sum <= 0.0) sum = 1e-12;
                    l[i * s + i] = std::sqrt(sum);
                } else {
                    l[i * s + j] = sum / l[j * s + j];
                }
            }
        }
        Vec col(s);
        for (int c = 0; c < s; ++c) {
            col.assign(s, 0.0);
            col[c] = 1.0;
            for (int i = 0; i < s; ++i) {
                double sum = col[i];
                for (int k = 0; k < i; ++k) sum -= l[i * s + k] * col[k];
                col[i] = sum / l[i * s + i];
            }
            for (int i = s - 1; i >= 0; --i) {
                double sum = col[i];
                for (int k = i + 1; k < s; ++k) sum -= l[k * s + i] * col[k];
                col[i] = sum / l[i * s + i];
            }
            for (int i = 0; i < s; ++i) m[i * s + c] = col[i];
        }
    }

    int n_;
    std::vector<int> comp_of_;
    Vec inv_diag_;
    std::vector<Component> comps_;
};

// Pseudo-inverse of the projected row Gram A G^{-1} A^T via eigendecomposition;
// tolerates linearly dependent rows.
class RowProjector {
public:
    RowProjector(const std::vector<LinearRow>& rows, const BlockGram& gram, int n)
        : rows_(rows) {
        const int r = static_cast<int>(rows.size());
        if (r == 0) return;
        if (r > 12000) throw CapacityExceeded("too many equality rows");

        std::vector<std::vector<std::pair<int, double>>> by_unknown(n);
        for (int i = 0; i < r; ++i)
            for (const auto& [u, c] : rows[i].coeffs) by_unknown[u].emplace_back(i, c);

        SymMat b(r);
        // diagonal part of G^{-1}
        for (int u = 0; u < n; ++u) {
            const double g = gram.inv_diag(u);
            if (g == 0.0 || by_unknown[u].empty()) continue;
            const auto& col = by_unknown[u];
            for (std::size_t a = 0; a < col.size(); ++a)
                for (std::size_t c = a; c < col.size(); ++c)
                    b.at(col[a].first, col[c].first) += g * col[a].second * col[c].second;
        }
        // Coupled components: iterate ordered member pairs. Contributions to
        // entry (i,j), i<j arise once from ordered (a,c) and once transposed
        // from (c,a); adding only i<j keeps each exactly once, and diagonal
        // entries get two symmetric halves, hence the 0.5 factor.
        for (const auto& comp : gram.components()) {
            const int s = static_cast<int>(comp.members.size());
            for (int a = 0; a < s; ++a) {
                const auto& cola = by_unknown[comp.members[a]];
                if (cola.empty()) continue;
                for (int c = 0; c < s; ++c) {
                    const double g = comp.inverse[a * s + c];
                    if (g == 0.0) continue;
                    const auto& colc = by_unknown[comp.members[c]];
                    for (const auto& [i, ci] : cola)
                        for (const auto& [j, cj] : colc) {
                            if (i < j)
                                b.at(i, j) += g * ci * cj;
                            else if (i == j)
                                b.at(i, j) += 0.5 * g * ci * cj;
                        }
                }
            }
        }

        eig_ = sym_eig(b);
        const double lam_max = std::max(1e-300, std::abs(eig_.eigenvalues.front()));
        inv_eigs_.resize(r);
        for (int k = 0; k < r; ++k) {
            const double lam = eig_.eigenvalues[k];
            inv_eigs_[k] = (lam > 1e-12 * lam_max) ? 1.0 / lam : 0.0;
        }
    }

    Vec pinv_apply(const Vec& v) const {
        const int r = static_cast<int>(rows_.size());
        Vec out(r, 0.0);
        for (int k = 0; k < r; ++k) {
            if (inv_eigs_[k] == 0.0) continue;
            const double s = inv_eigs_[k] * dot(eig_.eigenvectors[k], v);
            for (int i = 0; i < r; ++i) out[i] += s * eig_.eigenvectors[k][i];
        }
        return out;
    }

    Vec apply_rows(const Vec& u) const {
        Vec out(rows_.size(), 0.0);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            double s = 0.0;
            for (const auto& [idx, c] : rows_[i].coeffs) s += c * u[idx];
            out[i] = s;
        }
        return out;
    }

    void add_rows_transpose(const Vec& lambda, Vec& y) const {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const double l = lambda[i];
            if (l == 0.0) continue;
            for (const auto& [idx, c] : rows_[i].coeffs) y[idx] += c * l;
        }
    }

private:
    const std::vector<LinearRow>& rows_;
    EigDecomp eig_;
    Vec inv_eigs_;
};

}  // namespace

SdpSolution solve_feasibility(const SdpProblem& prob_in, const SolverOptions& opts) {
    prob_in.validate();
    const int n = prob_in.num_unknowns;

    // Equilibrate: substitute u = S * u_tilde using caller-provided scales.
    SdpProblem prob = prob_in;
    const bool scaled = !prob_in.scales.empty();
    if (scaled) {
        if (static_cast<int>(prob_in.scales.size()) != n)
            throw InvalidInput("scales size mismatch");
        for (auto& row : prob.rows)
            for (auto& [u, c] : row.coeffs) c *= prob_in.scales[u];
        for (auto& block : prob.blocks)
            for (auto& entry : block.terms_)
                for (auto& [u, c] : entry) c *= prob_in.scales[u];
    }
    for (auto& block : prob.blocks) block.freeze();
    // Unit infinity-norm rows so tolerances mean the same thing across
    // row families.
    for (auto& row : prob.rows) {
        double mx = 0.0;
        for (const auto& [u, c] : row.coeffs) mx = std::max(mx, std::abs(c));
        if (mx > 0.0) {
            for (auto& [u, c] : row.coeffs) c /= mx;
            row.rhs /= mx;
        }
    }

    Vec gdiag(n, 0.0);
    std::vector<std::pair<std::pair<int, int>, double>> goff;
    for (const auto& block : prob.blocks) block.accumulate_gram(gdiag, goff);
    BlockGram gram(n, gdiag, goff);
    RowProjector proj(prob.rows, gram, n);

    const int r = static_cast<int>(prob.rows.size());
    Vec b(r);
    for (int i = 0; i < r; ++i) b[i] = prob.rows[i].rhs;

    auto project_affine = [&](const Vec& g) {
        Vec ug = g;
        gram.apply_inverse(ug);
        if (r == 0) return ug;
        Vec res = proj.apply_rows(ug);
        for (int i = 0; i < r; ++i) res[i] -= b[i];
        Vec lambda = proj.pinv_apply(res);
        Vec at(n, 0.0);
        proj.add_rows_transpose(lambda, at);
        gram.apply_inverse(at);
        for (int i = 0; i < n; ++i) ug[i] -= at[i];
        return ug;
    };

    SdpSolution sol;
    sol.unknowns.assign(n, 0.0);

    auto unscale_into = [&](const Vec& u) {
        if (scaled)
            for (int i = 0; i < n; ++i) sol.unknowns[i] = u[i] * prob_in.scales[i];
        else
            sol.unknowns = u;
    };

    // Initial iterate: minimum-norm solution of the rows; inconsistent rows
    // bail out immediately.
    Vec u = project_affine(Vec(n, 0.0));
    if (r > 0) {
        Vec res = proj.apply_rows(u);
        double worst = 0.0;
        for (int i = 0; i < r; ++i) worst = std::max(worst, std::abs(res[i] - b[i]));
        if (worst > std::max(opts.tol, 1e-7)) {
            sol.status = SolveStatus::InfeasibleHeuristic;
            sol.primal_residual = worst;
            unscale_into(u);
            return sol;
        }
    }

    const std::size_t nblocks = prob.blocks.size();
    std::vector<SymMat> z(nblocks), dual(nblocks);
    for (std::size_t k = 0; k < nblocks; ++k) {
        z[k] = psd_project(prob.blocks[k].evaluate(u));
        dual[k] = SymMat(prob.blocks[k].dim());
    }

    if (nblocks == 0) {
        sol.status = SolveStatus::Solved;
        sol.iterations = 0;
        unscale_into(u);
        return sol;
    }

    std::ofstream trace;
    if (!opts.trace_path.empty()) {
        trace.open(opts.trace_path);
        trace << "# schema=robustsos.sdptrace.v1\niteration,primal_residual,dual_residual\n";
    }

    double rho = 1.0;
    double window_best = 1e300, prev_window_best = 1e300;
    char tbuf[96];

    for (int iter = 1; iter <= opts.max_iters; ++iter) {
        // (a) affine projection
        Vec g(n, 0.0);
        for (std::size_t k = 0; k < nblocks; ++k) {
            SymMat target = z[k];
            target -= dual[k];
            std::size_t p = 0;
            for (int i = 0; i < prob.blocks[k].dim(); ++i)
                for (int j = i; j < prob.blocks[k].dim(); ++j, ++p)
                    target.at(i, j) -= prob.blocks[k].constants()[p];
            prob.blocks[k].accumulate_transpose(target, g);
        }
        u = project_affine(g);

        // (b) per-block PSD projection, (c) dual ascent on the consensus gap
        double gap2 = 0.0, dual2 = 0.0, scale_ref = 1.0;
        Vec dz_pullback(n, 0.0);
        for (std::size_t k = 0; k < nblocks; ++k) {
            SymMat bu = prob.blocks[k].evaluate(u);
            SymMat v = bu;
            v += dual[k];
            SymMat znew = psd_project(v);
            SymMat dz = znew;
            dz -= z[k];
            prob.blocks[k].accumulate_transpose(dz, dz_pullback);
            z[k] = std::move(znew);
            SymMat gap = bu;
            gap -= z[k];
            dual[k] += gap;
            gap2 += gap.inner(gap);
            scale_ref = std::max({scale_ref, bu.frob_norm(), z[k].frob_norm()});
        }
        dual2 = dot(dz_pullback, dz_pullback);

        const double rp = std::sqrt(gap2) / scale_ref;
        const double rd = rho * std::sqrt(dual2) / (1.0 + norm2(u));
        sol.primal_residual = rp;
        sol.dual_residual = rd;
        sol.iterations = iter;

        if (trace.is_open()) {
            std::snprintf(tbuf, sizeof(tbuf), "%d,%.9e,%.9e\n", iter, rp, rd);
            trace << tbuf;
        }

        if (rp <= opts.tol && rd <= opts.tol) {
            sol.status = SolveStatus::Solved;
            break;
        }

        window_best = std::min(window_best, rp);
        if (iter % 1000 == 0) {
            const bool stagnant = window_best >= 0.99 * prev_window_best;
            if (stagnant && rp >= 100.0 * opts.tol) {
                sol.status = SolveStatus::InfeasibleHeuristic;
                break;
            }
            prev_window_best = window_best;
            window_best = 1e300;
        }

        if (iter % 100 == 0) {
            if (rp > 10.0 * rd) {
                rho *= 2.0;
                for (auto& d : dual) d *= 0.5;
            } else if (rd > 10.0 * rp) {
                rho *= 0.5;
                for (auto& d : dual) d *= 2.0;
            }
        }
    }

    unscale_into(u);
    return sol;
}

SdpCheck verify_solution(const SdpProblem& prob, const Vec& unknowns) {
    SdpCheck check;
    for (const auto& row : prob.rows) {
        double s = -row.rhs, mx = 0.0;
        for (const auto& [u, c] : row.coeffs) {
            s += c * unknowns[u];
            mx = std::max(mx, std::abs(c));
        }
        if (mx > 0.0) s /= mx;
        check.max_row_violation = std::max(check.max_row_violation, std::abs(s));
    }
    bool first = true;
    for (const auto& block_in : prob.blocks) {
        AffineBlock block = block_in;
        block.freeze();
        const double me = min_eigenvalue(block.evaluate(unknowns));
        check.min_block_eig = first ? me : std::min(check.min_block_eig, me);
        first = false;
    }
    return check;
}

std::optional<GramCertificate> solve_sos_cert(const Poly& target, int num_vars,
                                              int basis_degree, const SolverOptions& opts) {
    const int deg = target.degree();
    if (deg > 2 * basis_degree) throw DegreeExceeded("solve_sos_cert: target degree too high");

    bool homogeneous = true;
    for (const auto& [m, c] : target.terms())
        if (mono_degree(m) != deg) homogeneous = false;

    std::vector<Monomial> basis;
    MonomialIndex mi(num_vars, basis_degree);
    for (std::int64_t i = 0; i < mi.size(); ++i) {
        const auto& exp = mi.exponents(i);
        int total = 0;
        Monomial mono;
        for (int v = 0; v < num_vars; ++v) {
            total += exp[v];
            if (exp[v] > 0) mono.emplace_back(v, exp[v]);
        }
        if (homogeneous && deg % 2 == 0 && total != deg / 2) continue;
        basis.push_back(std::move(mono));
    }
    const int bd = static_cast<int>(basis.size());

    std::map<Monomial, LinearRow> rows;
    auto unknown_of = [bd](int a, int b) {
        if (a > b) std::swap(a, b);
        return a * (2 * bd - a - 1) / 2 + b;
    };
    for (int a = 0; a < bd; ++a)
        for (int bq = a; bq < bd; ++bq) {
            Monomial prod = mono_mul(basis[a], basis[bq]);
            rows[prod].coeffs.emplace_back(unknown_of(a, bq), a == bq ? 1.0 : 2.0);
        }
    for (const auto& [m, c] : target.terms()) {
        auto it = rows.find(m);
        if (it == rows.end()) return std::nullopt;  // monomial not expressible
        it->second.rhs = c;
    }

    SdpProblem prob;
    prob.num_unknowns = bd * (bd + 1) / 2;
    for (auto& [m, row] : rows) {
        std::sort(row.coeffs.begin(), row.coeffs.end());
        prob.rows.push_back(std::move(row));
    }
    AffineBlock block(bd);
    for (int a = 0; a < bd; ++a)
        for (int bq = a; bq < bd; ++bq) block.add_term(a, bq, unknown_of(a, bq), 1.0);
    prob.blocks.push_back(std::move(block));

    SdpSolution sol = solve_feasibility(prob, opts);
    if (sol.status != SolveStatus::Solved) return std::nullopt;

    GramCertificate cert;
    cert.basis = basis;
    cert.gram = SymMat(bd);
    for (int a = 0; a < bd; ++a)
        for (int bq = a; bq < bd; ++bq) cert.gram.at(a, bq) = sol.unknowns[unknown_of(a, bq)];
    return cert;
}

}  // namespace robustsos
