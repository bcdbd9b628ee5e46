#ifndef ROBUSTSOS_SDP_HPP
#define ROBUSTSOS_SDP_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robustsos/linalg.hpp"
#include "robustsos/poly.hpp"

namespace robustsos {

struct LinearRow {
    std::vector<std::pair<int, double>> coeffs;  // (unknown, coefficient)
    double rhs = 0.0;
};

// Symmetric matrix-valued affine map of the unknown vector. Entries are
// stored packed (i <= j); each entry is a constant plus sparse linear terms.
class AffineBlock {
public:
    explicit AffineBlock(int dim);

    int dim() const { return dim_; }
    void add_constant(int i, int j, double c);
    void add_term(int i, int j, int unknown, double coeff);
    void freeze();  // merges duplicate terms; must be called before evaluate

    SymMat evaluate(const Vec& u) const;
    // y += weightedScatter^T(M): accumulates C^T W vec(M) into y, where W
    // carries Frobenius weights (1 diagonal, 2 off-diagonal).
    void accumulate_transpose(const SymMat& m, Vec& y) const;
    // Frobenius-weighted diagonal of C^T W C plus off-diagonal couplings.
    void accumulate_gram(Vec& diag,
                         std::vector<std::pair<std::pair<int, int>, double>>& off) const;

    std::size_t packed_size() const { return constants_.size(); }
    const std::vector<double>& constants() const { return constants_; }

private:
    int dim_;
    std::vector<double> constants_;
    std::vector<std::vector<std::pair<int, double>>> terms_;  // per packed entry
    bool frozen_ = false;
    friend struct SdpProblem;
};

struct SdpProblem {
    int num_unknowns = 0;
    std::vector<LinearRow> rows;
    std::vector<AffineBlock> blocks;
    // Optional per-unknown magnitude hints used to equilibrate the solve;
    // empty means all ones.
    Vec scales;

    void validate() const;
    std::size_t total_psd_dim() const;
};

enum class SolveStatus { Solved, MaxIters, InfeasibleHeuristic };

std::string to_string(SolveStatus s);

struct SdpSolution {
    Vec unknowns;
    SolveStatus status = SolveStatus::MaxIters;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
};

struct SolverOptions {
    double tol = 1e-6;
    int max_iters = 50000;
    std::uint64_t seed = 0;  // reserved for perturbation strategies; unused paths stay deterministic
    std::string trace_path;  // per-iteration residual CSV when non-empty
};

// Operator-splitting feasibility solver: alternating projection onto the
// equality-row affine subspace (cached factorization) and the PSD cone per
// block, with dual ascent on the consensus gap. Deterministic for fixed
// inputs.
SdpSolution solve_feasibility(const SdpProblem& prob, const SolverOptions& opts);

// Independent re-verification of a solution against the problem data:
// max row violation and min eigenvalue over blocks.
struct SdpCheck {
    double max_row_violation = 0.0;
    double min_block_eig = 0.0;
};
SdpCheck verify_solution(const SdpProblem& prob, const Vec& unknowns);

struct GramCertificate {
    std::vector<Monomial> basis;  // monomial vector z(v)
    SymMat gram;                  // z(v)^T G z(v) == target, G PSD
};

// Searches for a PSD Gram matrix representing `target` as a sum of squares
// over monomials of degree <= basis_degree (exactly basis_degree when the
// target is homogeneous). Returns nothing when the solver reports the
// coefficient-matching system infeasible.
std::optional<GramCertificate> solve_sos_cert(const Poly& target, int num_vars,
                                              int basis_degree,
                                              const SolverOptions& opts = {});

}  // namespace robustsos

#endif
