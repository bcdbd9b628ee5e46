#ifndef ROBUSTSOS_PE_HPP
#define ROBUSTSOS_PE_HPP

#include <iosfwd>
#include <memory>
#include <vector>

#include "robustsos/poly.hpp"
#include "robustsos/sdp.hpp"

namespace robustsos {

inline constexpr double kDefaultTau = 1e-6;

// Linear functional on polynomials of degree <= k, stored as a dense moment
// vector in graded-lex order. moments[0] is the mass (1 when normalized);
// the moment matrix M[a,b] = moments[a+b] over half-degree monomials must be
// PSD up to tau.
class PseudoExpectation {
public:
    PseudoExpectation(int num_vars, int degree, double tau = kDefaultTau);

    static PseudoExpectation dirac(int num_vars, int degree, const Vec& point,
                                   double tau = kDefaultTau);
    static PseudoExpectation mixture(const std::vector<std::pair<double, PseudoExpectation>>& parts);

    int num_vars() const { return num_vars_; }
    int degree() const { return degree_; }
    double tau() const { return tau_; }

    const MonomialIndex& index() const { return *index_; }
    Vec& moments() { return moments_; }
    const Vec& moments() const { return moments_; }

    double apply(const Poly& p) const;  // throws DegreeExceeded past k

    // Moment matrix over monomials of degree <= half_degree (<= k/2).
    SymMat moment_matrix(int half_degree) const;

    void write(std::ostream& os) const;  // one "index value" pair per line
    static PseudoExpectation read(std::istream& is, int num_vars, int degree,
                                  double tau = kDefaultTau);

private:
    int num_vars_, degree_;
    double tau_;
    std::shared_ptr<const MonomialIndex> index_;
    Vec moments_;
};

double pe_apply(const PseudoExpectation& pe, const Poly& p);

// Symmetric matrix with polynomial entries (packed upper triangle).
class PolyMatrix {
public:
    PolyMatrix() = default;
    explicit PolyMatrix(int dim);
    int dim() const { return dim_; }
    Poly& at(int i, int j);
    const Poly& at(int i, int j) const;

private:
    int dim_ = 0;
    std::vector<Poly> entries_;
};

// Equality constraints plus matrix-valued PSD constraints over a fixed
// variable catalog, with a total degree budget k for multiplier generation.
struct SosProgram {
    int num_vars = 0;
    int degree = 2;  // k, even
    std::vector<Poly> equalities;      // g = 0, localized with monomials up to k - deg g
    std::vector<PolyMatrix> psd_blocks;  // E~[H] >= 0

    // Encodes {g >= 0} as the scalar localizing matrix H[a,b] = x^{a+b} g
    // over monomials of degree <= (k - deg g)/2.
    void add_inequality(const Poly& g);

    void validate() const;
};

inline constexpr int kDefaultPsdDimCap = 2000;

// Vanilla dense moment relaxation: one PSD block for the degree-k moment
// matrix, one normalization row, localizing rows E~[x^gamma g] = 0 for every
// monomial within budget, and one PSD block per matrix constraint. All
// blocks share the single moment-vector unknown.
SdpProblem build_moment_system(const SosProgram& prog, int psd_dim_cap = kDefaultPsdDimCap);

struct ViolationReport {
    double normalization_error = 0.0;
    double max_equality_violation = 0.0;
    double min_moment_eig = 0.0;
    std::vector<double> min_block_eigs;
    bool passes = false;
};

ViolationReport check_pe(const PseudoExpectation& pe, const SosProgram& prog);

// Convenience: solve the dense relaxation and wrap the moment vector. The
// returned pseudo-expectation is re-verified with check_pe at 10*tol.
struct SolvedPe {
    PseudoExpectation pe;
    SdpSolution solution;
    ViolationReport report;
};
SolvedPe solve_program(const SosProgram& prog, const SolverOptions& opts,
                       int psd_dim_cap = kDefaultPsdDimCap);

}  // namespace robustsos

#endif
