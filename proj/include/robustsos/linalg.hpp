#ifndef ROBUSTSOS_LINALG_HPP
#define ROBUSTSOS_LINALG_HPP

#include <cstddef>
#include <vector>

#include "robustsos/errors.hpp"

namespace robustsos {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);

// Dense symmetric matrix with packed upper-triangle storage, so the
// symmetry invariant entries[i][j] == entries[j][i] holds exactly by
// construction.
class SymMat {
public:
    SymMat() = default;
    explicit SymMat(int dim);

    static SymMat identity(int dim);
    static SymMat diag(const Vec& d);
    // Builds from a row-major full matrix; off-diagonal pairs are averaged.
    static SymMat from_full(int dim, const Vec& full);
    static SymMat outer(const Vec& v);  // v v^T

    int dim() const { return dim_; }

    double& at(int i, int j);
    double at(int i, int j) const;
    double operator()(int i, int j) const { return at(i, j); }

    SymMat& operator+=(const SymMat& o);
    SymMat& operator-=(const SymMat& o);
    SymMat& operator*=(double s);
    friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
    friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
    friend SymMat operator*(SymMat a, double s) { return a *= s; }
    friend SymMat operator*(double s, SymMat a) { return a *= s; }

    Vec mul(const Vec& x) const;           // A x
    double quad(const Vec& x) const;       // x^T A x
    double inner(const SymMat& o) const;   // <A, B>_F
    double frob_norm() const;
    double trace() const;

    bool finite() const;

    const Vec& packed() const { return a_; }
    Vec& packed() { return a_; }

private:
    int dim_ = 0;
    Vec a_;  // upper triangle, row major: (i, j) with i <= j
    std::size_t idx(int i, int j) const;
};

// Eigendecomposition A = Q diag(lambda) Q^T, eigenvalues sorted descending.
// Each eigenvector is sign-normalized so its first component of magnitude
// > 1e-12 is positive (deterministic tie-breaking).
struct EigDecomp {
    Vec eigenvalues;                    // sorted descending
    std::vector<Vec> eigenvectors;      // eigenvectors[k] pairs with eigenvalues[k]

    SymMat reconstruct() const;
    double reconstruction_error(const SymMat& a) const;  // ||Q L Q^T - A||_F
    double orthonormality_error() const;                 // max |Q^T Q - I|
};

// Cyclic Jacobi rotations; used directly for small matrices and as the
// cross-check oracle for the tridiagonal path.
EigDecomp sym_eig_jacobi(const SymMat& a);
// Householder tridiagonalization + implicit-shift QL; used above
// kJacobiMaxDim because Jacobi sweeps get too slow inside the SDP loop.
EigDecomp sym_eig_tridiag(const SymMat& a);

inline constexpr int kJacobiMaxDim = 48;

EigDecomp sym_eig(const SymMat& a);

// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped to 0).
SymMat psd_project(const SymMat& a);

inline constexpr double kDefaultEigFloor = 1e-12;

// A^p for p in {1/2, -1/2, -1}. A must be PSD; negative powers require all
// eigenvalues >= floor.
SymMat mat_pow(const SymMat& a, double p, double floor = kDefaultEigFloor);

// ||Sigma^{-1/2} v||_2
double mahalanobis(const Vec& v, const SymMat& sigma, double floor = kDefaultEigFloor);

// ||B^{-1/2} A B^{-1/2} - I||_F
double rel_frobenius(const SymMat& a, const SymMat& b, double floor = kDefaultEigFloor);

// ||B^{-1/2} A B^{-1/2} - I||_2
double rel_spectral(const SymMat& a, const SymMat& b, double floor = kDefaultEigFloor);

// Largest |eigenvalue|.
double operator_norm(const SymMat& a);
double min_eigenvalue(const SymMat& a);

// B^{-1/2} A B^{-1/2} as a matrix (shared by the relative norms).
SymMat whiten(const SymMat& a, const SymMat& b, double floor = kDefaultEigFloor);

}  // namespace robustsos

#endif
