#include "robustsos/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace robustsos {

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

SymMat::SymMat(int dim) : dim_(dim) {
    if (dim < 1) throw InvalidInput("SymMat dimension must be >= 1");
    a_.assign(static_cast<std::size_t>(dim) * (dim + 1) / 2, 0.0);
}

std::size_t SymMat::idx(int i, int j) const {
    if (i > j) std::swap(i, j);
    // row-major upper triangle offset for row i
    return static_cast<std::size_t>(i) * (2 * dim_ - i - 1) / 2 + j;
}

double& SymMat::at(int i, int j) { return a_[idx(i, j)]; }
double SymMat::at(int i, int j) const { return a_[idx(i, j)]; }

SymMat SymMat::identity(int dim) {
    SymMat m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
}

SymMat SymMat::diag(const Vec& d) {
    SymMat m(static_cast<int>(d.size()));
    for (int i = 0; i < m.dim_; ++i) m.at(i, i) = d[i];
    return m;
}

SymMat SymMat::from_full(int dim, const Vec& full) {
    if (static_cast<int>(full.size()) != dim * dim)
        throw InvalidInput("from_full size mismatch");
    SymMat m(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j)
            m.at(i, j) = 0.5 * (full[i * dim + j] + full[j * dim + i]);
    return m;
}

SymMat SymMat::outer(const Vec& v) {
    SymMat m(static_cast<int>(v.size()));
    for (int i = 0; i < m.dim_; ++i)
        for (int j = i; j < m.dim_; ++j) m.at(i, j) = v[i] * v[j];
    return m;
}

SymMat& SymMat::operator+=(const SymMat& o) {
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

SymMat& SymMat::operator-=(const SymMat& o) {
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

SymMat& SymMat::operator*=(double s) {
    for (double& x : a_) x *= s;
    return *this;
}

Vec SymMat::mul(const Vec& x) const {
    Vec y(dim_, 0.0);
    for (int i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (int j = 0; j < dim_; ++j) s += at(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double SymMat::quad(const Vec& x) const { return dot(x, mul(x)); }

double SymMat::inner(const SymMat& o) const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
        s += at(i, i) * o.at(i, i);
        for (int j = i + 1; j < dim_; ++j) s += 2.0 * at(i, j) * o.at(i, j);
    }
    return s;
}

double SymMat::frob_norm() const { return std::sqrt(std::max(0.0, inner(*this))); }

double SymMat::trace() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += at(i, i);
    return s;
}

bool SymMat::finite() const {
    for (double x : a_)
        if (!std::isfinite(x)) return false;
    return true;
}

SymMat EigDecomp::reconstruct() const {
    const int d = static_cast<int>(eigenvalues.size());
    SymMat m(d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += eigenvalues[k] * eigenvectors[k][i] * eigenvectors[k][j];
            m.at(i, j) = s;
        }
    return m;
}

double EigDecomp::reconstruction_error(const SymMat& a) const {
    SymMat r = reconstruct();
    r -= a;
    return r.frob_norm();
}

double EigDecomp::orthonormality_error() const {
    const int d = static_cast<int>(eigenvalues.size());
    double worst = 0.0;
    for (int p = 0; p < d; ++p)
        for (int q = p; q < d; ++q) {
            double s = dot(eigenvectors[p], eigenvectors[q]) - (p == q ? 1.0 : 0.0);
            worst = std::max(worst, std::abs(s));
        }
    return worst;
}

namespace {

void sort_and_normalize(EigDecomp& e) {
    const int d = static_cast<int>(e.eigenvalues.size());
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int p, int q) {
        return e.eigenvalues[p] > e.eigenvalues[q];
    });
    EigDecomp out;
    out.eigenvalues.resize(d);
    out.eigenvectors.resize(d);
    for (int k = 0; k < d; ++k) {
        out.eigenvalues[k] = e.eigenvalues[order[k]];
        Vec v = e.eigenvectors[order[k]];
        int lead = 0;
        while (lead < d - 1 && std::abs(v[lead]) <= 1e-12) ++lead;
        if (v[lead] < 0.0)
            for (double& x : v) x = -x;
        out.eigenvectors[k] = std::move(v);
    }
    e = std::move(out);
}

}  // namespace

EigDecomp sym_eig_jacobi(const SymMat& a) {
    if (!a.finite()) throw InvalidInput("sym_eig: non-finite entries");
    const int d = a.dim();
    std::vector<Vec> m(d, Vec(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m[i][j] = a(i, j);
    std::vector<Vec> q(d, Vec(d, 0.0));
    for (int i = 0; i < d; ++i) q[i][i] = 1.0;

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) off += m[i][j] * m[i][j];
        double scale = 0.0;
        for (int i = 0; i < d; ++i) scale += m[i][i] * m[i][i];
        if (off <= 1e-30 * (1.0 + scale)) break;

        for (int p = 0; p < d - 1; ++p) {
            for (int r = p + 1; r < d; ++r) {
                const double apq = m[p][r];
                if (apq == 0.0) continue;
                const double app = m[p][p], aqq = m[r][r];
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < d; ++k) {
                    const double mkp = m[k][p], mkq = m[k][r];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][r] = s * mkp + c * mkq;
                }
                for (int k = 0; k < d; ++k) {
                    const double mpk = m[p][k], mqk = m[r][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[r][k] = s * mpk + c * mqk;
                }
                for (int k = 0; k < d; ++k) {
                    const double qkp = q[k][p], qkq = q[k][r];
                    q[k][p] = c * qkp - s * qkq;
                    q[k][r] = s * qkp + c * qkq;
                }
            }
        }
    }

    EigDecomp e;
    e.eigenvalues.resize(d);
    e.eigenvectors.assign(d, Vec(d));
    for (int k = 0; k < d; ++k) {
        e.eigenvalues[k] = m[k][k];
        for (int i = 0; i < d; ++i) e.eigenvectors[k][i] = q[i][k];
    }
    sort_and_normalize(e);
    return e;
}

namespace {

// Householder reduction to tridiagonal form with accumulated transform
// (EISPACK tred2 layout), followed by implicit-shift QL (tql2).
void tred2(std::vector<Vec>& z, Vec& d, Vec& e) {
    const int n = static_cast<int>(d.size());
    for (int i = n - 1; i > 0; --i) {
        const int l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::abs(z[i][k]);
            if (scale == 0.0) {
                e[i] = z[i][l];
            } else {
                for (int k = 0; k <= l; ++k) {
                    z[i][k] /= scale;
                    h += z[i][k] * z[i][k];
                }
                double f = z[i][l];
                double g = (f >= 0.0 ? -std::sqrt(h) : std::sqrt(h));
                e[i] = scale * g;
                h -= f * g;
                z[i][l] = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    z[j][i] = z[i][j] / h;
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += z[j][k] * z[i][k];
                    for (int k = j + 1; k <= l; ++k) g += z[k][j] * z[i][k];
                    e[j] = g / h;
                    f += e[j] * z[i][j];
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = z[i][j];
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k) z[j][k] -= (f * e[k] + g * z[i][k]);
                }
            }
        } else {
            e[i] = z[i][l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (int i = 0; i < n; ++i) {
        const int l = i - 1;
        if (d[i] != 0.0) {
            for (int j = 0; j <= l; ++j) {
                double g = 0.0;
                for (int k = 0; k <= l; ++k) g += z[i][k] * z[k][j];
                for (int k = 0; k <= l; ++k) z[k][j] -= g * z[k][i];
            }
        }
        d[i] = z[i][i];
        z[i][i] = 1.0;
        for (int j = 0; j <= l; ++j) z[j][i] = z[i][j] = 0.0;
    }
}

void tql2(std::vector<Vec>& z, Vec& d, Vec& e) {
    const int n = static_cast<int>(d.size());
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-300 || std::abs(e[m]) <= 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (iter++ == 64) throw Error("tql2: too many iterations");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = z[k][i + 1];
                        z[k][i + 1] = s * z[k][i] + c * f;
                        z[k][i] = c * z[k][i] - s * f;
                    }
                }
                if (r == 0.0 && m - 1 >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

EigDecomp sym_eig_tridiag(const SymMat& a) {
    if (!a.finite()) throw InvalidInput("sym_eig: non-finite entries");
    const int n = a.dim();
    std::vector<Vec> z(n, Vec(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) z[i][j] = a(i, j);
    Vec d(n, 0.0), e(n, 0.0);
    tred2(z, d, e);
    tql2(z, d, e);
    EigDecomp out;
    out.eigenvalues = d;
    out.eigenvectors.assign(n, Vec(n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) out.eigenvectors[k][i] = z[i][k];
    sort_and_normalize(out);
    return out;
}

EigDecomp sym_eig(const SymMat& a) {
    return a.dim() <= kJacobiMaxDim ? sym_eig_jacobi(a) : sym_eig_tridiag(a);
}

SymMat psd_project(const SymMat& a) {
    EigDecomp e = sym_eig(a);
    const int d = a.dim();
    SymMat out(d);
    for (int k = 0; k < d; ++k) {
        const double lam = e.eigenvalues[k];
        if (lam <= 0.0) continue;
        const Vec& v = e.eigenvectors[k];
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) out.at(i, j) += lam * v[i] * v[j];
    }
    return out;
}

SymMat mat_pow(const SymMat& a, double p, double floor) {
    EigDecomp e = sym_eig(a);
    const int d = a.dim();
    SymMat out(d);
    for (int k = 0; k < d; ++k) {
        double lam = e.eigenvalues[k];
        double f;
        if (p == 0.5) {
            f = std::sqrt(std::max(lam, 0.0));
        } else if (p == -0.5 || p == -1.0) {
            if (lam < floor)
                throw SingularMatrix("mat_pow: eigenvalue below floor for negative power");
            f = (p == -1.0) ? 1.0 / lam : 1.0 / std::sqrt(lam);
        } else {
            throw InvalidInput("mat_pow: power must be 1/2, -1/2 or -1");
        }
        if (f == 0.0) continue;
        const Vec& v = e.eigenvectors[k];
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) out.at(i, j) += f * v[i] * v[j];
    }
    return out;
}

double mahalanobis(const Vec& v, const SymMat& sigma, double floor) {
    if (static_cast<int>(v.size()) != sigma.dim())
        throw InvalidInput("mahalanobis: dimension mismatch");
    SymMat root = mat_pow(sigma, -0.5, floor);
    return norm2(root.mul(v));
}

SymMat whiten(const SymMat& a, const SymMat& b, double floor) {
    if (a.dim() != b.dim()) throw InvalidInput("whiten: dimension mismatch");
    SymMat r = mat_pow(b, -0.5, floor);
    const int d = a.dim();
    // r * a * r
    std::vector<Vec> ra(d, Vec(d, 0.0));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += r(i, k) * a(k, j);
            ra[i][j] = s;
        }
    SymMat out(d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += ra[i][k] * r(k, j);
            out.at(i, j) = s;
        }
    return out;
}

double rel_frobenius(const SymMat& a, const SymMat& b, double floor) {
    SymMat w = whiten(a, b, floor);
    w -= SymMat::identity(a.dim());
    return w.frob_norm();
}

double rel_spectral(const SymMat& a, const SymMat& b, double floor) {
    SymMat w = whiten(a, b, floor);
    w -= SymMat::identity(a.dim());
    return operator_norm(w);
}

double operator_norm(const SymMat& a) {
    EigDecomp e = sym_eig(a);
    double hi = std::abs(e.eigenvalues.front());
    double lo = std::abs(e.eigenvalues.back());
    return std::max(hi, lo);
}

double min_eigenvalue(const SymMat& a) { return sym_eig(a).eigenvalues.back(); }

}  // namespace robustsos
