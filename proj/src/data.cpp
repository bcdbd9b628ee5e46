#include "robustsos/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace robustsos {

double GaussianRng::uniform() {
    // 53-bit mantissa in [0, 1)
    return (engine_() >> 11) * (1.0 / 9007199254740992.0);
}

double GaussianRng::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t GaussianRng::next_index(std::uint64_t bound) {
    // rejection sampling for an unbiased index
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % bound;
}

Adversary adversary_from_string(const std::string& name) {
    if (name == "mean-shift") return Adversary::MeanShift;
    if (name == "far-cluster") return Adversary::FarCluster;
    if (name == "cov-inflation") return Adversary::CovInflation;
    if (name == "sign-flip") return Adversary::SignFlip;
    if (name == "adaptive-worst") return Adversary::AdaptiveWorst;
    throw InvalidInput("unknown adversary: " + name);
}

std::string adversary_name(Adversary a) {
    switch (a) {
        case Adversary::MeanShift: return "mean-shift";
        case Adversary::FarCluster: return "far-cluster";
        case Adversary::CovInflation: return "cov-inflation";
        case Adversary::SignFlip: return "sign-flip";
        case Adversary::AdaptiveWorst: return "adaptive-worst";
    }
    return "?";
}

int ContaminatedSample::num_corrupted() const {
    int c = 0;
    for (bool m : mask)
        if (!m) ++c;
    return c;
}

std::vector<Vec> sample_gaussian(const GaussianModel& model, int n, std::uint64_t seed) {
    if (n < 1) throw InvalidInput("sample_gaussian: n must be >= 1");
    const int d = model.dim();
    if (model.sigma.dim() != d) throw InvalidInput("sample_gaussian: mu/sigma dim mismatch");
    SymMat root = mat_pow(model.sigma, 0.5);
    GaussianRng rng(seed);
    std::vector<Vec> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        Vec z(d);
        for (int j = 0; j < d; ++j) z[j] = rng.next();
        Vec x = root.mul(z);
        for (int j = 0; j < d; ++j) x[j] += model.mu[j];
        out.push_back(std::move(x));
    }
    return out;
}

namespace {

std::vector<int> pick_corrupted(int n, int m, GaussianRng& rng) {
    // Fisher-Yates prefix of a seeded permutation.
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < m; ++i) {
        const int j = i + static_cast<int>(rng.next_index(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace

ContaminatedSample contaminate(const std::vector<Vec>& clean, double eps,
                               const AdversarySpec& adversary, std::uint64_t seed) {
    const int n = static_cast<int>(clean.size());
    if (n < 1) throw InvalidInput("contaminate: empty sample");
    const int d = static_cast<int>(clean[0].size());
    if (eps < 0.0 || eps * n > n / 2.0) throw InvalidInput("contaminate: eps out of range");

    ContaminatedSample out;
    out.clean = clean;
    out.observed = clean;
    out.mask.assign(n, true);
    out.eps = eps;

    const int m = static_cast<int>(std::floor(eps * n));
    if (m == 0) return out;

    GaussianRng rng(seed ^ 0x9e3779b97f4a7c15ull);
    EmpiricalMoments mom = empirical_moments(clean);
    const double sqrt_d = std::sqrt(static_cast<double>(d));

    std::vector<int> idx;
    if (adversary.kind == Adversary::AdaptiveWorst) {
        EigDecomp e = sym_eig(mom.sigma0);
        const Vec& top = e.eigenvectors.front();
        std::vector<std::pair<double, int>> proj(n);
        for (int i = 0; i < n; ++i) {
            Vec c = clean[i];
            for (int j = 0; j < d; ++j) c[j] -= mom.mu0[j];
            proj[i] = {dot(c, top), i};
        }
        std::sort(proj.begin(), proj.end(),
                  [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second < b.second;
                  });
        for (int i = 0; i < m; ++i) idx.push_back(proj[i].second);
        std::sort(idx.begin(), idx.end());
    } else {
        idx = pick_corrupted(n, m, rng);
    }

    switch (adversary.kind) {
        case Adversary::MeanShift: {
            const double norm = adversary.strength > 0.0 ? adversary.strength : 10.0;
            for (int i : idx) {
                for (int j = 0; j < d; ++j) out.observed[i][j] += norm / sqrt_d;
                out.mask[i] = false;
            }
            break;
        }
        case Adversary::FarCluster: {
            const double radius = adversary.strength > 0.0 ? adversary.strength : 10.0 * sqrt_d;
            Vec target(d);
            for (int j = 0; j < d; ++j) target[j] = mom.mu0[j] + radius / sqrt_d;
            for (int i : idx) {
                out.observed[i] = target;
                out.mask[i] = false;
            }
            break;
        }
        case Adversary::CovInflation: {
            const double scale = adversary.strength > 0.0 ? adversary.strength : 10.0;
            for (int i : idx) {
                for (int j = 0; j < d; ++j)
                    out.observed[i][j] = mom.mu0[j] + scale * (clean[i][j] - mom.mu0[j]);
                out.mask[i] = false;
            }
            break;
        }
        case Adversary::SignFlip: {
            for (int i : idx) {
                for (int j = 0; j < d; ++j)
                    out.observed[i][j] = 2.0 * mom.mu0[j] - clean[i][j];
                out.mask[i] = false;
            }
            break;
        }
        case Adversary::AdaptiveWorst: {
            const double radius = adversary.strength > 0.0 ? adversary.strength : 10.0 * sqrt_d;
            EigDecomp e = sym_eig(mom.sigma0);
            const Vec& top = e.eigenvectors.front();
            for (int i : idx) {
                for (int j = 0; j < d; ++j) out.observed[i][j] = mom.mu0[j] + radius * top[j];
                out.mask[i] = false;
            }
            break;
        }
    }
    return out;
}

EmpiricalMoments empirical_moments(const std::vector<Vec>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 2) throw InvalidInput("empirical_moments: need n >= 2");
    const int d = static_cast<int>(points[0].size());
    EmpiricalMoments mom;
    mom.mu0.assign(d, 0.0);
    for (const Vec& x : points)
        for (int j = 0; j < d; ++j) mom.mu0[j] += x[j];
    for (int j = 0; j < d; ++j) mom.mu0[j] /= n;
    mom.sigma0 = SymMat(d);
    for (const Vec& x : points) {
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j)
                mom.sigma0.at(i, j) += (x[i] - mom.mu0[i]) * (x[j] - mom.mu0[j]);
    }
    mom.sigma0 *= 1.0 / n;
    return mom;
}

EstimationErrors error_report(const GaussianModel& model, const Vec& mu_hat,
                              const SymMat& sigma_hat, double floor) {
    EstimationErrors e;
    Vec diff = mu_hat;
    for (int j = 0; j < model.dim(); ++j) diff[j] -= model.mu[j];
    e.mean_err = mahalanobis(diff, model.sigma, floor);
    e.spec_err = rel_spectral(sigma_hat, model.sigma, floor);
    e.frob_err = rel_frobenius(sigma_hat, model.sigma, floor);
    e.tv_surrogate = std::min(1.0, e.mean_err + e.frob_err);
    return e;
}

Vec coordinatewise_median(const std::vector<Vec>& points) {
    const int n = static_cast<int>(points.size());
    const int d = static_cast<int>(points[0].size());
    Vec out(d);
    Vec col(n);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < n; ++i) col[i] = points[i][j];
        std::sort(col.begin(), col.end());
        out[j] = (n % 2 == 1) ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
    }
    return out;
}

void write_sample_csv(std::ostream& os, const ContaminatedSample& s,
                      const std::string& adversary, std::uint64_t seed) {
    char buf[64];
    os << "# schema=robustsos.sample.v1\n";
    os << "# d=" << s.dim() << " n=" << s.n() << " eps=" << s.eps
       << " adversary=" << adversary << " seed=" << seed << "\n";
    os << "index,mask";
    for (int j = 0; j < s.dim(); ++j) os << ",y" << j;
    for (int j = 0; j < s.dim(); ++j) os << ",x" << j;
    os << "\n";
    for (int i = 0; i < s.n(); ++i) {
        os << i << "," << (s.mask[i] ? 1 : 0);
        for (int j = 0; j < s.dim(); ++j) {
            std::snprintf(buf, sizeof(buf), ",%.17g", s.observed[i][j]);
            os << buf;
        }
        for (int j = 0; j < s.dim(); ++j) {
            std::snprintf(buf, sizeof(buf), ",%.17g", s.clean[i][j]);
            os << buf;
        }
        os << "\n";
    }
}

ContaminatedSample read_sample_csv(std::istream& is) {
    ContaminatedSample out;
    std::string line;
    int d = -1;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto pos = line.find("eps=");
            if (pos != std::string::npos) out.eps = std::stod(line.substr(pos + 4));
            pos = line.find(" d=");
            if (pos != std::string::npos) d = std::stoi(line.substr(pos + 3));
            continue;
        }
        if (line.rfind("index,", 0) == 0) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
        if (d < 0) d = static_cast<int>((cells.size() - 2) / 2);
        if (static_cast<int>(cells.size()) != 2 + 2 * d)
            throw InvalidInput("sample csv: bad row width");
        out.mask.push_back(cells[1] != 0.0);
        out.observed.emplace_back(cells.begin() + 2, cells.begin() + 2 + d);
        out.clean.emplace_back(cells.begin() + 2 + d, cells.end());
    }
    if (out.observed.empty()) throw InvalidInput("sample csv: no rows");
    return out;
}

}  // namespace robustsos
