#ifndef ROBUSTSOS_DATA_HPP
#define ROBUSTSOS_DATA_HPP

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "robustsos/linalg.hpp"

namespace robustsos {

// Standard normal draws via mt19937_64 + Box-Muller. The engine is
// bit-exact across platforms, unlike std::normal_distribution, so seeded
// runs reproduce everywhere.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}
    double next();
    double uniform();                  // [0, 1)
    std::uint64_t next_index(std::uint64_t bound);  // [0, bound)

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct GaussianModel {
    Vec mu;
    SymMat sigma;

    int dim() const { return static_cast<int>(mu.size()); }
};

enum class Adversary {
    MeanShift,      // add a fixed offset of norm `strength` to chosen points
    FarCluster,     // all outliers collapse to one distant point
    CovInflation,   // outliers rescaled about the sample mean by `strength`
    SignFlip,       // outliers mirrored about the sample mean
    AdaptiveWorst,  // outliers along the top eigenvector of the clean covariance
};

Adversary adversary_from_string(const std::string& name);
std::string adversary_name(Adversary a);

struct AdversarySpec {
    Adversary kind = Adversary::FarCluster;
    // Interpreted per adversary: offset norm (MeanShift, default 10),
    // radius (FarCluster/AdaptiveWorst, default 10*sqrt(d)), scale factor
    // (CovInflation, default 10). <= 0 means "use the default".
    double strength = 0.0;
};

struct ContaminatedSample {
    std::vector<Vec> clean;
    std::vector<Vec> observed;
    std::vector<bool> mask;  // mask[i] == (observed[i] == clean[i])
    double eps = 0.0;

    int n() const { return static_cast<int>(observed.size()); }
    int dim() const { return observed.empty() ? 0 : static_cast<int>(observed[0].size()); }
    int num_corrupted() const;
};

struct EmpiricalMoments {
    Vec mu0;
    SymMat sigma0;
};

struct EstimationErrors {
    double mean_err = 0.0;      // ||Sigma^{-1/2}(mu_hat - mu)||_2
    double spec_err = 0.0;      // ||Sigma^{-1/2} Sigma_hat Sigma^{-1/2} - I||_2
    double frob_err = 0.0;      // ||Sigma^{-1/2} Sigma_hat Sigma^{-1/2} - I||_F
    double tv_surrogate = 0.0;  // min(1, mean_err + frob_err); upper-bound proxy only
};

std::vector<Vec> sample_gaussian(const GaussianModel& model, int n, std::uint64_t seed);

// Replaces exactly floor(eps*n) points. Replaced indices come from the
// seeded generator, except AdaptiveWorst which picks the points with the
// largest projection on the top eigenvector of the clean covariance.
ContaminatedSample contaminate(const std::vector<Vec>& clean, double eps,
                               const AdversarySpec& adversary, std::uint64_t seed);

// Population (1/n) normalization throughout.
EmpiricalMoments empirical_moments(const std::vector<Vec>& points);

EstimationErrors error_report(const GaussianModel& model, const Vec& mu_hat,
                              const SymMat& sigma_hat,
                              double floor = kDefaultEigFloor);

Vec coordinatewise_median(const std::vector<Vec>& points);

void write_sample_csv(std::ostream& os, const ContaminatedSample& s,
                      const std::string& adversary, std::uint64_t seed);
ContaminatedSample read_sample_csv(std::istream& is);

}  // namespace robustsos

#endif
