#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "revisit/types.hpp"

namespace revisit {

// Which of the two candidate tail models the data prefers.
enum class TailModel { PowerLaw, Exponential };

struct FitOptions {
    // Support bounds; values <= 0 select the empirical 1st / 99.9th
    // percentiles of the positive samples.
    double x_min = 0.0;
    double x_max = 0.0;
    std::size_t min_samples = 100;
    double min_ratio = 10.0;  // required x_max / x_min
    double base = 0.0;        // log-bin base for ls_slope; <= 0 -> default
};

// Truncated power law f(x) = C(alpha) * x^(-alpha) on [x_min, x_max],
// fitted by maximum likelihood, with a least-squares cross-check and a
// truncated-exponential alternative fitted on the same support.
struct PowerLawFit {
    double alpha = 0.0;
    double x_min = 0.0;
    double x_max = 0.0;
    std::size_t n_samples = 0;       // samples inside [x_min, x_max]
    double log_likelihood = 0.0;     // at alpha
    double ls_slope = 0.0;           // slope of log10 density vs log10 x; ~ -alpha
    double exp_rate = 0.0;           // truncated-exponential MLE
    double exp_log_likelihood = 0.0;

    double decades() const { return std::log10(x_max / x_min); }
    double log_likelihood_ratio() const { return log_likelihood - exp_log_likelihood; }
    TailModel preferred() const {
        return log_likelihood_ratio() > 0.0 ? TailModel::PowerLaw : TailModel::Exponential;
    }
};

// log of the normalization constant C(alpha) for the truncated power law;
// continuous through alpha == 1 (the log-uniform case).
double log_norm_constant(double alpha, double x_min, double x_max);

// Truncated power-law log-density at x for given alpha and support.
double power_law_log_density(double x, double alpha, double x_min, double x_max);

PowerLawFit fit_power_law(std::span<const double> samples, FitOptions opts = {});
PowerLawFit fit_power_law(std::span<const Seconds> samples, FitOptions opts = {});

}  // namespace revisit
