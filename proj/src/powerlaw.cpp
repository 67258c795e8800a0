#include "revisit/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "revisit/histogram.hpp"

namespace revisit {

namespace {

// Maximize a unimodal function on [lo, hi] by golden-section search.
double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

double nearest_rank_percentile(const std::vector<double>& sorted, double q) {
    const auto n = sorted.size();
    auto idx = static_cast<std::size_t>(std::llround(q / 100.0 * static_cast<double>(n - 1)));
    idx = std::min(idx, n - 1);
    return sorted[idx];
}

// Weighted least squares of log10 density vs log10 bin-center over nonzero bins.
double ls_slope_from_histogram(const LogHistogram& h) {
    double sw = 0.0, sx = 0.0, sy = 0.0;
    std::size_t points = 0;
    for (std::size_t i = 0; i < h.bin_count(); ++i) {
        if (h.count(i) == 0) continue;
        const double w = static_cast<double>(h.count(i));
        sw += w;
        sx += w * std::log10(h.center(i));
        sy += w * std::log10(h.density(i));
        ++points;
    }
    if (points < 2) return std::numeric_limits<double>::quiet_NaN();
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < h.bin_count(); ++i) {
        if (h.count(i) == 0) continue;
        const double w = static_cast<double>(h.count(i));
        const double dx = std::log10(h.center(i)) - mx;
        sxx += w * dx * dx;
        sxy += w * dx * (std::log10(h.density(i)) - my);
    }
    if (sxx == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / sxx;
}

// Truncated exponential on [a, b]: f(x) = r e^(-r(x-a)) / (1 - e^(-r(b-a))).
// Log-likelihood given n, sum of (x - a), and range, at rate r.
double trunc_exp_loglik(double r, std::size_t n, double shifted_sum, double range) {
    const double nn = static_cast<double>(n);
    return nn * std::log(r) - r * shifted_sum - nn * std::log(-std::expm1(-r * range));
}

}  // namespace

double log_norm_constant(double alpha, double x_min, double x_max) {
    const double la = std::log(x_min);
    const double delta = std::log(x_max) - la;
    const double t = 1.0 - alpha;
    // C = t / (x_max^t - x_min^t) = (t / expm1(t*delta)) * x_min^(-t);
    // the first factor tends to 1/delta as t -> 0 (the alpha == 1 case).
    const double g = std::abs(t * delta) < 1e-12 ? 1.0 / delta : t / std::expm1(t * delta);
    return std::log(g) - t * la;
}

double power_law_log_density(double x, double alpha, double x_min, double x_max) {
    return log_norm_constant(alpha, x_min, x_max) - alpha * std::log(x);
}

PowerLawFit fit_power_law(std::span<const double> samples, FitOptions opts) {
    std::vector<double> positive;
    positive.reserve(samples.size());
    for (double x : samples)
        if (x > 0.0 && std::isfinite(x)) positive.push_back(x);
    if (positive.empty()) throw DegenerateFitError("no positive samples to fit");

    if (opts.x_min > 0.0 && opts.x_max > 0.0 && !(opts.x_min < opts.x_max))
        throw ParamError("fit support must satisfy x_min < x_max");

    double a = opts.x_min, b = opts.x_max;
    if (a <= 0.0 || b <= 0.0) {
        std::vector<double> sorted = positive;
        std::sort(sorted.begin(), sorted.end());
        if (a <= 0.0) a = nearest_rank_percentile(sorted, 1.0);
        if (b <= 0.0) b = nearest_rank_percentile(sorted, 99.9);
    }
    if (!(a < b)) throw DegenerateFitError("fit support is empty");
    if (b / a < opts.min_ratio) throw DegenerateFitError("fit support narrower than required ratio");

    std::vector<double> in;
    in.reserve(positive.size());
    for (double x : positive)
        if (x >= a && x <= b) in.push_back(x);
    if (in.size() < opts.min_samples) throw DegenerateFitError("too few samples in fit support");

    const auto [mn, mx] = std::minmax_element(in.begin(), in.end());
    if (*mn == *mx) throw DegenerateFitError("degenerate samples: all equal");

    const double n = static_cast<double>(in.size());
    double sum_log = 0.0, sum_shift = 0.0;
    for (double x : in) {
        sum_log += std::log(x);
        sum_shift += x - a;
    }

    // The truncated power law is a one-parameter exponential family in alpha,
    // so the log-likelihood is concave and golden-section search is exact.
    const auto loglik = [&](double alpha) {
        return n * log_norm_constant(alpha, a, b) - alpha * sum_log;
    };
    const double alpha_hat = golden_max(loglik, -10.0, 25.0, 1e-9);

    PowerLawFit fit;
    fit.alpha = alpha_hat;
    fit.x_min = a;
    fit.x_max = b;
    fit.n_samples = in.size();
    fit.log_likelihood = loglik(alpha_hat);

    HistogramSpec hspec;
    if (opts.base > 1.0) hspec.base = opts.base;
    hspec.x_min = a;
    hspec.x_max = b;
    fit.ls_slope = ls_slope_from_histogram(log_binned_histogram<double>(in, hspec));

    // Competing model on the same support, parametrized by log-rate to keep
    // the search scale-free; likewise unimodal (exponential family).
    const double range = b - a;
    const auto exp_loglik_u = [&](double u) {
        return trunc_exp_loglik(std::exp(u), in.size(), sum_shift, range);
    };
    const double u_hat = golden_max(exp_loglik_u, std::log(1e-12 / range), std::log(1e12 / range), 1e-9);
    fit.exp_rate = std::exp(u_hat);
    fit.exp_log_likelihood = exp_loglik_u(u_hat);
    return fit;
}

PowerLawFit fit_power_law(std::span<const Seconds> samples, FitOptions opts) {
    std::vector<double> xs(samples.begin(), samples.end());
    return fit_power_law(std::span<const double>(xs), opts);
}

}  // namespace revisit
