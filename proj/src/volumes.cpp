#include "schatten_lab/volumes.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "schatten_lab/metric.hpp"
#include "schatten_lab/parallel.hpp"
#include "schatten_lab/sampling.hpp"

namespace schatten_lab {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
constexpr long kBatchSize = 4096;

struct LinearFit {
    double slope;
    double intercept;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    return LinearFit{slope, my - slope * mx};
}
}  // namespace

double euclidean_ball_log_volume(int dim, double radius) {
    if (dim < 1) throw invalid_input("euclidean_ball_volume: dim must be >= 1");
    if (!(radius > 0.0)) throw invalid_input("euclidean_ball_volume: radius must be > 0");
    return 0.5 * dim * std::log(kPi) + dim * std::log(radius) - std::lgamma(0.5 * dim + 1.0);
}

double euclidean_ball_volume(int dim, double radius) {
    return std::exp(euclidean_ball_log_volume(dim, radius));
}

VolumeEstimate schatten_ball_volume_mc(const BallSpec& spec, long n_samples,
                                       const StreamKey& stream, int threads) {
    const int n = spec.n_dim;
    const int dim = n * n;
    if (spec.p.value() == 2.0) {
        const double value = std::exp(euclidean_ball_log_volume(dim, 1.0) / dim);
        return VolumeEstimate{value, 0.0, 0, VolumeEstimate::Method::exact};
    }
    if (n > kRejectionMaxDim) {
        throw invalid_input("schatten_ball_volume_mc: rejection requires n_dim <= 6");
    }
    if (n_samples < 1) throw invalid_input("schatten_ball_volume_mc: n_samples must be >= 1");

    const double radius = enclosing_frobenius_radius(spec);
    const long n_batches = (n_samples + kBatchSize - 1) / kBatchSize;
    std::vector<long> hits(n_batches, 0);
    parallel_for_batches(n_batches, threads, [&](long b) {
        const long count = std::min(kBatchSize, n_samples - b * kBatchSize);
        RandomStream rng(derive_stream(stream, static_cast<std::uint64_t>(b)));
        long h = 0;
        for (long i = 0; i < count; ++i) {
            const Vec x = uniform_euclidean_ball(dim, radius, rng);
            const Mat a = Eigen::Map<const Mat>(x.data(), n, n);
            if (schatten_norm(a, spec.p) <= 1.0) ++h;
        }
        hits[b] = h;
    });
    const long total_hits = std::accumulate(hits.begin(), hits.end(), 0L);
    if (total_hits == 0) {
        std::ostringstream msg;
        msg << "schatten_ball_volume_mc: zero acceptances out of " << n_samples
            << " proposals; increase n_samples";
        throw degenerate_estimate(msg.str());
    }
    const double rate = static_cast<double>(total_hits) / static_cast<double>(n_samples);
    const double log_vol = std::log(rate) + euclidean_ball_log_volume(dim, radius);
    const double value = std::exp(log_vol / dim);
    const double rate_se = std::sqrt(rate * (1.0 - rate) / static_cast<double>(n_samples));
    const double std_error = value * rate_se / (dim * rate);
    return VolumeEstimate{value, std_error, n_samples, VolumeEstimate::Method::rejection};
}

ScalingFit volume_scaling_fit(const Exponent& p, const std::vector<int>& n_dims, long n_samples,
                              const StreamKey& stream, int threads) {
    if (n_dims.size() < 3) throw invalid_input("volume_scaling_fit: need at least 3 dimensions");
    std::vector<double> xs, ys, values;
    for (std::size_t i = 0; i < n_dims.size(); ++i) {
        const VolumeEstimate est = schatten_ball_volume_mc(
            BallSpec(n_dims[i], p), n_samples, derive_stream(stream, 1000 + i), threads);
        values.push_back(est.value);
        xs.push_back(std::log(static_cast<double>(n_dims[i])));
        ys.push_back(std::log(est.value));
    }
    const LinearFit fit = least_squares(xs, ys);
    return ScalingFit{fit.slope, fit.intercept, std::move(values)};
}

std::vector<GrassmannMeasurePoint> grassmann_ball_measure_mc(int n_dim, int k, const Exponent& q,
                                                             const std::vector<double>& deltas,
                                                             long n_samples,
                                                             const StreamKey& stream,
                                                             int threads) {
    if (k < 1 || 2 * k > n_dim) {
        throw invalid_input("grassmann_ball_measure_mc: need 1 <= k <= n_dim/2");
    }
    if (!(q.value() >= 1.0)) throw invalid_input("grassmann_ball_measure_mc: need q >= 1");
    const double diam = std::pow(static_cast<double>(k), q.inv());
    for (double d : deltas) {
        if (!(d > 0.0 && d < diam)) {
            throw invalid_input("grassmann_ball_measure_mc: deltas must lie in (0, k^{1/q})");
        }
    }
    Mat reference = Mat::Zero(n_dim, k);
    for (int j = 0; j < k; ++j) reference(j, j) = 1.0;

    const long n_batches = (n_samples + kBatchSize - 1) / kBatchSize;
    std::vector<std::vector<long>> hits(n_batches, std::vector<long>(deltas.size(), 0));
    parallel_for_batches(n_batches, threads, [&](long b) {
        const long count = std::min(kBatchSize, n_samples - b * kBatchSize);
        RandomStream rng(derive_stream(stream, static_cast<std::uint64_t>(b)));
        for (long i = 0; i < count; ++i) {
            const Mat u = haar_stiefel_from_stream(rng, n_dim, k);
            const double dist = grassmann_distance_frames(u, reference, q);
            for (std::size_t d = 0; d < deltas.size(); ++d) {
                if (dist < deltas[d]) ++hits[b][d];
            }
        }
    });
    std::vector<GrassmannMeasurePoint> out;
    for (std::size_t d = 0; d < deltas.size(); ++d) {
        long total = 0;
        for (long b = 0; b < n_batches; ++b) total += hits[b][d];
        const double prob = static_cast<double>(total) / static_cast<double>(n_samples);
        const double se = std::sqrt(prob * (1.0 - prob) / static_cast<double>(n_samples));
        out.push_back(GrassmannMeasurePoint{deltas[d], prob, se, total, total < 100});
    }
    return out;
}

double fit_measure_exponent(const std::vector<GrassmannMeasurePoint>& points) {
    std::vector<double> xs, ys;
    for (const auto& pt : points) {
        if (pt.probability > 0.0) {
            xs.push_back(std::log(pt.delta));
            ys.push_back(std::log(pt.probability));
        }
    }
    if (xs.size() < 2) throw degenerate_estimate("fit_measure_exponent: fewer than 2 usable points");
    return least_squares(xs, ys).slope;
}

}  // namespace schatten_lab
