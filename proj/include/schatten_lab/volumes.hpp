#pragma once

#include <vector>

#include "schatten_lab/core.hpp"
#include "schatten_lab/rng.hpp"

namespace schatten_lab {

struct VolumeEstimate {
    enum class Method { exact, rejection };
    double value;  // vol(B)^{1/dim}
    double std_error;
    long n_samples;
    Method method;
};

// log vol of the Euclidean ball, evaluated in log space to survive dim 36+.
double euclidean_ball_log_volume(int dim, double radius);
double euclidean_ball_volume(int dim, double radius);

// vol(B_p^N)^{1/N^2}: exact for p = 2, otherwise rejection Monte Carlo from
// the enclosing Frobenius ball (restricted to N <= 6).
VolumeEstimate schatten_ball_volume_mc(const BallSpec& spec, long n_samples,
                                       const StreamKey& stream, int threads = 1);

struct ScalingFit {
    double slope;
    double intercept;
    std::vector<double> values;  // per n_dim, same order as the input
};

// Least-squares slope of log vol(B_p^N)^{1/N^2} against log N; asymptotic
// prediction is -(1/2 + 1/p).
ScalingFit volume_scaling_fit(const Exponent& p, const std::vector<int>& n_dims, long n_samples,
                              const StreamKey& stream, int threads = 1);

struct GrassmannMeasurePoint {
    double delta;
    double probability;
    double std_error;
    long hits;
    bool widened_ci;  // fewer than 100 hits
};

// mu_{N,k}(B(F, delta)) over Haar E against the fixed F = first-k-coordinates
// subspace, for each delta; distance is |P_E - P_F|_{S_q}.
std::vector<GrassmannMeasurePoint> grassmann_ball_measure_mc(int n_dim, int k, const Exponent& q,
                                                             const std::vector<double>& deltas,
                                                             long n_samples,
                                                             const StreamKey& stream,
                                                             int threads = 1);

// log-log regression slope of probability against delta; estimates k(N-k).
double fit_measure_exponent(const std::vector<GrassmannMeasurePoint>& points);

}  // namespace schatten_lab
