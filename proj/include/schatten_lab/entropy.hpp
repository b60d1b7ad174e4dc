#pragma once

#include <optional>
#include <string>
#include <vector>

#include "schatten_lab/nets.hpp"
#include "schatten_lab/rng.hpp"
#include "schatten_lab/volumes.hpp"

namespace schatten_lab {

struct EntropyBound {
    int entropy_index = 1;
    double lower = 0.0;
    std::optional<double> upper;
    std::string method_lower = "none";
    std::string method_upper = "none";
};

// Covering with `cardinality` balls of radius r bounds e_n at
// n = floor(log2 cardinality) + 1.
EntropyBound upper_from_net(long cardinality, double covering_radius);

// Volume comparison: e_n >= (vol B_p / vol B_q)^{1/N^2} * 2^{-(n-1)/N^2}.
// vol_ratio_root is the ratio already taken to the 1/N^2 power.
EntropyBound lower_from_volume(const Exponent& p, const Exponent& q, int entropy_index, int n_dim,
                               double vol_ratio_root);

// Pigeonhole: M points pairwise > delta apart in a quasi-metric with exponent
// q_bar force e_n >= delta / 2^{1/q_bar} at n = floor(log2(M-1)) + 1.
EntropyBound lower_from_packing(long packing_size, double separation, const Exponent& q);

// Exact entropy numbers of [-1, 1] in itself: e_n = 2^{1-n}.
double oracle_dim1(int entropy_index);

struct GrassmannPacking {
    std::vector<Mat> frames;  // orthonormal N x k, one per retained subspace
    int k = 1;
    double scale = 1.0;       // k^{-1/p} applied to the projections
    double separation = 0.0;  // the S_q separation target on scaled projections
    bool saturated = false;
    EntropyBound bound;
};

// Greedy packing of {k^{-1/p} P_E} in B_p^N, separated by more than
// c * k^{1/q - 1/p} in S_q, fed through lower_from_packing.
GrassmannPacking grassmann_packing_lower(int n_dim, int k, const Exponent& p, const Exponent& q,
                                         const StreamKey& stream, double c = 0.25,
                                         const GreedyOptions& opts = {});

enum class UpperRoute { automatic, product, greedy };

struct SandwichRow {
    int n = 1;
    double lower = 0.0;
    double upper = 0.0;
    double theory = 0.0;
    double ratio_upper_lower = 0.0;
    std::string method_lower = "none";
    std::string method_upper = "none";
    bool lower_missing = true;
    double audit_worst = 0.0;  // worst quantization error seen (product route)
    double log2_cardinality = 0.0;
};

struct SandwichReport {
    Exponent p, q;
    int n_dim;
    std::vector<SandwichRow> rows;
};

struct SandwichOptions {
    UpperRoute route = UpperRoute::automatic;
    long audit_samples = 32;       // quantize audit per product net
    long volume_samples = 200'000;  // MC proposals per volume estimate
    double alpha = 1.0;
    double c_q = 1.0;
    double packing_c = 0.25;
    int max_packing_rank = 4;  // Grassmann packings for k = 1..min(this, N/2)
    NetBuildOptions net;
    // A packing of M points only reaches entropy index ~log2 M, so the caps
    // stay desk-sized; packings that cannot reach any report row are skipped.
    GreedyOptions packing{500, 20'000, 4098};
    int threads = 1;
};

// One row per level l: upper from the dyadic product net (p <= q) or a greedy
// net (q < p) at n = 2^l * N; lower from the best of volume comparison and the
// Grassmann packings whose index reaches the row.
SandwichReport sandwich_report(const Exponent& p, const Exponent& q, int n_dim,
                               const std::vector<int>& levels, const StreamKey& stream,
                               const SandwichOptions& opts = {});

}  // namespace schatten_lab
