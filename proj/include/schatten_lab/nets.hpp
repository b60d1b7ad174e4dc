#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "schatten_lab/metric.hpp"
#include "schatten_lab/rng.hpp"

#include "json.hpp"

namespace schatten_lab {

// Explicit point set. A greedy packing (is_packing = true) has all pairs
// separated by more than `radius`; grid and composite nets are coverings at
// `radius` instead and carry is_packing = false.
struct NetExplicit {
    std::vector<Mat> points;
    double radius = 0.0;
    MetricSpec metric = MetricSpec::op();
    bool saturated = false;
    bool is_packing = false;

    std::size_t size() const { return points.size(); }

    // Index of the nearest point and its distance.
    std::pair<std::size_t, double> nearest(const Mat& x) const;

    // Checks pairwise separation > radius, no tolerance. Throws on violation.
    void assert_separated() const;
};

struct GreedyOptions {
    // Saturation is declared after this many consecutive rejections.
    long rejection_budget = 2000;
    // Global proposal cap; hitting it returns saturated = false.
    long proposal_cap = 200'000;
    // Hard cap on accepted points; hitting it returns saturated = false.
    std::size_t max_points = 100'000;
};

// Greedy maximal delta-separated set over the sampler's support. A saturated
// set is a delta-covering of the support in the triangle-inequality sense.
NetExplicit greedy_separated_set(const std::function<Mat()>& sampler, const MetricSpec& metric,
                                 double delta, const GreedyOptions& opts = {});

enum class StiefelNetMode { direct, composite };

// Covering net of V_K^N in the operator norm. Direct: greedy over Haar
// samples at eps. Composite: Grassmann net x O(k) net, {U_E Z}, radius 3*eps.
NetExplicit stiefel_net(int n_dim, int k, double eps, StiefelNetMode mode, const StreamKey& stream,
                        const GreedyOptions& opts = {});

inline constexpr double kLqNetCardinalityCap = 1e8;

// Deterministic axis-aligned grid covering B_{l_q^k} at radius eps in l_q;
// 0 is always a net point.
NetExplicit lq_ball_net(int k, const Exponent& q, double eps);

struct LowRankBallSpec {
    int n_dim;
    int k;
    Exponent q;
    LowRankBallSpec(int n_dim_, int k_, Exponent q_) : n_dim(n_dim_), k(k_), q(q_) {
        if (k < 1 || k > n_dim) throw invalid_input("LowRankBallSpec: need 1 <= k <= n_dim");
    }
};

struct LowRankNetOptions {
    GreedyOptions stiefel;
    // Product sets up to this size are materialized and scanned exactly;
    // larger ones answer nearest() through the factor-wise assignment.
    std::size_t materialize_cap = 20'000;
};

// Net of R^N_{K,q} = {rank <= K, |X|_q <= 1} built as {U~ diag(s~) V~^T} from
// an operator-norm Stiefel net and an l_q grid, both at resolution
// eps / 3^{1/q_bar}.
class LowRankNet {
  public:
    LowRankNet(LowRankBallSpec spec, double eps, NetExplicit u_net, NetExplicit v_net,
               NetExplicit sigma_net, std::size_t materialize_cap);

    const LowRankBallSpec& spec() const { return spec_; }
    double radius() const { return radius_; }
    double log2_cardinality() const { return log2_cardinality_; }
    bool materialized() const { return !points_.empty(); }
    bool components_saturated() const {
        return u_net_.saturated && v_net_.saturated && sigma_net_.saturated;
    }
    const NetExplicit& u_net() const { return u_net_; }
    const NetExplicit& v_net() const { return v_net_; }
    const NetExplicit& sigma_net() const { return sigma_net_; }
    const std::vector<Mat>& points() const { return points_; }

    // Nearest net point in the S_q (quasi-)norm: exact linear scan when
    // materialized, factor-wise assignment (with zero fallback) otherwise.
    std::pair<Mat, double> nearest(const Mat& x) const;

  private:
    LowRankBallSpec spec_;
    double radius_;
    NetExplicit u_net_, v_net_, sigma_net_;
    std::vector<Mat> points_;
    double log2_cardinality_;
};

LowRankNet low_rank_ball_net(const LowRankBallSpec& spec, double eps, const StreamKey& stream,
                             const LowRankNetOptions& opts = {});

// A = sum of pieces + remainder; piece j carries singular values with indices
// in [2^{j-1}, 2^j - 1] (1-based), the remainder carries sigma_{2^l}..sigma_N.
struct DyadicDecomposition {
    std::vector<Mat> pieces;
    Mat remainder;
    int levels = 0;
};

DyadicDecomposition dyadic_decompose(const Mat& a, int levels, const Exponent& p,
                                     const Exponent& q);

struct NetBuildOptions {
    LowRankNetOptions low_rank;
    // Per-level point caps for the component Stiefel nets, indexed by rank
    // budget: caps rank-1 levels separately since they need the finest nets.
    std::size_t rank1_stiefel_points = 4000;
    std::size_t higher_rank_stiefel_points = 400;
};

// The dyadic product net: per-level low-rank nets with radii
// eps_j = c_q * 2^{(j-l)(1/p-1/q+alpha)} and scales 2^{-(j-1)(1/p-1/q)}.
struct ProductNet {
    int n_dim;
    Exponent p, q;
    int levels;
    double alpha;
    double c_q;
    std::vector<LowRankNet> level_nets;
    std::vector<double> level_scales;
    std::vector<double> level_radii;
    double error_budget;      // the aggregate eps of the eps^qbar sum
    double log2_cardinality;  // sum of component log2 cardinalities
};

ProductNet schatten_net_build(int n_dim, const Exponent& p, const Exponent& q, int levels,
                              double alpha, double c_q, const StreamKey& stream,
                              const NetBuildOptions& opts = {});

struct QuantizeResult {
    Mat representative;
    double achieved_error;  // |a - representative|_q
};

QuantizeResult quantize(const ProductNet& net, const Mat& a);

// --- serialization (versioned, binary-free JSON) ---

nlohmann::json net_to_json(const NetExplicit& net);
NetExplicit net_from_json(const nlohmann::json& j);

// Writes the manifest plus one file per component net into `dir`.
void save_product_net(const ProductNet& net, const std::string& dir);
ProductNet load_product_net(const std::string& manifest_path);

}  // namespace schatten_lab
