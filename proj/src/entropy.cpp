#include "schatten_lab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "schatten_lab/sampling.hpp"

namespace schatten_lab {

namespace {
// floor(log2 x) + 1 for x >= 1.
int index_of_cardinality(long x) {
    int n = 0;
    while (x > 0) {
        x >>= 1;
        ++n;
    }
    return n;
}
}  // namespace

EntropyBound upper_from_net(long cardinality, double covering_radius) {
    if (cardinality < 1) throw invalid_input("upper_from_net: cardinality must be >= 1");
    if (!(covering_radius >= 0.0)) throw invalid_input("upper_from_net: radius must be >= 0");
    EntropyBound b;
    b.entropy_index = index_of_cardinality(cardinality);
    b.upper = covering_radius;
    b.method_upper = "net";
    return b;
}

EntropyBound lower_from_volume(const Exponent& p, const Exponent& q, int entropy_index, int n_dim,
                               double vol_ratio_root) {
    (void)p;
    (void)q;
    if (entropy_index < 1) throw invalid_input("lower_from_volume: entropy_index must be >= 1");
    if (n_dim < 1) throw invalid_input("lower_from_volume: n_dim must be >= 1");
    if (!(vol_ratio_root > 0.0)) throw invalid_input("lower_from_volume: ratio root must be > 0");
    EntropyBound b;
    b.entropy_index = entropy_index;
    b.lower = vol_ratio_root *
              std::exp2(-static_cast<double>(entropy_index - 1) / (static_cast<double>(n_dim) * n_dim));
    b.method_lower = "volume";
    return b;
}

EntropyBound lower_from_packing(long packing_size, double separation, const Exponent& q) {
    if (packing_size < 2) throw invalid_input("lower_from_packing: need at least 2 points");
    if (!(separation > 0.0)) throw invalid_input("lower_from_packing: separation must be > 0");
    EntropyBound b;
    b.entropy_index = index_of_cardinality(packing_size - 1);
    b.lower = separation / std::exp2(1.0 / q.bar());
    b.method_lower = "packing";
    return b;
}

double oracle_dim1(int entropy_index) {
    if (entropy_index < 1) throw invalid_input("oracle_dim1: entropy_index must be >= 1");
    return std::exp2(1.0 - entropy_index);
}

GrassmannPacking grassmann_packing_lower(int n_dim, int k, const Exponent& p, const Exponent& q,
                                         const StreamKey& stream, double c,
                                         const GreedyOptions& opts) {
    if (k < 1 || 2 * k > n_dim) {
        throw invalid_input("grassmann_packing_lower: need 1 <= k <= n_dim/2");
    }
    if (!(q.value() >= 1.0)) throw invalid_input("grassmann_packing_lower: need q >= 1");
    if (!(c > 0.0)) throw invalid_input("grassmann_packing_lower: need c > 0");

    GrassmannPacking out;
    out.k = k;
    out.scale = std::pow(static_cast<double>(k), -p.inv());
    out.separation = c * std::pow(static_cast<double>(k), q.inv() - p.inv());
    // S_q separation of the unscaled projections implied by the target.
    const double frame_delta = out.separation / out.scale;

    RandomStream rng(derive_stream(stream, 0x6772706bULL));
    long proposals = 0;
    long rejections = 0;
    while (proposals < opts.proposal_cap && out.frames.size() < opts.max_points) {
        const Mat cand = haar_stiefel_from_stream(rng, n_dim, k);
        ++proposals;
        bool separated = true;
        for (const Mat& f : out.frames) {
            if (!(grassmann_distance_frames(cand, f, q) > frame_delta)) {
                separated = false;
                break;
            }
        }
        if (separated) {
            out.frames.push_back(cand);
            rejections = 0;
        } else if (++rejections >= opts.rejection_budget) {
            out.saturated = true;
            break;
        }
    }
    if (out.frames.size() < 2) {
        std::ostringstream msg;
        msg << "grassmann_packing_lower: degenerate packing of size " << out.frames.size()
            << " after " << proposals << " proposals (N=" << n_dim << ", k=" << k << ")";
        throw degenerate_estimate(msg.str());
    }
    out.bound = lower_from_packing(static_cast<long>(out.frames.size()), out.separation, q);
    std::ostringstream tag;
    tag << "packing(k=" << k << ")";
    out.bound.method_lower = tag.str();
    return out;
}

namespace {

struct LowerSources {
    bool have_volume = false;
    double vol_ratio_root = 1.0;
    std::string volume_method;
    std::vector<GrassmannPacking> packings;
};

LowerSources gather_lower_sources(const Exponent& p, const Exponent& q, int n_dim,
                                  const StreamKey& stream, const SandwichOptions& opts,
                                  int min_row_n) {
    LowerSources src;
    if (p == q) {
        src.have_volume = true;
        src.vol_ratio_root = 1.0;
        src.volume_method = "volume_exact";
    } else if (n_dim <= kRejectionMaxDim) {
        const double vp = schatten_ball_volume_mc(BallSpec(n_dim, p), opts.volume_samples,
                                                  derive_stream(stream, 10), opts.threads)
                              .value;
        const double vq = schatten_ball_volume_mc(BallSpec(n_dim, q), opts.volume_samples,
                                                  derive_stream(stream, 11), opts.threads)
                              .value;
        src.have_volume = true;
        src.vol_ratio_root = vp / vq;
        src.volume_method = "volume_mc";
    }
    // A packing of at most max_points reaches index floor(log2(M-1)) + 1; if
    // even that falls short of the smallest row, skip the greedy work.
    int reachable = 0;
    for (std::size_t m = opts.packing.max_points - 1; m > 0; m >>= 1) ++reachable;
    if (q.value() >= 1.0 && reachable >= min_row_n) {
        const int k_max = std::min(opts.max_packing_rank, n_dim / 2);
        for (int k = 1; k <= k_max; ++k) {
            try {
                src.packings.push_back(grassmann_packing_lower(
                    n_dim, k, p, q, derive_stream(stream, 100 + static_cast<std::uint64_t>(k)),
                    opts.packing_c, opts.packing));
            } catch (const degenerate_estimate&) {
                // A rank that fails to pack simply contributes no bound.
            }
        }
    }
    return src;
}

void fill_lower(SandwichRow& row, const Exponent& p, const Exponent& q, int n_dim,
                const LowerSources& src) {
    if (src.have_volume) {
        const EntropyBound vb = lower_from_volume(p, q, row.n, n_dim, src.vol_ratio_root);
        if (vb.lower > row.lower) {
            row.lower = vb.lower;
            row.method_lower = src.volume_method;
            row.lower_missing = false;
        }
    }
    for (const GrassmannPacking& pk : src.packings) {
        // e_n is non-increasing, so a packing bound at index n' covers n <= n'.
        if (row.n <= pk.bound.entropy_index && pk.bound.lower > row.lower) {
            row.lower = pk.bound.lower;
            row.method_lower = pk.bound.method_lower;
            row.lower_missing = false;
        }
    }
}

}  // namespace

SandwichReport sandwich_report(const Exponent& p, const Exponent& q, int n_dim,
                               const std::vector<int>& levels, const StreamKey& stream,
                               const SandwichOptions& opts) {
    if (levels.empty()) throw invalid_input("sandwich_report: need at least one level");
    if (n_dim < 1) throw invalid_input("sandwich_report: n_dim must be >= 1");
    UpperRoute route = opts.route;
    if (route == UpperRoute::automatic) route = p <= q ? UpperRoute::product : UpperRoute::greedy;
    if (route == UpperRoute::product && !(p <= q)) {
        throw invalid_input("sandwich_report: product-net uppers require p <= q");
    }

    int min_row_n = 1;
    if (route == UpperRoute::product) {
        int min_level = levels.front();
        for (int level : levels) min_level = std::min(min_level, level);
        if (min_level < 1) throw invalid_input("sandwich_report: levels must be >= 1");
        min_row_n = (1 << min_level) * n_dim;
    }
    const LowerSources src = gather_lower_sources(p, q, n_dim, stream, opts, min_row_n);

    SandwichReport report{p, q, n_dim, {}};
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const int level = levels[li];
        if (level < 1) throw invalid_input("sandwich_report: levels must be >= 1");
        SandwichRow row;
        if (route == UpperRoute::product) {
            const ProductNet net =
                schatten_net_build(n_dim, p, q, level, opts.alpha, opts.c_q,
                                   derive_stream(stream, 200 + static_cast<std::uint64_t>(level)),
                                   opts.net);
            double worst = 0.0;
            for (long s = 0; s < opts.audit_samples; ++s) {
                const Mat a = sample_schatten_ball(
                    BallSpec(n_dim, p), BallSampleMode::spectral,
                    derive_stream(stream, 300000 + 1000 * static_cast<std::uint64_t>(level) +
                                              static_cast<std::uint64_t>(s)));
                worst = std::max(worst, quantize(net, a).achieved_error);
            }
            row.n = (1 << level) * n_dim;
            row.upper = std::max(net.error_budget, worst);
            row.audit_worst = worst;
            row.log2_cardinality = net.log2_cardinality;
            std::ostringstream m;
            m << "product_net(l=" << level << ")";
            row.method_upper = m.str();
        } else {
            const double delta = std::exp2(-level);
            long counter = 0;
            auto sampler = [&]() {
                return sample_schatten_ball(
                    BallSpec(n_dim, p), BallSampleMode::spectral,
                    derive_stream(stream, 400000 + 1000 * static_cast<std::uint64_t>(level) +
                                              static_cast<std::uint64_t>(counter++)));
            };
            const NetExplicit net =
                greedy_separated_set(sampler, MetricSpec::schatten(q), delta, opts.packing);
            const EntropyBound ub = upper_from_net(static_cast<long>(net.size()), delta);
            row.n = ub.entropy_index;
            row.upper = delta;
            row.log2_cardinality = std::log2(static_cast<double>(net.size()));
            std::ostringstream m;
            m << "greedy_net(delta=" << delta << (net.saturated ? ",saturated" : ",unsaturated")
              << ")";
            row.method_upper = m.str();
        }

        fill_lower(row, p, q, n_dim, src);
        row.theory = theory_rate(RateQuery(p, q, row.n, n_dim));
        row.ratio_upper_lower =
            row.lower > 0.0 ? row.upper / row.lower : std::numeric_limits<double>::infinity();
        if (row.lower > row.upper + 1e-12) {
            std::ostringstream msg;
            msg << "sandwich_report: lower " << row.lower << " exceeds upper " << row.upper
                << " at n=" << row.n << " — bound machinery is inconsistent";
            throw numeric_failure(msg.str());
        }
        report.rows.push_back(std::move(row));
    }
    std::sort(report.rows.begin(), report.rows.end(),
              [](const SandwichRow& a, const SandwichRow& b) { return a.n < b.n; });
    return report;
}

}  // namespace schatten_lab
