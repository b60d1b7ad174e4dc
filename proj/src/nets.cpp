#include "schatten_lab/nets.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "schatten_lab/sampling.hpp"

namespace schatten_lab {

namespace {

nlohmann::json exponent_to_json(const Exponent& e) {
    if (e.is_inf()) return "inf";
    return e.value();
}

Exponent exponent_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return Exponent::infinity();
        throw invalid_input("exponent_from_json: unknown string value");
    }
    return Exponent(j.get<double>());
}

}  // namespace

std::pair<std::size_t, double> NetExplicit::nearest(const Mat& x) const {
    if (points.empty()) throw invalid_input("NetExplicit::nearest: empty net");
    std::size_t best = 0;
    double best_d = metric.distance(points[0], x);
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double d = metric.distance(points[i], x);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return {best, best_d};
}

void NetExplicit::assert_separated() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (!(metric.distance(points[i], points[j]) > radius)) {
                std::ostringstream msg;
                msg << "NetExplicit: points " << i << " and " << j
                    << " violate the separation radius " << radius;
                throw numeric_failure(msg.str());
            }
        }
    }
}

NetExplicit greedy_separated_set(const std::function<Mat()>& sampler, const MetricSpec& metric,
                                 double delta, const GreedyOptions& opts) {
    if (!(delta > 0.0)) throw invalid_input("greedy_separated_set: delta must be > 0");
    if (opts.rejection_budget < 1) throw invalid_input("greedy_separated_set: budget must be >= 1");
    NetExplicit net;
    net.metric = metric;
    net.radius = delta;
    net.is_packing = true;
    long consecutive_rejections = 0;
    long proposals = 0;
    while (consecutive_rejections < opts.rejection_budget && proposals < opts.proposal_cap &&
           net.points.size() < opts.max_points) {
        Mat candidate = sampler();
        ++proposals;
        bool separated = true;
        for (const Mat& p : net.points) {
            if (metric.distance(p, candidate) <= delta) {
                separated = false;
                break;
            }
        }
        if (separated) {
            net.points.push_back(std::move(candidate));
            consecutive_rejections = 0;
        } else {
            ++consecutive_rejections;
        }
    }
    if (net.points.empty()) {
        throw empty_support("greedy_separated_set: sampler produced no acceptable point");
    }
    net.saturated = consecutive_rejections >= opts.rejection_budget;
    return net;
}

NetExplicit stiefel_net(int n_dim, int k, double eps, StiefelNetMode mode, const StreamKey& stream,
                        const GreedyOptions& opts) {
    if (k < 1 || k > n_dim) throw invalid_input("stiefel_net: need 1 <= k <= n_dim");
    if (!(eps > 0.0 && eps < 2.0)) throw invalid_input("stiefel_net: need 0 < eps < 2");
    if (mode == StiefelNetMode::direct) {
        RandomStream seq(stream);
        auto sampler = [&seq, n_dim, k]() { return haar_stiefel_from_stream(seq, n_dim, k); };
        return greedy_separated_set(sampler, MetricSpec::op(), eps, opts);
    }

    // Composite: Grassmann net {U_E} times an O(k) net, a 3*eps covering.
    std::vector<Mat> frames;
    {
        RandomStream seq(derive_stream(stream, 1));
        long consecutive = 0, proposals = 0;
        while (consecutive < opts.rejection_budget && proposals < opts.proposal_cap &&
               frames.size() < opts.max_points) {
            Mat f = haar_stiefel_from_stream(seq, n_dim, k);
            ++proposals;
            bool ok = true;
            for (const Mat& g : frames) {
                if (grassmann_distance_frames(f, g, Exponent::infinity()) <= eps) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                frames.push_back(std::move(f));
                consecutive = 0;
            } else {
                ++consecutive;
            }
        }
        if (frames.empty()) throw empty_support("stiefel_net: no Grassmann point accepted");
    }
    NetExplicit rotations;
    {
        RandomStream seq(derive_stream(stream, 2));
        auto sampler = [&seq, k]() { return haar_stiefel_from_stream(seq, k, k); };
        rotations = greedy_separated_set(sampler, MetricSpec::op(), eps, opts);
    }
    NetExplicit net;
    net.metric = MetricSpec::op();
    net.radius = 3.0 * eps;
    net.is_packing = false;
    net.saturated = rotations.saturated;
    net.points.reserve(frames.size() * rotations.points.size());
    for (const Mat& u : frames) {
        for (const Mat& z : rotations.points) {
            net.points.push_back(u * z);
        }
    }
    return net;
}

NetExplicit lq_ball_net(int k, const Exponent& q, double eps) {
    if (k < 1) throw invalid_input("lq_ball_net: k must be >= 1");
    if (!(eps > 0.0 && eps <= 1.0)) throw invalid_input("lq_ball_net: need eps in (0, 1]");
    const double spread = q.is_inf() ? 1.0 : std::pow(static_cast<double>(k), q.inv());
    const double h = 2.0 * eps / spread;
    const long m_max = static_cast<long>(std::ceil(1.0 / h)) - 1;
    const long axis_count = 2 * (m_max + 1);
    if (std::pow(static_cast<double>(axis_count), k) > kLqNetCardinalityCap) {
        std::ostringstream msg;
        msg << "lq_ball_net: grid of " << axis_count << "^" << k
            << " points exceeds the cardinality cap; use a coarser eps";
        throw capacity_error(msg.str());
    }
    std::vector<double> axis;
    axis.reserve(axis_count);
    for (long m = -(m_max + 1); m <= m_max; ++m) {
        axis.push_back((static_cast<double>(m) + 0.5) * h);
    }
    const double qbar = q.bar();
    // Keep grid points within quasi-triangle reach of the ball.
    const double keep_bound = std::pow(1.0 + std::pow(eps, qbar), 1.0 / qbar) + 1e-12;

    NetExplicit net;
    net.metric = MetricSpec::vector(q);
    net.radius = eps;
    net.is_packing = false;
    net.saturated = true;
    net.points.push_back(Mat::Zero(k, 1));

    Mat point(k, 1);
    std::vector<std::size_t> idx(k, 0);
    while (true) {
        for (int i = 0; i < k; ++i) point(i, 0) = axis[idx[i]];
        if (lp_norm(point.col(0), q) <= keep_bound) {
            net.points.push_back(point);
        }
        int pos = 0;
        while (pos < k) {
            if (++idx[pos] < axis.size()) break;
            idx[pos] = 0;
            ++pos;
        }
        if (pos == k) break;
    }
    return net;
}

LowRankNet::LowRankNet(LowRankBallSpec spec, double eps, NetExplicit u_net, NetExplicit v_net,
                       NetExplicit sigma_net, std::size_t materialize_cap)
    : spec_(spec),
      radius_(eps),
      u_net_(std::move(u_net)),
      v_net_(std::move(v_net)),
      sigma_net_(std::move(sigma_net)) {
    const double card = static_cast<double>(u_net_.size()) * static_cast<double>(v_net_.size()) *
                        static_cast<double>(sigma_net_.size());
    log2_cardinality_ = std::log2(card);
    if (card <= static_cast<double>(materialize_cap)) {
        points_.reserve(static_cast<std::size_t>(card));
        for (const Mat& u : u_net_.points) {
            for (const Mat& s : sigma_net_.points) {
                const Mat us = u * s.col(0).asDiagonal();
                for (const Mat& v : v_net_.points) {
                    points_.push_back(us * v.transpose());
                }
            }
        }
    }
}

std::pair<Mat, double> LowRankNet::nearest(const Mat& x) const {
    const MetricSpec metric = MetricSpec::schatten(spec_.q);
    if (materialized()) {
        auto [idx, d] = NetExplicit{points_, radius_, metric}.nearest(x);
        return {points_[idx], d};
    }
    // Factor-wise assignment through the SVD of x, with per-column sign
    // absorption into the sigma grid and a zero fallback.
    const int k = spec_.k;
    const SvdFactors f = svd(x);
    const Mat u = f.u.leftCols(k);
    const Mat v = f.v.leftCols(k);
    Vec sigma = f.sigma.head(k);

    auto nearest_frame = [&](const NetExplicit& net, const Mat& target) -> const Mat& {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < net.points.size(); ++i) {
            const double d = operator_norm(net.points[i] - target);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return net.points[best];
    };
    const Mat& ut = nearest_frame(u_net_, u);
    const Mat& vt = nearest_frame(v_net_, v);
    Vec signed_sigma(k);
    for (int j = 0; j < k; ++j) {
        const double s = (u.col(j).dot(ut.col(j)) * v.col(j).dot(vt.col(j))) < 0.0 ? -1.0 : 1.0;
        signed_sigma(j) = s * sigma(j);
    }
    std::size_t best_s = 0;
    double best_sd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sigma_net_.points.size(); ++i) {
        const double d = lp_norm(sigma_net_.points[i].col(0) - signed_sigma, spec_.q);
        if (d < best_sd) {
            best_sd = d;
            best_s = i;
        }
    }
    Mat candidate = ut * sigma_net_.points[best_s].col(0).asDiagonal() * vt.transpose();
    const double cand_d = metric.distance(candidate, x);
    const double zero_d = schatten_norm(x, spec_.q);
    if (zero_d < cand_d) {
        return {Mat::Zero(x.rows(), x.cols()), zero_d};
    }
    return {std::move(candidate), cand_d};
}

LowRankNet low_rank_ball_net(const LowRankBallSpec& spec, double eps, const StreamKey& stream,
                             const LowRankNetOptions& opts) {
    if (!(eps > 0.0)) throw invalid_input("low_rank_ball_net: eps must be > 0");
    const double component_eps = eps / std::pow(3.0, 1.0 / spec.q.bar());
    NetExplicit u_net = stiefel_net(spec.n_dim, spec.k, std::min(component_eps, 1.999),
                                    StiefelNetMode::direct, derive_stream(stream, 11), opts.stiefel);
    NetExplicit v_net = stiefel_net(spec.n_dim, spec.k, std::min(component_eps, 1.999),
                                    StiefelNetMode::direct, derive_stream(stream, 12), opts.stiefel);
    NetExplicit sigma_net = lq_ball_net(spec.k, spec.q, std::min(component_eps, 1.0));
    return LowRankNet(spec, eps, std::move(u_net), std::move(v_net), std::move(sigma_net),
                      opts.materialize_cap);
}

DyadicDecomposition dyadic_decompose(const Mat& a, int levels, const Exponent& p,
                                     const Exponent& q) {
    (void)q;
    if (a.rows() != a.cols()) throw invalid_input("dyadic_decompose: matrix must be square");
    const int n = static_cast<int>(a.rows());
    if (levels < 0 || (1L << levels) > n) {
        throw invalid_input("dyadic_decompose: need 2^levels <= N");
    }
    if (schatten_norm(a, p) > 1.0 + 1e-10) {
        throw invalid_input("dyadic_decompose: input must lie in B_p^N");
    }
    const SvdFactors f = svd(a);
    DyadicDecomposition d;
    d.levels = levels;
    d.pieces.reserve(levels);
    for (int j = 1; j <= levels; ++j) {
        const int lo = (1 << (j - 1)) - 1;  // 0-based index of sigma_{2^{j-1}}
        const int hi = std::min((1 << j) - 1, n);
        Vec block = Vec::Zero(n);
        block.segment(lo, hi - lo) = f.sigma.segment(lo, hi - lo);
        d.pieces.push_back(f.u * block.asDiagonal() * f.v.transpose());
    }
    const int tail_lo = (1 << levels) - 1;
    Vec tail = Vec::Zero(n);
    if (tail_lo < n) tail.segment(tail_lo, n - tail_lo) = f.sigma.segment(tail_lo, n - tail_lo);
    d.remainder = f.u * tail.asDiagonal() * f.v.transpose();
    return d;
}

ProductNet schatten_net_build(int n_dim, const Exponent& p, const Exponent& q, int levels,
                              double alpha, double c_q, const StreamKey& stream,
                              const NetBuildOptions& opts) {
    if (!(p <= q)) throw invalid_input("schatten_net_build: requires p <= q");
    if (levels < 0 || (1L << levels) > n_dim) {
        throw invalid_input("schatten_net_build: need 2^levels <= N");
    }
    if (!(alpha > 0.0)) throw invalid_input("schatten_net_build: alpha must be > 0");
    if (!(c_q >= 1.0)) throw invalid_input("schatten_net_build: c_q must be >= 1");

    const double gap = p.inv() - q.inv();
    const double qbar = q.bar();
    ProductNet net{n_dim, p, q, levels, alpha, c_q, {}, {}, {}, 0.0, 0.0};
    double budget_acc = std::exp2(levels * qbar * (q.inv() - p.inv()));
    for (int j = 1; j <= levels; ++j) {
        const double eps_j = c_q * std::exp2((j - levels) * (gap + alpha));
        const double scale_j = std::exp2(-(j - 1) * gap);
        const int rank = 1 << (j - 1);
        LowRankNetOptions lro = opts.low_rank;
        lro.stiefel.max_points =
            rank == 1 ? opts.rank1_stiefel_points : opts.higher_rank_stiefel_points;
        lro.stiefel.proposal_cap =
            std::max<long>(lro.stiefel.proposal_cap, 20L * static_cast<long>(lro.stiefel.max_points));
        try {
            net.level_nets.push_back(low_rank_ball_net(LowRankBallSpec(n_dim, rank, q), eps_j,
                                                       derive_stream(stream, 100 + j), lro));
        } catch (const capacity_error& e) {
            std::ostringstream msg;
            msg << "schatten_net_build: level " << j << ": " << e.what();
            throw capacity_error(msg.str());
        }
        net.level_scales.push_back(scale_j);
        net.level_radii.push_back(eps_j);
        budget_acc += std::pow(scale_j * eps_j, qbar);
        net.log2_cardinality += net.level_nets.back().log2_cardinality();
    }
    net.error_budget = std::pow(budget_acc, 1.0 / qbar);
    return net;
}

QuantizeResult quantize(const ProductNet& net, const Mat& a) {
    const DyadicDecomposition d = dyadic_decompose(a, net.levels, net.p, net.q);
    Mat repr = Mat::Zero(a.rows(), a.cols());
    for (int j = 0; j < net.levels; ++j) {
        const double scale = net.level_scales[j];
        const Mat scaled_piece = d.pieces[j] / scale;
        auto [z, dist] = net.level_nets[j].nearest(scaled_piece);
        (void)dist;
        repr += scale * z;
    }
    return QuantizeResult{repr, schatten_norm(a - repr, net.q)};
}

// --- serialization ---

nlohmann::json net_to_json(const NetExplicit& net) {
    nlohmann::json j;
    j["type"] = "net";
    j["version"] = 1;
    j["metric"] = {{"kind", net.metric.kind_name()}, {"q", exponent_to_json(net.metric.q)}};
    j["radius"] = net.radius;
    j["saturated"] = net.saturated;
    j["is_packing"] = net.is_packing;
    if (!net.points.empty()) {
        j["rows"] = net.points[0].rows();
        j["cols"] = net.points[0].cols();
    } else {
        j["rows"] = 0;
        j["cols"] = 0;
    }
    nlohmann::json pts = nlohmann::json::array();
    for (const Mat& m : net.points) {
        nlohmann::json flat = nlohmann::json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
        }
        pts.push_back(std::move(flat));
    }
    j["points"] = std::move(pts);
    return j;
}

NetExplicit net_from_json(const nlohmann::json& j) {
    if (j.at("type") != "net") throw invalid_input("net_from_json: not a net document");
    NetExplicit net;
    const std::string kind = j.at("metric").at("kind");
    const Exponent q = exponent_from_json(j.at("metric").at("q"));
    if (kind == "schatten") {
        net.metric = MetricSpec::schatten(q);
    } else if (kind == "operator") {
        net.metric = MetricSpec::op();
    } else if (kind == "euclidean_vector") {
        net.metric = MetricSpec::vector(q);
    } else {
        throw invalid_input("net_from_json: unknown metric kind");
    }
    net.radius = j.at("radius").get<double>();
    net.saturated = j.at("saturated").get<bool>();
    net.is_packing = j.value("is_packing", false);
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    for (const auto& flat : j.at("points")) {
        Mat m(rows, cols);
        Eigen::Index i = 0;
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat.at(i++).get<double>();
        }
        net.points.push_back(std::move(m));
    }
    return net;
}

void save_product_net(const ProductNet& net, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    nlohmann::json manifest;
    manifest["type"] = "product_net";
    manifest["version"] = 1;
    manifest["params"] = {{"n_dim", net.n_dim},     {"p", exponent_to_json(net.p)},
                          {"q", exponent_to_json(net.q)}, {"levels", net.levels},
                          {"alpha", net.alpha},     {"c_q", net.c_q}};
    manifest["error_budget"] = net.error_budget;
    manifest["log2_cardinality"] = net.log2_cardinality;
    nlohmann::json levels = nlohmann::json::array();
    for (int j = 0; j < net.levels; ++j) {
        const LowRankNet& ln = net.level_nets[j];
        const std::string base = "level" + std::to_string(j + 1);
        const std::array<std::pair<const char*, const NetExplicit*>, 3> components{
            {{"u", &ln.u_net()}, {"v", &ln.v_net()}, {"sigma", &ln.sigma_net()}}};
        for (const auto& [suffix, component] : components) {
            std::ofstream out(fs::path(dir) / (base + "_" + suffix + ".json"));
            out << net_to_json(*component).dump(2) << "\n";
        }
        levels.push_back({{"k", ln.spec().k},
                          {"radius", net.level_radii[j]},
                          {"scale", net.level_scales[j]},
                          {"u_net", base + "_u.json"},
                          {"v_net", base + "_v.json"},
                          {"sigma_net", base + "_sigma.json"}});
    }
    manifest["levels"] = std::move(levels);
    std::ofstream out(fs::path(dir) / "product_net.json");
    out << manifest.dump(2) << "\n";
}

ProductNet load_product_net(const std::string& manifest_path) {
    namespace fs = std::filesystem;
    std::ifstream in(manifest_path);
    if (!in) throw invalid_input("load_product_net: cannot open " + manifest_path);
    nlohmann::json manifest;
    in >> manifest;
    if (manifest.at("type") != "product_net") {
        throw invalid_input("load_product_net: not a product_net manifest");
    }
    const fs::path dir = fs::path(manifest_path).parent_path();
    const auto& params = manifest.at("params");
    const Exponent p = exponent_from_json(params.at("p"));
    const Exponent q = exponent_from_json(params.at("q"));
    ProductNet net{params.at("n_dim").get<int>(),
                   p,
                   q,
                   params.at("levels").get<int>(),
                   params.at("alpha").get<double>(),
                   params.at("c_q").get<double>(),
                   {},
                   {},
                   {},
                   manifest.at("error_budget").get<double>(),
                   manifest.at("log2_cardinality").get<double>()};
    auto read_net = [&dir](const std::string& file) {
        std::ifstream f(dir / file);
        if (!f) throw invalid_input("load_product_net: missing component " + file);
        nlohmann::json j;
        f >> j;
        return net_from_json(j);
    };
    const LowRankNetOptions opts;
    for (const auto& level : manifest.at("levels")) {
        LowRankBallSpec spec(net.n_dim, level.at("k").get<int>(), q);
        net.level_nets.emplace_back(spec, level.at("radius").get<double>(),
                                    read_net(level.at("u_net")), read_net(level.at("v_net")),
                                    read_net(level.at("sigma_net")), opts.materialize_cap);
        net.level_scales.push_back(level.at("scale").get<double>());
        net.level_radii.push_back(level.at("radius").get<double>());
    }
    return net;
}

}  // namespace schatten_lab
