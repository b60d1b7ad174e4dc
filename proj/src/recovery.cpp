#include "schatten_lab/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "schatten_lab/parallel.hpp"
#include "schatten_lab/sampling.hpp"

namespace schatten_lab {

Vec InformationMap::apply(const Mat& x) const {
    Vec y(m());
    for (int i = 0; i < m(); ++i) y(i) = (sensors[i].array() * x.array()).sum();
    return y;
}

Mat InformationMap::adjoint(const Vec& y) const {
    Mat out = Mat::Zero(n_dim, n_dim);
    for (int i = 0; i < m(); ++i) out += y(i) * sensors[i];
    return out;
}

InformationMap make_information_map(int n_dim, int m, const StreamKey& stream) {
    if (n_dim < 1) throw invalid_input("make_information_map: n_dim must be >= 1");
    if (m < 1) throw invalid_input("make_information_map: m must be >= 1");
    InformationMap map;
    map.n_dim = n_dim;
    map.sensors.reserve(m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    RandomStream rng(derive_stream(stream, 0x73656e73ULL));
    for (int i = 0; i < m; ++i) {
        Mat a(n_dim, n_dim);
        for (int c = 0; c < n_dim; ++c)
            for (int r = 0; r < n_dim; ++r) a(r, c) = scale * rng.normal();
        map.sensors.push_back(std::move(a));
    }
    return map;
}

InformationMap make_basis_information_map(int n_dim) {
    if (n_dim < 1) throw invalid_input("make_basis_information_map: n_dim must be >= 1");
    InformationMap map;
    map.n_dim = n_dim;
    map.sensors.reserve(static_cast<std::size_t>(n_dim) * n_dim);
    for (int c = 0; c < n_dim; ++c) {
        for (int r = 0; r < n_dim; ++r) {
            Mat e = Mat::Zero(n_dim, n_dim);
            e(r, c) = 1.0;
            map.sensors.push_back(std::move(e));
        }
    }
    return map;
}

namespace {
Mat hard_threshold(const Mat& x, int rank) {
    const SvdFactors f = svd(x);
    const int r = std::min<int>(rank, static_cast<int>(f.sigma.size()));
    return f.u.leftCols(r) * f.sigma.head(r).asDiagonal() * f.v.leftCols(r).transpose();
}
}  // namespace

Mat iht_recover(const Vec& y, const InformationMap& map, int rank, int iters, double step,
                int divergence_window) {
    if (rank < 1) throw invalid_input("iht_recover: rank must be >= 1");
    if (iters < 1) throw invalid_input("iht_recover: iters must be >= 1");
    if (y.size() != map.m()) throw invalid_input("iht_recover: y size does not match map");

    Mat x = Mat::Zero(map.n_dim, map.n_dim);
    double prev_residual = y.norm();
    int growth_streak = 0;
    std::vector<double> trace{prev_residual};
    for (int it = 0; it < iters; ++it) {
        const Vec residual = y - map.apply(x);
        x = hard_threshold(x + step * map.adjoint(residual), rank);
        const double r = (y - map.apply(x)).norm();
        trace.push_back(r);
        if (r > prev_residual) {
            if (++growth_streak >= divergence_window) {
                std::ostringstream msg;
                msg << "iht_recover: residual grew over " << divergence_window
                    << " consecutive iterations (step=" << step << "); tail:";
                const std::size_t lo = trace.size() > 12 ? trace.size() - 12 : 0;
                for (std::size_t i = lo; i < trace.size(); ++i) msg << ' ' << trace[i];
                throw diverged(msg.str());
            }
        } else {
            growth_streak = 0;
        }
        prev_residual = r;
    }
    return x;
}

Mat iht_recover_backtracking(const Vec& y, const InformationMap& map, int rank,
                             const IhtOptions& opts) {
    double step = opts.step;
    for (int attempt = 0;; ++attempt) {
        try {
            return iht_recover(y, map, rank, opts.iters, step, opts.divergence_window);
        } catch (const diverged&) {
            if (attempt >= opts.max_backtracks) throw;
            step *= 0.5;
        }
    }
}

double recovery_theory_lower(int n_dim, int m, const Exponent& p, const Exponent& q) {
    if (n_dim < 1 || m < 1) throw invalid_input("recovery_theory_lower: bad dimensions");
    const double base = std::min(1.0, static_cast<double>(n_dim) / m);
    return std::pow(base, p.inv() - q.inv());
}

namespace {
// Boundary instance: rank-r with equal spectrum r^{-1/p} (flat = full rank),
// Haar singular vectors. Equal spectra are the extreme points the worst-case
// sweep cares about.
Mat pool_instance(int n_dim, int rank, const Exponent& p, RandomStream& rng) {
    const Mat u = haar_stiefel_from_stream(rng, n_dim, rank);
    const Mat v = haar_stiefel_from_stream(rng, n_dim, rank);
    const double sigma = std::pow(static_cast<double>(rank), -p.inv());
    return sigma * (u * v.transpose());
}
}  // namespace

RecoveryReport em_experiment(int n_dim, const std::vector<int>& m_grid, const Exponent& p,
                             const Exponent& q, int trials, const StreamKey& stream,
                             const EmOptions& opts) {
    if (!(p <= q)) throw invalid_input("em_experiment: need p <= q");
    if (trials < 1) throw invalid_input("em_experiment: trials must be >= 1");
    if (m_grid.empty()) throw invalid_input("em_experiment: empty m grid");
    for (int m : m_grid) {
        if (m < 1 || m > n_dim * n_dim) throw invalid_input("em_experiment: m outside [1, N^2]");
    }
    const std::vector<int> pool_ranks{1, 2, 4, n_dim};

    RecoveryReport report{n_dim, p, q, {}};
    for (std::size_t mi = 0; mi < m_grid.size(); ++mi) {
        const int m = m_grid[mi];
        const bool basis = opts.basis_override_at_full_m && m == n_dim * n_dim;
        const InformationMap map =
            basis ? make_basis_information_map(n_dim)
                  : make_information_map(n_dim, m, derive_stream(stream, 500 + mi));
        const int rec_rank = basis ? n_dim : opts.recovery_rank;

        std::vector<double> errors(trials, 0.0);
        parallel_for_batches(trials, opts.threads, [&](long t) {
            RandomStream rng(derive_stream(stream, 1000 * (mi + 1) + static_cast<std::uint64_t>(t)));
            const int rank = pool_ranks[static_cast<std::size_t>(t) % pool_ranks.size()];
            const Mat x = pool_instance(n_dim, std::min(rank, n_dim), p, rng);
            const Mat rec = iht_recover_backtracking(map.apply(x), map, rec_rank, opts.iht);
            errors[t] = schatten_norm(x - rec, q);
        });
        RecoveryRow row;
        row.m = m;
        row.worst_error = *std::max_element(errors.begin(), errors.end());
        row.theory_lower = recovery_theory_lower(n_dim, m, p, q);
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace schatten_lab
