#include "schatten_lab/sampling.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <sstream>

namespace schatten_lab {

Mat gaussian_matrix(int n_rows, int n_cols, const StreamKey& stream) {
    if (n_rows < 1 || n_cols < 1) throw invalid_input("gaussian_matrix: dims must be >= 1");
    RandomStream rng(stream);
    Mat g(n_rows, n_cols);
    for (int i = 0; i < n_rows; ++i) {
        for (int j = 0; j < n_cols; ++j) {
            g(i, j) = rng.normal();
        }
    }
    return g;
}

static StiefelPoint haar_stiefel_from(RandomStream& rng, int n_dim, int k) {
    Mat g(n_dim, k);
    for (int i = 0; i < n_dim; ++i) {
        for (int j = 0; j < k; ++j) g(i, j) = rng.normal();
    }
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ() * Mat::Identity(n_dim, k);
    const Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (int j = 0; j < k; ++j) {
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    return StiefelPoint{std::move(q)};
}

Mat haar_stiefel_from_stream(RandomStream& rng, int n_dim, int k) {
    if (k < 1 || n_dim < 1) throw invalid_input("haar_stiefel: dims must be >= 1");
    if (k > n_dim) throw invalid_input("haar_stiefel: k > n_dim");
    return haar_stiefel_from(rng, n_dim, k).u;
}

StiefelPoint haar_stiefel(int n_dim, int k, const StreamKey& stream) {
    if (k < 1 || n_dim < 1) throw invalid_input("haar_stiefel: dims must be >= 1");
    if (k > n_dim) throw invalid_input("haar_stiefel: k > n_dim");
    RandomStream rng(stream);
    return haar_stiefel_from(rng, n_dim, k);
}

GrassmannPoint haar_grassmann(int n_dim, int k, const StreamKey& stream) {
    StiefelPoint u = haar_stiefel(n_dim, k, stream);
    Mat p = u.u * u.u.transpose();
    return GrassmannPoint{std::move(p), std::move(u.u)};
}

double enclosing_frobenius_radius(const BallSpec& spec) {
    const double expo = std::max(0.0, 0.5 - spec.p.inv());
    return std::pow(static_cast<double>(spec.n_dim), expo);
}

Vec uniform_euclidean_ball(int dim, double radius, RandomStream& rng) {
    Vec g(dim);
    for (int i = 0; i < dim; ++i) g(i) = rng.normal();
    const double norm = g.norm();
    const double r = radius * std::pow(rng.uniform_pos(), 1.0 / dim);
    return g * (r / (norm > 0.0 ? norm : 1.0));
}

static Mat spectral_sample(const BallSpec& spec, RandomStream& rng, bool low_rank) {
    const int n = spec.n_dim;
    StiefelPoint u = haar_stiefel_from(rng, n, n);
    StiefelPoint v = haar_stiefel_from(rng, n, n);
    int rank = n;
    if (low_rank) {
        rank = 1 + static_cast<int>(rng.uniform() * n);
        rank = std::min(rank, n);
    }
    Vec sigma = Vec::Zero(n);
    for (int i = 0; i < rank; ++i) sigma(i) = std::abs(rng.normal());
    const double norm = lp_norm(sigma, spec.p);
    const double radius = std::pow(rng.uniform_pos(), 1.0 / n);
    if (norm > 0.0) sigma *= radius / norm;
    std::sort(sigma.data(), sigma.data() + n, std::greater<double>());
    return u.u * sigma.asDiagonal() * v.u.transpose();
}

Mat sample_schatten_ball(const BallSpec& spec, BallSampleMode mode, const StreamKey& stream,
                         RejectionStats* stats, long rejection_budget) {
    RandomStream rng(stream);
    const int n = spec.n_dim;
    switch (mode) {
        case BallSampleMode::spectral:
            return spectral_sample(spec, rng, /*low_rank=*/false);
        case BallSampleMode::low_rank:
            return spectral_sample(spec, rng, /*low_rank=*/true);
        case BallSampleMode::rejection:
            break;
    }
    if (n > kRejectionMaxDim) {
        throw invalid_input("sample_schatten_ball: rejection mode requires n_dim <= 6");
    }
    const double radius = enclosing_frobenius_radius(spec);
    const int dim = n * n;
    RejectionStats local;
    RejectionStats& st = stats != nullptr ? *stats : local;
    for (long t = 0; t < rejection_budget; ++t) {
        ++st.proposals;
        const Vec x = uniform_euclidean_ball(dim, radius, rng);
        Mat a = Eigen::Map<const Mat>(x.data(), n, n);
        if (schatten_norm(a, spec.p) <= 1.0) {
            ++st.accepted;
            return a;
        }
    }
    std::ostringstream msg;
    msg << "sample_schatten_ball: rejection budget of " << rejection_budget
        << " proposals exhausted (acceptance rate so far " << st.acceptance_rate() << ")";
    throw budget_exhausted(msg.str());
}

}  // namespace schatten_lab
