#pragma once

#include "schatten_lab/core.hpp"
#include "schatten_lab/rng.hpp"

namespace schatten_lab {

// N x k matrix with orthonormal columns (u^T u = I_k to 1e-12).
struct StiefelPoint {
    Mat u;
    int n_dim() const { return static_cast<int>(u.rows()); }
    int k() const { return static_cast<int>(u.cols()); }
    // dim V_K^N = K(N - (K+1)/2)
    double manifold_dim() const { return k() * (n_dim() - (k() + 1) / 2.0); }
};

// Rank-k orthogonal projection, the projection model of G_{N,k}.
struct GrassmannPoint {
    Mat projection;  // N x N, symmetric, idempotent, trace k
    Mat frame;       // N x k orthonormal basis of the range, projection = frame * frame^T
    int k() const { return static_cast<int>(frame.cols()); }
};

Mat gaussian_matrix(int n_rows, int n_cols, const StreamKey& stream);

// Haar distributed via QR of a Gaussian matrix with the R diagonal forced
// positive (unfixed QR is not Haar).
StiefelPoint haar_stiefel(int n_dim, int k, const StreamKey& stream);

// Sequential variant drawing from an already-open stream.
Mat haar_stiefel_from_stream(RandomStream& rng, int n_dim, int k);

GrassmannPoint haar_grassmann(int n_dim, int k, const StreamKey& stream);

enum class BallSampleMode { rejection, spectral, low_rank };

// Frobenius radius of the smallest ball of the form r*B_2 known to contain
// B_p^N: r = N^{max(0, 1/2 - 1/p)}.
double enclosing_frobenius_radius(const BallSpec& spec);

struct RejectionStats {
    long proposals = 0;
    long accepted = 0;
    double acceptance_rate() const {
        return proposals > 0 ? static_cast<double>(accepted) / proposals : 0.0;
    }
};

inline constexpr long kDefaultRejectionBudget = 10'000'000;
inline constexpr int kRejectionMaxDim = 6;

// One point of B_p^N. Rejection mode is uniform (and restricted to N <= 6);
// spectral / low_rank are documented stress distributions, not uniform.
// Always satisfies schatten_norm(result, p) <= 1 + 1e-10.
Mat sample_schatten_ball(const BallSpec& spec, BallSampleMode mode, const StreamKey& stream,
                         RejectionStats* stats = nullptr,
                         long rejection_budget = kDefaultRejectionBudget);

// Uniform point of the Euclidean ball of the given dimension and radius,
// reshaped to n_dim x n_dim when square. Building block of the rejection
// samplers and the volume module.
Vec uniform_euclidean_ball(int dim, double radius, RandomStream& rng);

}  // namespace schatten_lab
