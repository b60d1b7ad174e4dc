#pragma once

#include <vector>

#include "schatten_lab/core.hpp"
#include "schatten_lab/rng.hpp"

namespace schatten_lab {

// Linear measurement A(X) = (<A_1,X>, ..., <A_m,X>) under Frobenius pairing.
struct InformationMap {
    std::vector<Mat> sensors;  // m matrices, N x N
    int n_dim = 0;

    int m() const { return static_cast<int>(sensors.size()); }
    Vec apply(const Mat& x) const;
    Mat adjoint(const Vec& y) const;
};

// m i.i.d. Gaussian sensors with entry variance 1/m, so A*A ~ identity in
// expectation and unit step sizes are stable.
InformationMap make_information_map(int n_dim, int m, const StreamKey& stream);

// Test override: the N^2 unscaled standard basis matrices; A is then the
// identity on entries and recovery is exact in one step.
InformationMap make_basis_information_map(int n_dim);

struct IhtOptions {
    int iters = 300;
    double step = 1.0;
    // Residual growth over this many consecutive iterations counts as
    // divergence; the experiment driver then halves the step and retries.
    int divergence_window = 10;
    int max_backtracks = 6;
};

// Iterative hard thresholding from X = 0:
//   X <- H_rank(X + step * A*(y - A(X))).
// Throws `diverged` (carrying the residual trace) on sustained growth.
Mat iht_recover(const Vec& y, const InformationMap& map, int rank, int iters, double step,
                int divergence_window = 10);

// iht_recover with step halving on divergence.
Mat iht_recover_backtracking(const Vec& y, const InformationMap& map, int rank,
                             const IhtOptions& opts);

struct RecoveryRow {
    int m = 0;
    double worst_error = 0.0;  // worst S_q error over the instance pool
    double theory_lower = 0.0;  // min{1, N/m}^{1/p - 1/q}
};

struct RecoveryReport {
    int n_dim;
    Exponent p, q;
    std::vector<RecoveryRow> rows;
    // The observed error bounds one specific (A, Delta) pair from above; the
    // theory value lower-bounds the infimum over all pairs, so consistency is
    // one-sided and tightness is never certified.
};

double recovery_theory_lower(int n_dim, int m, const Exponent& p, const Exponent& q);

struct EmOptions {
    IhtOptions iht;
    int recovery_rank = 4;
    // Swaps in the basis sensors (and full recovery rank) at m = N^2; used by
    // the exact-recovery check, not by the consistency sweep.
    bool basis_override_at_full_m = false;
    int threads = 1;
};

// Worst-case S_q recovery error over `trials` boundary instances of B_p^N
// (equal-spectrum rank 1/2/4 and flat), per m in the grid.
RecoveryReport em_experiment(int n_dim, const std::vector<int>& m_grid, const Exponent& p,
                             const Exponent& q, int trials, const StreamKey& stream,
                             const EmOptions& opts = {});

}  // namespace schatten_lab
