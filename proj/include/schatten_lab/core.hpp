#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "schatten_lab/errors.hpp"

namespace schatten_lab {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Exponent of an l_p / Schatten-p (quasi-)norm. p = infinity is the IEEE
// infinity, never a large float; inv() is then exactly 0.
class Exponent {
  public:
    explicit Exponent(double value) : value_(value) {
        if (!(value > 0.0)) throw invalid_input("Exponent must be positive");
    }
    static Exponent infinity() { return Exponent(std::numeric_limits<double>::infinity()); }

    double value() const { return value_; }
    bool is_inf() const { return std::isinf(value_); }
    // 1/p, with 1/inf == 0 exactly.
    double inv() const { return is_inf() ? 0.0 : 1.0 / value_; }
    // min(1, p), the triangle-inequality exponent.
    double bar() const { return value_ < 1.0 ? value_ : 1.0; }

    friend bool operator==(const Exponent& a, const Exponent& b) { return a.value_ == b.value_; }
    friend bool operator<=(const Exponent& a, const Exponent& b) { return a.value_ <= b.value_; }

  private:
    double value_;
};

struct SvdFactors {
    Mat u;
    Vec sigma;  // non-increasing, >= 0
    Mat v;      // a = u * sigma.asDiagonal() * v^T
};

struct BallSpec {
    int n_dim;
    Exponent p;
    BallSpec(int n_dim_, Exponent p_) : n_dim(n_dim_), p(p_) {
        if (n_dim < 1) throw invalid_input("BallSpec: n_dim must be >= 1");
    }
};

struct RateQuery {
    Exponent p;
    Exponent q;
    long entropy_index;  // n
    int n_dim;           // N
    RateQuery(Exponent p_, Exponent q_, long n, int N)
        : p(p_), q(q_), entropy_index(n), n_dim(N) {
        if (n < 1) throw invalid_input("RateQuery: entropy_index must be >= 1");
        if (N < 1) throw invalid_input("RateQuery: n_dim must be >= 1");
    }
};

// Tolerance shared by the rank-sensitive decompositions: sigma_j counts
// towards the rank iff sigma_j > rank_tol * sigma_1.
inline constexpr double kRankTol = 1e-9;

void check_finite(const Mat& a, const char* what);

SvdFactors svd(const Mat& a);

// Singular values only (non-increasing).
Vec singular_values(const Mat& a);

int numerical_rank(const Vec& sigma);

// l_p (quasi-)norm of a vector, p = infinity gives the max-abs entry.
double lp_norm(const Vec& x, const Exponent& p);

double schatten_norm(const Mat& a, const Exponent& p);

// Operator norm (largest singular value).
double operator_norm(const Mat& a);

// Three-regime rate of the entropy numbers e_n(S_p^N -> S_q^N), constant 1.
// On [N, N^2] the middle branch wins; at n = N^2 the adjacent branches differ
// by exactly a factor of 2.
double theory_rate(const RateQuery& query);

}  // namespace schatten_lab
