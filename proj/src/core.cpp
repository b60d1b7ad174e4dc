#include "schatten_lab/core.hpp"

#include <Eigen/SVD>
#include <sstream>

namespace schatten_lab {

void check_finite(const Mat& a, const char* what) {
    if (!a.allFinite()) {
        throw invalid_input(std::string(what) + ": matrix has non-finite entries");
    }
}

SvdFactors svd(const Mat& a) {
    check_finite(a, "svd");
    Eigen::JacobiSVD<Mat> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "svd: solver failed on " << a.rows() << "x" << a.cols()
            << " matrix, |A|_F = " << a.norm();
        throw numeric_failure(msg.str());
    }
    return SvdFactors{solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

Vec singular_values(const Mat& a) {
    check_finite(a, "singular_values");
    Eigen::JacobiSVD<Mat> solver(a);
    if (solver.info() != Eigen::Success) {
        throw numeric_failure("singular_values: solver failed");
    }
    return solver.singularValues();
}

int numerical_rank(const Vec& sigma) {
    if (sigma.size() == 0) return 0;
    const double cutoff = kRankTol * sigma(0);
    int rank = 0;
    for (Eigen::Index j = 0; j < sigma.size(); ++j) {
        if (sigma(j) > cutoff) ++rank;
    }
    return rank;
}

double lp_norm(const Vec& x, const Exponent& p) {
    if (p.is_inf()) {
        return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
    }
    const double pv = p.value();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        acc += std::pow(std::abs(x(i)), pv);
    }
    return std::pow(acc, 1.0 / pv);
}

double schatten_norm(const Mat& a, const Exponent& p) {
    if (a.rows() != a.cols()) throw invalid_input("schatten_norm: matrix must be square");
    if (p.value() == 2.0) {
        check_finite(a, "schatten_norm");
        return a.norm();  // Frobenius equals the singular-value l_2 norm
    }
    return lp_norm(singular_values(a), p);
}

double operator_norm(const Mat& a) {
    check_finite(a, "operator_norm");
    return singular_values(a)(0);
}

double theory_rate(const RateQuery& query) {
    const double ip = query.p.inv();
    const double iq = query.q.inv();
    const double n = static_cast<double>(query.entropy_index);
    const double N = static_cast<double>(query.n_dim);
    const double nsq = N * N;
    const double decay = std::exp2(-n / nsq) * std::pow(N, iq - ip);
    if (query.q <= query.p) return decay;
    if (n <= N) return 1.0;
    if (n <= nsq) return std::pow(N / n, ip - iq);
    return decay;
}

}  // namespace schatten_lab
