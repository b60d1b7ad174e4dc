#include "schatten_lab/metric.hpp"

namespace schatten_lab {

double MetricSpec::distance(const Mat& a, const Mat& b) const {
    switch (kind) {
        case Kind::euclidean_vector: {
            Vec d = (a - b).reshaped();
            return lp_norm(d, q);
        }
        case Kind::operator_norm: {
            if (a.cols() == 1) return (a - b).norm();
            return operator_norm(a - b);
        }
        case Kind::schatten: {
            if (q.value() == 2.0) return (a - b).norm();
            return schatten_norm(a - b, q);
        }
    }
    throw invalid_input("MetricSpec: unknown kind");
}

double grassmann_distance_frames(const Mat& fa, const Mat& fb, const Exponent& q) {
    const Vec cosines = singular_values(fa.transpose() * fb);
    if (q.is_inf()) {
        const double c = std::min(1.0, std::max(0.0, cosines(cosines.size() - 1)));
        return std::sqrt(1.0 - c * c);
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < cosines.size(); ++i) {
        const double c = std::min(1.0, std::max(0.0, cosines(i)));
        acc += std::pow(std::sqrt(1.0 - c * c), q.value());
    }
    return std::pow(2.0 * acc, q.inv());
}

const char* MetricSpec::kind_name() const {
    switch (kind) {
        case Kind::schatten: return "schatten";
        case Kind::operator_norm: return "operator";
        case Kind::euclidean_vector: return "euclidean_vector";
    }
    return "?";
}

}  // namespace schatten_lab
