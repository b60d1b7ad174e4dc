#pragma once

#include "schatten_lab/core.hpp"

namespace schatten_lab {

// Distance used by nets and packings. euclidean_vector treats points as
// column vectors under the l_q (quasi-)norm; the other two act on matrices.
struct MetricSpec {
    enum class Kind { schatten, operator_norm, euclidean_vector };

    Kind kind;
    Exponent q;  // norm exponent; unused for operator_norm

    static MetricSpec schatten(Exponent q) { return MetricSpec{Kind::schatten, q}; }
    static MetricSpec op() { return MetricSpec{Kind::operator_norm, Exponent::infinity()}; }
    static MetricSpec vector(Exponent q) { return MetricSpec{Kind::euclidean_vector, q}; }

    double distance(const Mat& a, const Mat& b) const;

    // Triangle-inequality exponent of the declared norm (1 for operator).
    double qbar() const { return kind == Kind::operator_norm ? 1.0 : q.bar(); }

    const char* kind_name() const;
};

// |P_E - P_F|_{S_q} computed from orthonormal frames through the principal
// angles (singular values of fa^T fb): the difference has each sine twice,
// so the norm is (2 sum_i sin^q t_i)^{1/q}, or max sin t_i for q = infinity.
// Valid for equal-rank subspaces with k <= N/2.
double grassmann_distance_frames(const Mat& fa, const Mat& fb, const Exponent& q);


}  // namespace schatten_lab
