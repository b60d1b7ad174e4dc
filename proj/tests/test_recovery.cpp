#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "schatten_lab/recovery.hpp"
#include "schatten_lab/sampling.hpp"

using namespace schatten_lab;

TEST_CASE("information map apply/adjoint duality") {
    const InformationMap map = make_information_map(4, 6, StreamKey{1, 0});
    CHECK(map.m() == 6);
    CHECK(map.n_dim == 4);
    // <A(X), y> = <X, A*(y)> under the Frobenius pairing
    const Mat x = gaussian_matrix(4, 4, StreamKey{1, 1});
    RandomStream rng(StreamKey{1, 2});
    Vec y(6);
    for (int i = 0; i < 6; ++i) y(i) = rng.normal();
    const double lhs = map.apply(x).dot(y);
    const double rhs = (x.array() * map.adjoint(y).array()).sum();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    // determinism
    const InformationMap again = make_information_map(4, 6, StreamKey{1, 0});
    CHECK(map.sensors[0] == again.sensors[0]);
    // variance scaling: mean squared entry about 1/m
    double ms = 0.0;
    for (const Mat& s : map.sensors) ms += s.squaredNorm();
    ms /= 6.0 * 16.0;
    CHECK(ms == doctest::Approx(1.0 / 6.0).epsilon(0.5));
}

TEST_CASE("basis information map recovers exactly") {
    const InformationMap map = make_basis_information_map(3);
    CHECK(map.m() == 9);
    const Mat x = gaussian_matrix(3, 3, StreamKey{2, 0});
    const Vec y = map.apply(x);
    // A is the identity on entries, so one full-rank IHT step lands on x.
    const Mat rec = iht_recover(y, map, 3, 5, 1.0);
    CHECK((rec - x).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("iht recovers a rank-1 instance at m = 96, N = 16") {
    const int N = 16, m = 96;
    int successes = 0;
    const int trials = 50;
    for (int t = 0; t < trials; ++t) {
        const InformationMap map =
            make_information_map(N, m, StreamKey{3, static_cast<std::uint64_t>(t)});
        const Mat u = haar_stiefel(N, 1, StreamKey{4, static_cast<std::uint64_t>(t)}).u;
        const Mat v = haar_stiefel(N, 1, StreamKey{5, static_cast<std::uint64_t>(t)}).u;
        const Mat x = u * v.transpose();
        IhtOptions opts;
        opts.iters = 300;
        const Mat rec = iht_recover_backtracking(map.apply(x), map, 1, opts);
        if (schatten_norm(rec - x, Exponent(2)) < 1e-3) ++successes;
    }
    CHECK(successes >= 45);  // >= 90%
}

TEST_CASE("iht divergence carries a residual trace") {
    const InformationMap map = make_information_map(4, 8, StreamKey{6, 0});
    const Mat x = gaussian_matrix(4, 4, StreamKey{6, 1});
    bool threw = false;
    try {
        iht_recover(map.apply(x), map, 4, 200, 50.0);  // absurd step
    } catch (const diverged& e) {
        threw = true;
        CHECK(std::string(e.what()).find("residual") != std::string::npos);
    }
    CHECK(threw);
    // backtracking survives the same configuration by halving the step
    IhtOptions opts;
    opts.step = 8.0;  // six halvings reach a stable 0.125
    opts.iters = 200;
    CHECK_NOTHROW(iht_recover_backtracking(map.apply(x), map, 4, opts));
}

TEST_CASE("recovery_theory_lower values") {
    CHECK(recovery_theory_lower(16, 64, Exponent(1), Exponent(2)) == doctest::Approx(0.5));
    CHECK(recovery_theory_lower(16, 16, Exponent(1), Exponent(2)) == doctest::Approx(1.0));
    CHECK(recovery_theory_lower(16, 8, Exponent(1), Exponent(2)) == doctest::Approx(1.0));
    CHECK(recovery_theory_lower(4, 8, Exponent(1), Exponent::infinity()) == doctest::Approx(0.5));
    CHECK(recovery_theory_lower(4, 16, Exponent(2), Exponent(2)) == doctest::Approx(1.0));
}

TEST_CASE("em_experiment consistency sweep") {
    EmOptions opts;
    opts.threads = 4;
    const RecoveryReport rep =
        em_experiment(8, {8, 16, 32, 64}, Exponent(1), Exponent(2), 4, StreamKey{7, 0}, opts);
    REQUIRE(rep.rows.size() == 4);
    for (const RecoveryRow& row : rep.rows) {
        CHECK(row.theory_lower ==
              doctest::Approx(recovery_theory_lower(8, row.m, Exponent(1), Exponent(2))));
        // one-sided consistency: the observed worst error is an upper bound
        // for one (A, Delta) pair, so it must not sit far below the lower
        // bound on the optimum.
        CHECK(row.worst_error >= 0.1 * row.theory_lower);
        CHECK(std::isfinite(row.worst_error));
    }

    CHECK_THROWS_AS(
        em_experiment(4, {20}, Exponent(1), Exponent(2), 2, StreamKey{7, 1}, opts),
        invalid_input);  // m > N^2
    CHECK_THROWS_AS(
        em_experiment(4, {4}, Exponent(2), Exponent(1), 2, StreamKey{7, 2}, opts),
        invalid_input);  // needs p <= q
}

TEST_CASE("em_experiment basis override at m = N^2") {
    EmOptions opts;
    opts.basis_override_at_full_m = true;
    opts.threads = 2;
    const RecoveryReport rep =
        em_experiment(4, {16}, Exponent(1), Exponent(2), 3, StreamKey{8, 0}, opts);
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0].worst_error <= 1e-10);
}
