#include <doctest.h>

#include <random>

#include "test_helpers.hpp"
#include "topopt/projection.hpp"

using namespace topopt;
using testing::random_instance;

namespace {

DesignField field_with(std::initializer_list<double> rho, double v = 1.0) {
    DesignField field;
    field.rho = Eigen::VectorXd(static_cast<Eigen::Index>(rho.size()));
    int i = 0;
    for (double r : rho) field.rho[i++] = r;
    field.rho_min = 1e-3;
    field.elem_volumes = Eigen::VectorXd::Constant(field.rho.size(), v);
    field.volume_target = field.volume();
    return field;
}

Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    int i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

}  // namespace

TEST_CASE("single uniform constraint: the multiplier is the gradient mean") {
    Eigen::MatrixXd H(1, 3);
    H << 1, 1, 1;
    const Eigen::VectorXd lambda = hestenes_multipliers(vec({1, 2, 3}), H);
    REQUIRE(lambda.size() == 1);
    CHECK(lambda[0] == doctest::Approx(2.0).epsilon(1e-15));

    const Eigen::VectorXd d = projected_gradient(vec({1, 2, 3}), H, lambda);
    CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(d[1]) <= 1e-14);
    CHECK(d[2] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("collinear gradient gives the proportionality factor and d = 0") {
    Eigen::MatrixXd H(1, 4);
    H << 2, -1, 3, 0.5;
    const double factor = -1.7;
    const Eigen::VectorXd grad_f = factor * H.row(0).transpose();
    const Eigen::VectorXd lambda = hestenes_multipliers(grad_f, H);
    CHECK(lambda[0] == doctest::Approx(factor).epsilon(1e-14));
    const Eigen::VectorXd d = projected_gradient(grad_f, H, lambda);
    CHECK(d.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("bound-constraint row zeroes that component of d") {
    // grad h = e_1: the orthogonality condition forces d_1 = 0 and the
    // multiplier equals that gradient component (minus nothing else here).
    Eigen::MatrixXd H(1, 3);
    H << 0, 1, 0;
    const Eigen::VectorXd grad_f = vec({4, -7, 2});
    const Eigen::VectorXd lambda = hestenes_multipliers(grad_f, H);
    CHECK(lambda[0] == doctest::Approx(-7.0));
    const Eigen::VectorXd d = projected_gradient(grad_f, H, lambda);
    CHECK(d[1] == 0.0);
}

TEST_CASE("rank-deficient H is rejected with the dependent rows named") {
    Eigen::MatrixXd H(3, 4);
    H.row(0) = vec({1, 1, 1, 1}).transpose();
    H.row(1) = vec({0, 1, 0, 0}).transpose();
    H.row(2) = vec({2, 2, 2, 2}).transpose();  // duplicate of row 0
    CHECK_THROWS_AS(hestenes_multipliers(vec({1, 2, 3, 4}), H), DegeneracyError);
    try {
        hestenes_multipliers(vec({1, 2, 3, 4}), H);
    } catch (const DegeneracyError& err) {
        CHECK(std::string(err.what()).find("dependent rows") != std::string::npos);
    }
    CHECK_THROWS_AS(least_squares_multipliers(vec({1, 2, 3, 4}), H), DegeneracyError);
}

TEST_CASE("hestenes and least-squares multipliers coincide (normal equations vs QR)") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 5 + static_cast<int>(rng() % 46);
        const int s = 1 + static_cast<int>(rng() % std::min(10, n - 1));
        Eigen::VectorXd grad_f;
        Eigen::MatrixXd H;
        random_instance(rng, n, s, grad_f, H);
        const Eigen::VectorXd l1 = hestenes_multipliers(grad_f, H);
        const Eigen::VectorXd l2 = least_squares_multipliers(grad_f, H);
        CHECK((l1 - l2).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, l1.cwiseAbs().maxCoeff()));
    }
    CHECK(least_squares_multipliers(Eigen::VectorXd::Zero(4),
                                    Eigen::MatrixXd::Identity(2, 4))
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("projected direction is orthogonal to constraints and a descent direction") {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 8 + static_cast<int>(rng() % 20);
        const int s = 1 + static_cast<int>(rng() % 5);
        Eigen::VectorXd grad_f;
        Eigen::MatrixXd H;
        random_instance(rng, n, s, grad_f, H);
        const Eigen::VectorXd lambda = hestenes_multipliers(grad_f, H);
        const Eigen::VectorXd d = projected_gradient(grad_f, H, lambda);

        for (int k = 0; k < s; ++k) {
            const double dot = std::abs(d.dot(H.row(k).transpose()));
            CHECK(dot <= 1e-9 * std::max(1e-30, d.norm() * H.row(k).norm()));
        }
        CHECK(grad_f.dot(d) == doctest::Approx(-d.squaredNorm()).epsilon(1e-12));
    }
}

TEST_CASE("volume constraint gradient is the element volumes") {
    auto field = field_with({0.4, 0.5, 0.6}, 2.5);
    CHECK((volume_constraint_gradient(field) - field.elem_volumes).norm() == 0.0);

    field.elem_volumes = vec({1.0, 2.0, 3.0});
    CHECK((volume_constraint_gradient(field) - field.elem_volumes).norm() == 0.0);

    // linear constraint: a finite step along any tangent direction keeps
    // the volume (up to round-off)
    const Eigen::VectorXd g = vec({-3.0, -1.0, -2.0});
    const ProjectionState state = active_set_update(field, g);
    const double before = field.rho.dot(field.elem_volumes);
    const Eigen::VectorXd stepped = field.rho + 0.37 * state.direction.d;
    CHECK(stepped.dot(field.elem_volumes) == doctest::Approx(before).epsilon(1e-13));
}

TEST_CASE("kkt residual is the max norm and zero at the optimum") {
    CHECK(kkt_residual(Eigen::VectorXd::Zero(5)) == 0.0);
    CHECK(kkt_residual(vec({0.5, -2.0, 1.0})) == 2.0);
    CHECK(kkt_residual(Eigen::VectorXd()) == 0.0);
}

TEST_CASE("interior design activates only the volume constraint") {
    const auto field = field_with({0.4, 0.6, 0.5});
    const ProjectionState state = active_set_update(field, vec({-1.0, -2.0, -3.0}));
    CHECK(state.active_set.volume_active);
    CHECK(state.active_set.lower_active.empty());
    CHECK(state.active_set.upper_active.empty());
}

TEST_CASE("bound at rho_min with outward pull joins the active set; inward pull stays free") {
    // volumes 1, lambda_v is the free-set mean of the gradient
    auto field = field_with({1e-3, 0.5, 0.5});

    // gradient component at the bound far above the mean: c_0 < 0, exits the box
    {
        const ProjectionState state = active_set_update(field, vec({-0.1, -2.0, -2.0}));
        CHECK(state.active_set.lower_active == std::vector<int>{0});
        CHECK(state.direction.d[0] == 0.0);
        // Hestenes multiplier of the bound equals the eliminated component
        const double c0 = -(-0.1) + state.multipliers.lambda_volume * 1.0;
        CHECK(state.multipliers.lambda_bounds.at(0) == doctest::Approx(c0));
    }
    // gradient steepest at the bound: direction pulls inward, element stays free
    {
        const ProjectionState state = active_set_update(field, vec({-5.0, -2.0, -2.0}));
        CHECK(state.active_set.lower_active.empty());
        CHECK(state.direction.d[0] > 0.0);
    }
}

TEST_CASE("active-set stabilization agrees with brute-force enumeration") {
    // Exhaustive check on small instances: a configuration is stable when
    // every contact element satisfies the add/drop truth table. The
    // stabilized set must be one of the stable configurations.
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> gdist(-3.0, -0.1);
    std::uniform_real_distribution<double> vdist(0.5, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 4;
        DesignField field;
        field.rho = Eigen::VectorXd(n);
        field.rho_min = 1e-3;
        field.elem_volumes = Eigen::VectorXd(n);
        Eigen::VectorXd g(n);
        std::vector<int> contacts;
        for (int e = 0; e < n; ++e) {
            const int kind = static_cast<int>(rng() % 3);
            field.rho[e] = (kind == 0) ? 1e-3 : (kind == 1 ? 1.0 : 0.5);
            if (kind != 2) contacts.push_back(e);
            field.elem_volumes[e] = vdist(rng);
            g[e] = gdist(rng);
        }
        field.volume_target = field.volume();
        if (static_cast<int>(contacts.size()) == n) continue;  // keep one free element

        std::vector<ActiveSet> stable;
        const int m = static_cast<int>(contacts.size());
        for (int bits = 0; bits < (1 << m); ++bits) {
            ActiveSet aset;
            for (int c = 0; c < m; ++c) {
                if (!(bits & (1 << c))) continue;
                const int e = contacts[static_cast<size_t>(c)];
                if (field.rho[e] == field.rho_min)
                    aset.lower_active.push_back(e);
                else
                    aset.upper_active.push_back(e);
            }
            ProjectionState state;
            try {
                state = project_on_active_set(field, g, aset);
            } catch (const DegeneracyError&) {
                continue;
            }
            bool ok = true;
            for (int c = 0; c < m && ok; ++c) {
                const int e = contacts[static_cast<size_t>(c)];
                const double comp =
                    -g[e] + state.multipliers.lambda_volume * field.elem_volumes[e];
                const bool active = (bits & (1 << c)) != 0;
                if (field.rho[e] == field.rho_min)
                    ok = active ? (comp <= 0.0) : (comp >= 0.0);
                else
                    ok = active ? (comp >= 0.0) : (comp <= 0.0);
            }
            if (ok) stable.push_back(aset);
        }
        REQUIRE(!stable.empty());

        const ProjectionState found = active_set_update(field, g);
        bool matched = false;
        for (const auto& aset : stable)
            matched = matched || (aset.lower_active == found.active_set.lower_active &&
                                  aset.upper_active == found.active_set.upper_active);
        CHECK(matched);
    }
}

TEST_CASE("structured projection equals the dense route") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> gdist(-4.0, 4.0);
    std::uniform_real_distribution<double> vdist(0.5, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 6;
        DesignField field;
        field.rho = Eigen::VectorXd(n);
        field.elem_volumes = Eigen::VectorXd(n);
        field.rho_min = 1e-3;
        Eigen::VectorXd g(n);
        for (int e = 0; e < n; ++e) {
            const int kind = static_cast<int>(rng() % 4);
            field.rho[e] = (kind == 0) ? 1e-3 : (kind == 1 ? 1.0 : 0.5);
            field.elem_volumes[e] = vdist(rng);
            g[e] = gdist(rng);
        }
        field.volume_target = field.volume();

        ProjectionState state;
        try {
            state = active_set_update(field, g);
        } catch (const DegeneracyError&) {
            continue;
        }

        const Eigen::MatrixXd H = active_constraint_matrix(field, state.active_set);
        const Eigen::VectorXd lambda_dense = hestenes_multipliers(g, H);
        const Eigen::VectorXd lambda_structured = multiplier_vector(state);
        CHECK((lambda_dense - lambda_structured).cwiseAbs().maxCoeff() <=
              1e-12 * std::max(1.0, lambda_dense.cwiseAbs().maxCoeff()));

        const Eigen::VectorXd d_dense = projected_gradient(g, H, lambda_dense);
        CHECK((d_dense - state.direction.d).cwiseAbs().maxCoeff() <=
              1e-12 * std::max(1.0, d_dense.cwiseAbs().maxCoeff()));

        // ProjectedDirection invariants
        for (int e : state.active_set.lower_active) CHECK(state.direction.d[e] == 0.0);
        for (int e : state.active_set.upper_active) CHECK(state.direction.d[e] == 0.0);
        CHECK(g.dot(state.direction.d) ==
              doctest::Approx(-state.direction.d.squaredNorm()).epsilon(1e-12));
        for (Eigen::Index k = 0; k < H.rows(); ++k) {
            const double dot = std::abs(state.direction.d.dot(H.row(k).transpose()));
            CHECK(dot <= 1e-9 * std::max(1e-30, state.direction.d.norm() * H.row(k).norm()));
        }
    }
}

TEST_CASE("all elements at bounds makes the volume row dependent") {
    auto field = field_with({1e-3, 1.0});
    ActiveSet aset;
    aset.lower_active = {0};
    aset.upper_active = {1};
    CHECK_THROWS_AS(project_on_active_set(field, vec({-1.0, -2.0}), aset), DegeneracyError);
}

TEST_CASE("active set validation") {
    const auto field = field_with({1e-3, 0.5, 1.0});
    ActiveSet both;
    both.lower_active = {0};
    both.upper_active = {0};
    CHECK_THROWS_AS(both.validate(field), DegeneracyError);

    ActiveSet off_bound;
    off_bound.lower_active = {1};
    CHECK_THROWS_AS(off_bound.validate(field), ParameterError);

    ActiveSet fine;
    fine.lower_active = {0};
    fine.upper_active = {2};
    CHECK_NOTHROW(fine.validate(field));
}

TEST_CASE("tangent uniqueness probe") {
    SUBCASE("zero-dimensional tangent space is vacuous") {
        const Eigen::MatrixXd H = Eigen::MatrixXd::Identity(3, 3);
        CHECK(tangent_uniqueness_probe(vec({1, 2, 3}), H, Eigen::VectorXd::Zero(3), 10, 1) == 0.0);
    }
    SUBCASE("paper example: any tangent r orthogonal to d has grad_f . r = 0") {
        Eigen::MatrixXd H(1, 3);
        H << 1, 1, 1;
        const Eigen::VectorXd grad_f = vec({1, 2, 3});
        const Eigen::VectorXd d = vec({1, 0, -1});
        CHECK(tangent_uniqueness_probe(grad_f, H, d, 100, 42) <= 1e-12);
    }
    SUBCASE("20-dimensional random instances stay below 1e-10") {
        std::mt19937_64 rng(505);
        Eigen::VectorXd grad_f;
        Eigen::MatrixXd H;
        random_instance(rng, 20, 4, grad_f, H);
        const Eigen::VectorXd lambda = hestenes_multipliers(grad_f, H);
        const Eigen::VectorXd d = projected_gradient(grad_f, H, lambda);
        CHECK(tangent_uniqueness_probe(grad_f, H, d, 100, 7) <= 1e-10);
    }
}

TEST_CASE("venkayya multipliers") {
    SUBCASE("expanded and compact forms agree on a random 3-variable instance") {
        std::mt19937_64 rng(606);
        Eigen::VectorXd grad_f;
        Eigen::MatrixXd H;
        random_instance(rng, 3, 2, grad_f, H);
        for (int i = 0; i < 3; ++i)
            if (std::abs(grad_f[i]) < 0.1) grad_f[i] = 0.5;  // keep the scaling well-defined
        const Eigen::VectorXd x = vec({0.7, 1.3, 2.1});
        const Eigen::VectorXd le = venkayya_multipliers(grad_f, H, x, VenkayyaForm::expanded);
        const Eigen::VectorXd lc = venkayya_multipliers(grad_f, H, x, VenkayyaForm::compact);
        CHECK((le - lc).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, le.cwiseAbs().maxCoeff()));
    }
    SUBCASE("uniform design vector and gradient reduce to the Hestenes multipliers") {
        std::mt19937_64 rng(707);
        Eigen::VectorXd ignored;
        Eigen::MatrixXd H;
        random_instance(rng, 6, 2, ignored, H);
        const Eigen::VectorXd grad_f = Eigen::VectorXd::Constant(6, -1.7);
        const Eigen::VectorXd x = Eigen::VectorXd::Constant(6, 0.4);
        const Eigen::VectorXd lv = venkayya_multipliers(grad_f, H, x, VenkayyaForm::expanded);
        const Eigen::VectorXd lh = hestenes_multipliers(grad_f, H);
        CHECK((lv - lh).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, lh.cwiseAbs().maxCoeff()));
    }
    SUBCASE("uniform single-constraint case gives the mean") {
        Eigen::MatrixXd H(1, 3);
        H << 1, 1, 1;
        const Eigen::VectorXd lambda =
            venkayya_multipliers(vec({2, 2, 2}), H, vec({1, 1, 1}), VenkayyaForm::expanded);
        CHECK(lambda[0] == doctest::Approx(2.0).epsilon(1e-14));
    }
    SUBCASE("zero gradient component is a scaling error") {
        Eigen::MatrixXd H(1, 3);
        H << 1, 1, 1;
        CHECK_THROWS_AS(venkayya_multipliers(vec({1, 0, 2}), H, vec({1, 1, 1}),
                                             VenkayyaForm::expanded),
                        ScalingError);
        CHECK_THROWS_AS(venkayya_multipliers(vec({1, 1, 2}), H, vec({1, -1, 1}),
                                             VenkayyaForm::expanded),
                        ScalingError);
    }
}

TEST_CASE("weighted orthogonality residual") {
    std::mt19937_64 rng(808);
    Eigen::VectorXd grad_f;
    Eigen::MatrixXd H;
    random_instance(rng, 8, 3, grad_f, H);
    for (int i = 0; i < 8; ++i)
        if (std::abs(grad_f[i]) < 0.1) grad_f[i] = -0.4;
    Eigen::VectorXd x(8);
    for (int i = 0; i < 8; ++i) x[i] = 0.3 + 0.2 * i;

    SUBCASE("uniform x reduces to the plain orthogonality residual") {
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(8);
        const Eigen::VectorXd lambda = hestenes_multipliers(grad_f, H);
        const double weighted = weighted_orthogonality_residual(grad_f, H, ones, lambda);
        const double plain =
            (H * (-grad_f + H.transpose() * lambda)).lpNorm<Eigen::Infinity>();
        CHECK(weighted == doctest::Approx(plain).epsilon(1e-14));
        CHECK(weighted <= 1e-12);
    }
    SUBCASE("multipliers of the scaled system zero the residual") {
        const Eigen::VectorXd lambda =
            venkayya_multipliers(grad_f, H, x, VenkayyaForm::scaled_kkt);
        CHECK(weighted_orthogonality_residual(grad_f, H, x, lambda) <= 1e-10);
    }
    SUBCASE("the residual grows linearly in a multiplier perturbation") {
        const Eigen::VectorXd lambda =
            venkayya_multipliers(grad_f, H, x, VenkayyaForm::scaled_kkt);
        Eigen::VectorXd delta(3);
        delta << 0.3, -0.2, 0.5;
        const double r1 = weighted_orthogonality_residual(grad_f, H, x, lambda + delta);
        const double r2 = weighted_orthogonality_residual(grad_f, H, x, lambda + 2.0 * delta);
        CHECK(r2 == doctest::Approx(2.0 * r1).epsilon(1e-9));
    }
}
