#include "gmreg/errors.hpp"
#include "gmreg/geomfix.hpp"
#include "gmreg/lcurve.hpp"
#include "gmreg/problem.hpp"
#include "gmreg/regularizers.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace gmreg;
namespace fs = std::filesystem;

namespace {

LCurve make_curve(const std::vector<double>& r, const std::vector<double>& s) {
    LCurve c;
    const Index n = static_cast<Index>(r.size());
    c.params.resize(n);
    c.residual_norms.resize(n);
    c.solution_norms.resize(n);
    for (Index i = 0; i < n; ++i) {
        c.params(i) = std::pow(10.0, static_cast<double>(i));
        c.residual_norms(i) = r[static_cast<std::size_t>(i)];
        c.solution_norms(i) = s[static_cast<std::size_t>(i)];
    }
    return c;
}

// default deconvolution problem shared by the sweep tests
const InverseProblem kP = simulate(SimulationConfig{});
const SingularSystem kS = svd(kP.F);

double error_minimizing_param(const LCurve& curve, SweepMethod method) {
    double best_err = 1e300, best_param = 0.0;
    for (Index i = 0; i < curve.params.size(); ++i) {
        Vector x;
        if (method == SweepMethod::tikhonov)
            x = tikhonov_solve(kS, kP.y, curve.params(i)).x;
        else
            x = closed_form_fixed_point(kS, kP.y, curve.params(i)).estimate.x;
        const double err = (x - *kP.x_true).norm();
        if (err < best_err) {
            best_err = err;
            best_param = curve.params(i);
        }
    }
    return best_param;
}

}  // namespace

TEST_CASE("corner of a right-angle polyline is its apex") {
    std::vector<double> r, s;
    for (int k = 0; k <= 10; ++k) {  // vertical arm: residual pinned
        r.push_back(1e-3);
        s.push_back(std::pow(10.0, 5.0 - 0.5 * k));
    }
    for (int k = 1; k <= 10; ++k) {  // horizontal arm: norm pinned
        r.push_back(1e-3 * std::pow(10.0, 0.4 * k));
        s.push_back(1.0);
    }
    CHECK(lcurve_corner(make_curve(r, s)) == 10);
}

TEST_CASE("corner prefers the convex bend over a sharper concave one") {
    // staircase cliff: the top bend (flat then plunge) is concave and must
    // lose to the true convex corner at the bottom
    std::vector<double> r, s;
    for (int k = 0; k < 6; ++k) {
        r.push_back(1e-3 * std::pow(10.0, 0.02 * k));  // slow drift right
        s.push_back(1e8);
    }
    r.push_back(2e-3);
    s.push_back(1.0);  // plunge
    for (int k = 1; k <= 6; ++k) {
        r.push_back(2e-3 * std::pow(10.0, 0.5 * k));
        s.push_back(1.0 / (1.0 + 0.05 * k));
    }
    const Index corner = lcurve_corner(make_curve(r, s));
    CHECK(corner == 6);  // bottom of the plunge, not index 5 at the top
}

TEST_CASE("degenerate flat curve warns instead of inventing a corner") {
    LCurve c = make_curve({1.0, 1.0, 1.0, 1.0, 1.0, 1.0},
                          {2.0, 2.0, 2.0, 2.0, 2.0, 2.0});
    const Index corner = lcurve_corner(c);
    CHECK(corner >= 0);
    CHECK(corner < c.params.size());
}

TEST_CASE("corner requires enough points and ordered parameters") {
    LCurve c = make_curve({1, 2, 3, 4}, {4, 3, 2, 1});
    CHECK_THROWS_AS(lcurve_corner(c), DomainError);
    LCurve d = make_curve({1, 2, 3, 4, 5}, {5, 4, 3, 2, 1});
    d.params(3) = d.params(1);  // break monotonicity
    CHECK_THROWS_AS(lcurve_corner(d), DomainError);
}

TEST_CASE("tikhonov sweep is monotone along the parameter grid") {
    const LCurve curve = lcurve_generate(kS, kP.y, SweepMethod::tikhonov, 8, 40);
    REQUIRE(curve.params.size() == 40);
    for (Index i = 1; i < 40; ++i) {
        CHECK(curve.residual_norms(i) >=
              curve.residual_norms(i - 1) * (1.0 - 1e-12));
        CHECK(curve.solution_norms(i) <=
              curve.solution_norms(i - 1) * (1.0 + 1e-12));
        CHECK(curve.params(i) > curve.params(i - 1));
    }
}

TEST_CASE("geom sweep grid is anchored to the data scale") {
    const double decades = 6;
    const LCurve curve =
        lcurve_generate(kS, kP.y, SweepMethod::geom, decades, 25);
    const double eps_max = (kS.U.transpose() * kP.y).cwiseAbs().maxCoeff() / 2.0;
    CHECK(curve.params(24) == doctest::Approx(eps_max).epsilon(1e-12));
    CHECK(curve.params(24) / curve.params(0) ==
          doctest::Approx(std::pow(10.0, decades)).epsilon(1e-9));
    // just above the top of the grid nothing survives the threshold
    const FixedPointResult top =
        closed_form_fixed_point(kS, kP.y, eps_max * (1.0 + 1e-12));
    CHECK(top.empty_kept);
}

TEST_CASE("sweep corners sit within a decade of the best parameter") {
    // default sweep settings: 30 decades, 100 points
    for (SweepMethod method : {SweepMethod::tikhonov, SweepMethod::geom}) {
        const LCurve curve = lcurve_generate(kS, kP.y, method, 30, 100);
        const double corner_param = curve.params(curve.corner_index);
        const double best = error_minimizing_param(curve, method);
        CHECK(std::abs(std::log10(corner_param / best)) <= 1.0);
    }
}

TEST_CASE("tikhonov corner residual tracks the noise level") {
    const LCurve curve =
        lcurve_generate(kS, kP.y, SweepMethod::tikhonov, 30, 100);
    const double r = curve.residual_norms(curve.corner_index);
    CHECK(r <= 3.0 * *kP.delta);
    CHECK(r >= *kP.delta / 3.0);
}

TEST_CASE("corner parameter moves less than a grid step when points double") {
    const double step = 30.0 / 99.0;  // original grid spacing in decades
    for (SweepMethod method : {SweepMethod::tikhonov, SweepMethod::geom}) {
        const LCurve coarse = lcurve_generate(kS, kP.y, method, 30, 100);
        const LCurve fine = lcurve_generate(kS, kP.y, method, 30, 200);
        const double pc = coarse.params(coarse.corner_index);
        const double pf = fine.params(fine.corner_index);
        CHECK(std::abs(std::log10(pc / pf)) < step);
    }
}

TEST_CASE("generate validates its inputs") {
    CHECK_THROWS_AS(lcurve_generate(kS, kP.y, SweepMethod::tikhonov, 8, 2),
                    DomainError);
    CHECK_THROWS_AS(lcurve_generate(kS, kP.y, SweepMethod::tikhonov, -1, 10),
                    DomainError);
    CHECK_THROWS_AS(lcurve_generate(kS, Vector::Zero(kP.y.size()),
                                    SweepMethod::tikhonov, 8, 10),
                    DomainError);
    CHECK_THROWS_AS(
        lcurve_generate(kS, Vector::Ones(3), SweepMethod::tikhonov, 8, 10),
        ShapeError);
}

TEST_CASE("sweep method names round-trip") {
    CHECK(sweep_method_from_name("tikhonov") == SweepMethod::tikhonov);
    CHECK(sweep_method_from_name("geom") == SweepMethod::geom);
    CHECK(sweep_method_from_name(sweep_method_name(SweepMethod::geom)) ==
          SweepMethod::geom);
    CHECK_THROWS_AS(sweep_method_from_name("menger"), DomainError);
}

TEST_CASE("lcurve round-trips through csv and json") {
    const fs::path dir = fs::path(GMREG_TEST_TMPDIR) / "lcurve";
    fs::create_directories(dir);
    const LCurve curve = lcurve_generate(kS, kP.y, SweepMethod::geom, 6, 30);
    const std::string csv = (dir / "c.csv").string();
    const std::string json = (dir / "c.json").string();
    save_lcurve(curve, csv, json);
    const LCurve back = load_lcurve(csv, json);
    CHECK((back.params - curve.params).norm() == 0.0);
    CHECK((back.residual_norms - curve.residual_norms).norm() == 0.0);
    CHECK((back.solution_norms - curve.solution_norms).norm() == 0.0);
    CHECK(back.corner_index == curve.corner_index);

    std::ofstream(dir / "bad.json") << "{\"corner_index\": 9999}";
    CHECK_THROWS_AS(load_lcurve(csv, (dir / "bad.json").string()), IoError);
    std::ofstream(dir / "broken.json") << "{not json";
    CHECK_THROWS_AS(load_lcurve(csv, (dir / "broken.json").string()), IoError);
}
