#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include <json.hpp>

#include "growthfit/errors.hpp"
#include "growthfit/linear_fit.hpp"
#include "oracle.hpp"
#include "test_helpers.hpp"

using namespace growthfit;

static nlohmann::json golden() {
    static const nlohmann::json g =
        nlohmann::json::parse(testutil::read_file(std::string(GROWTHFIT_GOLDEN_DIR) + "/africa_fits.json"));
    return g;
}

TEST_CASE("reciprocal_transform inverts each value") {
    const TimeSeries s("t", "", {{100, 2.0}, {200, 4.0}});
    const auto pts = reciprocal_transform(s);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].year == 100);
    CHECK(pts[0].recip == 0.5);
    CHECK(pts[1].recip == 0.25);
}

TEST_CASE("reciprocal_transform of the unit value is the identity") {
    const TimeSeries s("t", "", {{1, 1.0}, {2, 1.0}});
    for (const auto& p : reciprocal_transform(s)) CHECK(p.recip == 1.0);
}

TEST_CASE("a constant series has a flat reciprocal trace") {
    std::vector<Observation> obs;
    for (int y = 0; y < 10; ++y) obs.push_back({y * 100, 4.0});
    const auto pts = reciprocal_transform(TimeSeries("c", "", std::move(obs)));
    for (const auto& p : pts) CHECK(p.recip == 0.25);
}

TEST_CASE("two points determine the reciprocal line") {
    const std::vector<ReciprocalPoint> pts{{0, 10.0}, {100, 9.0}};
    const LinearFit fit = fit_reciprocal_line(pts);
    CHECK_THAT(fit.a, Catch::Matchers::WithinRel(10.0, 1e-12));
    CHECK_THAT(fit.k, Catch::Matchers::WithinRel(0.01, 1e-12));
    CHECK(fit.r2 == 1.0);
    CHECK(fit.sse <= 1e-18);
    CHECK(fit.n == 2);
    CHECK(fit.range.start == 0);
    CHECK(fit.range.end == 100);
}

TEST_CASE("exact line is recovered exactly") {
    std::vector<ReciprocalPoint> pts;
    for (int t = 0; t <= 1000; t += 100) pts.push_back({t, 12.0 - 0.005 * t});
    const LinearFit fit = fit_reciprocal_line(pts);
    CHECK_THAT(fit.a, Catch::Matchers::WithinRel(12.0, 1e-12));
    CHECK_THAT(fit.k, Catch::Matchers::WithinRel(0.005, 1e-12));
    CHECK(fit.sse <= 1e-18);
}

TEST_CASE("Africa AD 1-1820 fit matches the independent oracle and the golden record") {
    const TimeSeries africa = testutil::load_africa();
    const HyperbolicFit fit = fit_window(africa, {1, 1820});
    const oracle::Fit ref = oracle::fit_reciprocal(oracle::slice(africa, 1, 1820));
    CHECK(oracle::sig_match(fit.line.a, ref.a, 10));
    CHECK(oracle::sig_match(fit.line.k, ref.k, 10));
    CHECK(oracle::sig_match(fit.line.sse, ref.sse, 10));

    const auto g = golden()["fit_1_1820"];
    CHECK(oracle::sig_match(fit.line.a, g["a"].get<double>(), 10));
    CHECK(oracle::sig_match(fit.line.k, g["k"].get<double>(), 10));
    CHECK(oracle::sig_match(fit.line.sse, g["sse"].get<double>(), 10));
    CHECK(fit.line.n == g["n"].get<int>());
    CHECK(fit.line.k > 0.0);
}

TEST_CASE("degenerate fit input is rejected") {
    CHECK_THROWS_AS(fit_reciprocal_line(std::vector<ReciprocalPoint>{{1, 1.0}}), InfeasibleError);
    CHECK_THROWS_AS(fit_reciprocal_line(std::vector<ReciprocalPoint>{{5, 1.0}, {5, 2.0}, {5, 3.0}}),
                    InfeasibleError);
}

TEST_CASE("hyperbolic_predict evaluates 1/(a - k t)") {
    HyperbolicFit fit;
    fit.line.a = 10.0;
    fit.line.k = 0.01;
    fit.singularity_year = singularity_year(fit.line);
    CHECK_THAT(hyperbolic_predict(fit, 0.0), Catch::Matchers::WithinRel(0.1, 1e-12));
    CHECK(hyperbolic_predict(fit, 999.999) > 1e4);
    try {
        hyperbolic_predict(fit, 1000.0);
        FAIL("expected SingularityError");
    } catch (const SingularityError& e) {
        CHECK(std::string(e.what()).find("1000") != std::string::npos);
    }
}

TEST_CASE("predicted values re-reciprocate onto the fitted line") {
    const TimeSeries africa = testutil::load_africa();
    const HyperbolicFit fit = fit_window(africa, {1, 1820});
    const TimeSeries win = window(africa, {1, 1820});
    for (const Observation& o : win.observations()) {
        const double line_value = fit.line.a - fit.line.k * o.year;
        CHECK_THAT(1.0 / hyperbolic_predict(fit, o.year),
                   Catch::Matchers::WithinRel(line_value, 1e-12));
    }
}

TEST_CASE("singularity_year is a/k only for growing fits") {
    LinearFit fit;
    fit.a = 10.0;
    fit.k = 0.01;
    REQUIRE(singularity_year(fit).has_value());
    CHECK_THAT(*singularity_year(fit), Catch::Matchers::WithinRel(1000.0, 1e-12));
    fit.k = 0.0;
    CHECK_FALSE(singularity_year(fit).has_value());
    fit.k = -0.002;
    CHECK_FALSE(singularity_year(fit).has_value());
}

TEST_CASE("residuals are zero on the line and signed above it") {
    LinearFit fit;
    fit.a = 0.02;
    fit.k = 1e-5;
    std::vector<ReciprocalPoint> on_line;
    for (int t = 0; t <= 500; t += 100) on_line.push_back({t, fit.a - fit.k * t});
    for (const auto& r : residuals_reciprocal(fit, on_line)) {
        CHECK(std::fabs(r.residual) < 1e-15);
    }
    // observed 0.02 where the line predicts 0.015: +0.005, slower than the hyperbola
    fit.a = 0.015;
    fit.k = 0.0;
    const std::vector<ReciprocalPoint> one{{0, 0.02}};
    const auto res = residuals_reciprocal(fit, one);
    CHECK_THAT(res[0].residual, Catch::Matchers::WithinAbs(0.005, 1e-15));
}

TEST_CASE("Africa residuals after 1950 sit above the 1820-1950 fit") {
    const TimeSeries africa = testutil::load_africa();
    const HyperbolicFit base = fit_window(africa, {1820, 1950});
    const TimeSeries tail = window(africa, {1951, 2008});
    const auto pts = reciprocal_transform(tail);
    int positive = 0;
    for (const auto& r : residuals_reciprocal(base.line, pts)) {
        if (r.residual > 0.0) ++positive;
    }
    CHECK(positive >= static_cast<int>(pts.size() * 9 / 10));
}

TEST_CASE("synthetic hyperbolas are recovered to 1e-9 relative error") {
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> a_dist(0.05, 20.0);
    std::uniform_real_distribution<double> k_dist(1e-5, 1e-2);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = a_dist(rng);
        const double k = k_dist(rng);
        const double t_max = a / k;
        const int n = 10 + static_cast<int>(rng() % 41);
        std::vector<ReciprocalPoint> pts;
        std::vector<double> ts;
        for (int i = 0; i < n; ++i) ts.push_back(frac(rng) * t_max * 0.98);
        std::sort(ts.begin(), ts.end());
        int year = 0;
        for (double t : ts) {
            const int y = static_cast<int>(t);
            year = std::max(year + 1, y);
            const double value = 1.0 / (a - k * year);
            if (value <= 0.0) continue;
            pts.push_back({year, 1.0 / value});
        }
        if (pts.size() < 2) continue;
        const LinearFit fit = fit_reciprocal_line(pts);
        CHECK_THAT(fit.a, Catch::Matchers::WithinRel(a, 1e-9));
        CHECK_THAT(fit.k, Catch::Matchers::WithinRel(k, 1e-9));
        CHECK(fit.sse <= 1e-18);
    }
}

TEST_CASE("scaling all values leaves r2 and the singularity in place") {
    const TimeSeries africa = testutil::load_africa();
    const TimeSeries win = window(africa, {1, 1820});
    const LinearFit base = fit_reciprocal_line(reciprocal_transform(win));
    for (double c : {2.0, 10.0, 0.125}) {
        std::vector<Observation> scaled;
        for (const Observation& o : win.observations()) scaled.push_back({o.year, o.value * c});
        const LinearFit fit =
            fit_reciprocal_line(reciprocal_transform(TimeSeries("s", "", std::move(scaled))));
        CHECK_THAT(fit.a, Catch::Matchers::WithinRel(base.a / c, 1e-9));
        CHECK_THAT(fit.k, Catch::Matchers::WithinRel(base.k / c, 1e-9));
        CHECK_THAT(fit.r2, Catch::Matchers::WithinRel(base.r2, 1e-9));
        CHECK_THAT(*singularity_year(fit), Catch::Matchers::WithinRel(*singularity_year(base), 1e-9));
    }
}

TEST_CASE("shifting all years shifts the singularity and keeps k") {
    const TimeSeries africa = testutil::load_africa();
    const TimeSeries win = window(africa, {1, 1820});
    const LinearFit base = fit_reciprocal_line(reciprocal_transform(win));
    for (int shift : {500, -300}) {
        std::vector<Observation> moved;
        for (const Observation& o : win.observations()) moved.push_back({o.year + shift, o.value});
        const LinearFit fit =
            fit_reciprocal_line(reciprocal_transform(TimeSeries("s", "", std::move(moved))));
        CHECK_THAT(fit.k, Catch::Matchers::WithinRel(base.k, 1e-9));
        CHECK_THAT(fit.a, Catch::Matchers::WithinRel(base.a + base.k * shift, 1e-9));
        CHECK_THAT(*singularity_year(fit),
                   Catch::Matchers::WithinRel(*singularity_year(base) + shift, 1e-9));
    }
}

TEST_CASE("residuals of a fit against its own points sum to zero") {
    const TimeSeries africa = testutil::load_africa();
    for (YearRange r : {YearRange{1, 1820}, YearRange{1820, 1950}, YearRange{1, 2008}}) {
        const auto pts = reciprocal_transform(window(africa, r));
        const LinearFit fit = fit_reciprocal_line(pts);
        double sum = 0.0;
        for (const auto& res : residuals_reciprocal(fit, pts)) sum += res.residual;
        CHECK(std::fabs(sum) < 1e-12);
    }
}

TEST_CASE("prediction increases strictly with year below the singularity") {
    const TimeSeries africa = testutil::load_africa();
    const HyperbolicFit fit = fit_window(africa, {1820, 1950});
    REQUIRE(fit.singularity_year.has_value());
    double prev = 0.0;
    for (double t = 1700.0; t < *fit.singularity_year - 1.0; t += 1.0) {
        const double v = hyperbolic_predict(fit, t);
        CHECK(v > prev);
        prev = v;
    }
}
