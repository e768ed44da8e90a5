#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "sgkdv/ensemble.hpp"
#include "sgkdv/rng.hpp"

using namespace sgkdv;

namespace {

std::vector<double> noisy(std::uint64_t seed) {
    NormalStream s(seed);
    return {s.next(), 2.0 + s.next(), std::exp(s.next())};
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("deterministic estimator has zero standard error") {
    const EnsembleStats st = ensemble_run("const", {1.0}, [](std::uint64_t) { return std::vector<double>{3.25}; }, 2, 9);
    CHECK(st.mean[0] == 3.25);
    CHECK(st.standard_error[0] == 0.0);
    CHECK(st.count[0] == 2);
    CHECK_THROWS(ensemble_run("one", {1.0}, noisy, 1, 9));
}

TEST_CASE("merge is order independent") {
    const auto seeds = ensemble_seeds(17, 64);
    CHECK(std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() == 64);
    const std::vector<double> t{1, 2, 3};
    const EnsembleStats whole = ensemble_map(seeds, noisy, 3, 1).finalize("x", t);

    auto shuffled = seeds;
    std::mt19937_64 rng(3);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EnsemblePartial a, b, c;
    for (std::size_t i = 0; i < shuffled.size(); ++i) (i % 3 == 0 ? a : i % 3 == 1 ? b : c).add(shuffled[i], noisy(shuffled[i]));
    EnsemblePartial m1 = c, m2 = a;
    m1.merge(a);
    m1.merge(b);
    m2.merge(b);
    m2.merge(c);
    for (const EnsemblePartial* m : {&m1, &m2}) {
        const EnsembleStats s = m->finalize("x", t);
        CHECK(s.mean == whole.mean);
        CHECK(s.standard_error == whole.standard_error);
        CHECK(s.seeds == whole.seeds);
    }
    const EnsembleStats threaded = ensemble_map(seeds, noisy, 3, 4).finalize("x", t);
    CHECK(threaded.mean == whole.mean);
    CHECK(threaded.standard_error == whole.standard_error);

    CHECK_THROWS(a.add(shuffled[0], {0, 0, 0}));
    EnsemblePartial dup;
    dup.add(shuffled[0], noisy(shuffled[0]));
    CHECK_THROWS(a.merge(dup));
}

TEST_CASE("Welford moments") {
    EnsemblePartial p;
    const double v[] = {1.0, 4.0, 2.0, 8.0, 5.0};
    for (int i = 0; i < 5; ++i) p.add(static_cast<std::uint64_t>(i), {v[i]});
    const EnsembleStats s = p.finalize("w", {0.0});
    CHECK(s.mean[0] == doctest::Approx(4.0));
    // sample variance 7.5
    CHECK(s.standard_error[0] == doctest::Approx(std::sqrt(7.5 / 5)));
}

TEST_CASE("failures become records") {
    const auto seeds = ensemble_seeds(1, 6);
    const EnsemblePartial p = ensemble_map(
        seeds,
        [&](std::uint64_t s) -> std::vector<double> {
            if (s == seeds[2]) throw std::runtime_error("boom");
            return {1.0};
        },
        1, 2);
    const EnsembleStats st = p.finalize("f", {1.0});
    CHECK(st.count[0] == 5);
    REQUIRE(st.errors.size() == 1);
    CHECK(st.errors[0].seed == seeds[2]);
    CHECK(st.errors[0].message == "boom");
}

TEST_CASE("log-log slope") {
    const std::vector<double> t{1, 2, 4, 8};
    std::vector<double> y;
    for (double x : t) y.push_back(3 * std::pow(x, -0.4));
    CHECK(log_log_slope(t, y) == doctest::Approx(-0.4).epsilon(1e-13));
}

}
