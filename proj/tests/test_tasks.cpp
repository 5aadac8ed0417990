#include "lskin/tasks.hpp"

#include <catch2/catch.hpp>

using namespace lskin;

namespace {

TaskSpec make_task(TaskKind kind, int tau, int washout = 20, int train = 30, int test = 30,
                   std::uint64_t seed = 7) {
    TaskSpec t;
    t.kind = kind;
    t.tau = tau;
    t.washout = washout;
    t.train = train;
    t.test = test;
    t.seed = seed;
    return t;
}

}  // namespace

TEST_CASE("input generation is deterministic under the seed") {
    const auto spec = make_task(TaskKind::Stm, 3);
    const auto a = generate_inputs(spec);
    const auto b = generate_inputs(spec);
    REQUIRE(a == b);

    auto other = spec;
    other.seed = 8;
    CHECK(generate_inputs(other) != a);
}

TEST_CASE("STM inputs live in the unit interval") {
    const auto spec = make_task(TaskKind::Stm, 0, 100, 400, 500);
    const auto s = generate_inputs(spec);
    REQUIRE(static_cast<int>(s.size()) == spec.total_steps());
    for (double v : s) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("XOR inputs are fair bits") {
    auto spec = make_task(TaskKind::Xor, 0, 100, 5000, 4900);
    const auto s = generate_inputs(spec);
    double mean = 0.0;
    for (double v : s) {
        CHECK((v == 0.0 || v == 1.0));
        mean += v;
    }
    mean /= static_cast<double>(s.size());
    CHECK(mean > 0.47);
    CHECK(mean < 0.53);
}

TEST_CASE("STM target is the delayed input, index by index") {
    const auto spec = make_task(TaskKind::Stm, 5);
    const auto s = generate_inputs(spec);
    const auto y = target_series(spec, s);
    REQUIRE(y.size() == s.size());
    for (std::size_t k = 5; k < y.size(); ++k) CHECK(y[k] == s[k - 5]);
    for (std::size_t k = 0; k < 5; ++k) CHECK(y[k] == 0.0);

    SECTION("zero delay reproduces the input") {
        const auto id = make_task(TaskKind::Stm, 0);
        const auto y0 = target_series(id, s);
        for (std::size_t k = 0; k < y0.size(); ++k) CHECK(y0[k] == s[k]);
    }
}

TEST_CASE("XOR target follows the two-step parity table") {
    const auto spec = make_task(TaskKind::Xor, 0);
    std::vector<double> s(static_cast<std::size_t>(spec.total_steps()), 0.0);
    s[0] = 1.0;  // (s0, s1) = (1, 0) -> y2 = 1
    s[1] = 0.0;
    s[2] = 1.0;  // (s1, s2) = (0, 1) -> y3 = 1
    s[3] = 1.0;  // (s2, s3) = (1, 1) -> y4 = 0
    const auto y = target_series(spec, s);
    CHECK(y[2] == 1.0);
    CHECK(y[3] == 1.0);
    CHECK(y[4] == 0.0);
    for (const double v : y) CHECK((v == 0.0 || v == 1.0));
}

TEST_CASE("targets are translation covariant") {
    const auto spec = make_task(TaskKind::Stm, 4, 30, 40, 40);
    const auto s = generate_inputs(spec);
    const auto y = target_series(spec, s);

    const int shift = 6;
    std::vector<double> s_shifted(s.begin() + shift, s.end());
    auto spec_short = spec;
    spec_short.washout = spec.washout - shift;
    const auto y_shifted = target_series(spec_short, s_shifted);
    for (std::size_t k = 4; k < y_shifted.size(); ++k) {
        CHECK(y_shifted[k] == y[k + shift]);
    }
}

TEST_CASE("task validation guards the lookback and lengths") {
    CHECK_THROWS_AS(make_task(TaskKind::Stm, -1).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_task(TaskKind::Stm, 35, 40, 30, 30).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_task(TaskKind::Stm, 25, 20, 30, 30).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_task(TaskKind::Stm, 1, 0, 30, 30).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_task(TaskKind::Xor, 0, 1, 30, 30).validate(), std::invalid_argument);

    const auto spec = make_task(TaskKind::Stm, 3);
    std::vector<double> too_short(10, 0.0);
    CHECK_THROWS_AS(target_series(spec, too_short), std::invalid_argument);
}

TEST_CASE("rescale hook maps any series onto the unit interval") {
    const std::vector<double> raw{-3.0, 1.0, 5.0};
    const auto scaled = rescale_to_unit(raw);
    CHECK(scaled[0] == 0.0);
    CHECK(scaled[1] == Approx(0.5));
    CHECK(scaled[2] == 1.0);
    CHECK(rescale_to_unit({2.0, 2.0}) == std::vector<double>{0.0, 0.0});
    CHECK(rescale_to_unit({}).empty());
}

TEST_CASE("task names round-trip") {
    CHECK(task_from_name("stm") == TaskKind::Stm);
    CHECK(task_from_name("xor") == TaskKind::Xor);
    CHECK_THROWS_AS(task_from_name("narma"), std::invalid_argument);
}
