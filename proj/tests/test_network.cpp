#include "lskin/network.hpp"

#include "oracles.hpp"

#include <catch2/catch.hpp>

#include <set>

using namespace lskin;

TEST_CASE("chain edge structure follows the boundary parameter") {
    SECTION("open boundary drops the wrap-around edge") {
        const auto spec = sample_network(10, Topology::Chain, 1.0, 0.0, 0.0, 0, 1);
        REQUIRE(spec.edges.size() == 9);
        for (int l = 1; l < 10; ++l) {
            CHECK(spec.edges[static_cast<std::size_t>(l - 1)].i == l);
            CHECK(spec.edges[static_cast<std::size_t>(l - 1)].j == l + 1);
            CHECK(spec.edges[static_cast<std::size_t>(l - 1)].amplitude == 1.0);
        }
    }
    SECTION("periodic boundary edge matches the bulk") {
        const auto spec = sample_network(10, Topology::Chain, 1.0, 0.0, 1.0, 0, 1);
        REQUIRE(spec.edges.size() == 10);
        CHECK(spec.edges.back().i == 10);
        CHECK(spec.edges.back().j == 1);
        CHECK(spec.edges.back().amplitude == 1.0);
    }
    SECTION("intermediate epsilon scales only the boundary amplitude") {
        const auto spec = sample_network(10, Topology::Chain, 2.0, 0.0, 0.5, 0, 1);
        REQUIRE(spec.edges.size() == 10);
        CHECK(spec.edges.back().amplitude == Approx(1.0));
        CHECK(spec.edges.front().amplitude == Approx(2.0));
    }
}

TEST_CASE("disorder draws are uniform on [-W/2, W/2] and reproducible") {
    const auto a = sample_network(10, Topology::Chain, 1.0, 0.4, 0.0, 0, 42);
    const auto b = sample_network(10, Topology::Chain, 1.0, 0.4, 0.0, 0, 42);
    const auto c = sample_network(10, Topology::Chain, 1.0, 0.4, 0.0, 0, 43);
    REQUIRE(a.onsite == b.onsite);
    CHECK(a.onsite != c.onsite);
    for (double w : a.onsite) {
        CHECK(w >= -0.2);
        CHECK(w <= 0.2);
    }

    SECTION("zero width gives exactly zero energies") {
        const auto z = sample_network(10, Topology::Chain, 1.0, 0.0, 0.0, 0, 42);
        for (double w : z.onsite) CHECK(w == 0.0);
    }
}

TEST_CASE("irregular sampling produces distinct undirected pairs") {
    const int L = 8;
    const auto spec = sample_network(L, Topology::Irregular, 1.0, 1.0, 0.3, 16, 99);
    REQUIRE(spec.edges.size() == 16);
    std::set<std::pair<int, int>> seen;
    for (const auto& e : spec.edges) {
        CHECK(e.i >= 1);
        CHECK(e.j <= L);
        CHECK(e.i < e.j);  // no self-loops, canonical order
        CHECK(e.amplitude == 1.0);
        seen.emplace(e.i, e.j);
    }
    CHECK(seen.size() == spec.edges.size());

    SECTION("every pair is reachable") {
        std::set<std::pair<int, int>> all;
        for (int trial = 0; trial < 200; ++trial) {
            const auto s = sample_network(4, Topology::Irregular, 1.0, 0.0, 0.0, 3,
                                          static_cast<std::uint64_t>(trial));
            for (const auto& e : s.edges) all.emplace(e.i, e.j);
        }
        CHECK(all.size() == 6);  // all pairs of 4 sites show up
    }
}

TEST_CASE("sample_network validates its arguments") {
    CHECK_THROWS_AS(sample_network(1, Topology::Chain, 1.0, 0.0, 0.0, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_network(10, Topology::Chain, 1.0, 0.0, 1.5, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_network(10, Topology::Chain, 1.0, -1.0, 0.0, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_network(10, Topology::Irregular, 1.0, 0.0, 0.0, 46, 1),
                    std::invalid_argument);  // more edges than pairs
}

TEST_CASE("two-site Hamiltonian in the site basis") {
    auto spec = sample_network(2, Topology::Chain, 0.7, 0.0, 0.0, 0, 5);
    spec.onsite = {0.3, -0.1};
    const auto basis = enumerate_sector(2, 1);
    const Matrix h = build_hamiltonian(spec, basis).matrix;
    CHECK(h(0, 0).real() == Approx(0.3));
    CHECK(h(1, 1).real() == Approx(-0.1));
    CHECK(h(0, 1).real() == Approx(0.7));
    CHECK(h(1, 0).real() == Approx(0.7));
}

TEST_CASE("chain boundary element is epsilon*J in the site basis") {
    const auto spec = sample_network(10, Topology::Chain, 1.0, 0.0, 0.5, 0, 5);
    const auto basis = enumerate_sector(10, 1);
    const Matrix h = build_hamiltonian(spec, basis).matrix;
    CHECK(h(9, 0).real() == Approx(0.5));
    CHECK(h(0, 9).real() == Approx(0.5));
}

TEST_CASE("Hamiltonian is exactly Hermitian and conserves total number") {
    Rng rng(3);
    for (int trial = 0; trial < 6; ++trial) {
        const bool chain = trial % 2 == 0;
        const int L = 4 + 2 * (trial % 3);
        const auto spec = sample_network(L, chain ? Topology::Chain : Topology::Irregular, 1.0, 1.0,
                                         rng.uniform(), chain ? 0 : default_edge_count(L),
                                         static_cast<std::uint64_t>(trial));
        const auto basis = enumerate_sector(L, 2, 100000);
        const Matrix h = build_hamiltonian(spec, basis).matrix;
        CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        const Matrix n = total_number_operator(basis).matrix;
        CHECK((h * n - n * h).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("Hamiltonian matches the full-space oracle (L=4, N_b=2, irregular)") {
    const auto spec = sample_network(4, Topology::Irregular, 0.8, 1.0, 0.0, 4, 17);
    const auto basis = enumerate_sector(4, 2);
    const oracle::FullSpace full(4, 2);

    Matrix expected = Matrix::Zero(full.dim(), full.dim());
    for (int l = 1; l <= 4; ++l) {
        expected += spec.onsite[static_cast<std::size_t>(l - 1)] * full.number(l);
    }
    for (const auto& e : spec.edges) {
        expected += e.amplitude * (full.annihilate(e.i) * full.create(e.j) +
                                   full.create(e.i) * full.annihilate(e.j));
    }
    const Matrix got = build_hamiltonian(spec, basis).matrix;
    CHECK((got - full.project(expected, *basis)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("build_hamiltonian rejects mismatched sectors") {
    const auto spec = sample_network(5, Topology::Chain, 1.0, 0.0, 0.0, 0, 1);
    const auto basis = enumerate_sector(4, 1);
    CHECK_THROWS_AS(build_hamiltonian(spec, basis), std::invalid_argument);
}

TEST_CASE("network hash distinguishes realizations") {
    const auto a = sample_network(6, Topology::Chain, 1.0, 0.5, 0.2, 0, 1);
    const auto b = sample_network(6, Topology::Chain, 1.0, 0.5, 0.2, 0, 2);
    auto c = a;
    CHECK(network_hash(a) != network_hash(b));
    CHECK(network_hash(a) == network_hash(c));
    c.epsilon = 0.3;
    CHECK(network_hash(a) != network_hash(c));
}
