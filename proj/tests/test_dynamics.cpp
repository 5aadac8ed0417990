#include "lskin/dynamics.hpp"

#include "oracles.hpp"

#include <catch2/catch.hpp>

using namespace lskin;

namespace {

Liouvillian chain_liouvillian(int sites, double J, double W, double eps, double gamma, double s,
                              std::uint64_t seed, int bosons = 1) {
    const auto basis = enumerate_sector(sites, bosons, 100000);
    const auto net = sample_network(sites, Topology::Chain, J, W, eps, 0, seed);
    DissipatorSpec dis;
    dis.gamma = gamma;
    dis.epsilon = eps;
    dis.s = s;
    return assemble_liouvillian(net, dis, basis);
}

Matrix random_hermitian(int d, Rng& rng) {
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = Complex(rng.gaussian(), rng.gaussian());
    return 0.5 * (m + m.adjoint());
}

DensityMatrix random_state(const BasisPtr& basis, std::uint64_t seed) {
    Rng rng(seed);
    const int d = basis->size();
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = Complex(rng.gaussian(), rng.gaussian());
    Matrix rho = m * m.adjoint();
    rho /= rho.trace().real();
    return {basis, rho};
}

}  // namespace

TEST_CASE("expm basics") {
    SECTION("zero generator gives the identity") {
        const Matrix z = Matrix::Zero(7, 7);
        CHECK((expm(z) - Matrix::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-15);
    }
    SECTION("diagonal generator exponentiates entrywise") {
        Matrix d = Matrix::Zero(3, 3);
        d(0, 0) = -0.3;
        d(1, 1) = -4.0;
        d(2, 2) = Complex(0.0, 2.0);
        const Matrix e = expm(d);
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(e(i, i) - std::exp(d(i, i))) < 1e-14);
        }
        CHECK(std::abs(e(0, 1)) == 0.0);
    }
    SECTION("agrees with the eigendecomposition route for skew-Hermitian input") {
        Rng rng(17);
        const Matrix h = random_hermitian(8, rng);
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        Matrix phases = Matrix::Zero(8, 8);
        for (int i = 0; i < 8; ++i) phases(i, i) = std::exp(Complex(0, -1) * es.eigenvalues()[i]);
        const Matrix expected = es.eigenvectors() * phases * es.eigenvectors().adjoint();
        CHECK((expm(Complex(0, -1) * h) - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("rejects non-finite input") {
        Matrix bad = Matrix::Zero(2, 2);
        bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(expm(bad), std::invalid_argument);
    }
}

TEST_CASE("expm satisfies the semigroup property on a random 3-site generator") {
    const Liouvillian lio = chain_liouvillian(3, 1.0, 1.0, 0.4, 0.7, 0.3, 11);
    for (double dt : {0.5, 2.0, 20.0}) {
        const Matrix half = expm(0.5 * dt * lio.matrix);
        const Matrix whole = expm(dt * lio.matrix);
        CHECK((half * half - whole).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("propagator preserves trace and damps amplitude as the textbook case") {
    SECTION("amplitude damping rates") {
        const auto basis = enumerate_sector(2, 1);
        Matrix l = Matrix::Zero(2, 2);
        l(0, 1) = 1.0;
        const double gamma = 0.6, dt = 1.7;
        const Liouvillian lio = build_liouvillian({basis, Matrix::Zero(2, 2)}, {{gamma, l}});
        Matrix rho(2, 2);
        rho << Complex(0.25), Complex(0.1, -0.2), Complex(0.1, 0.2), Complex(0.75);
        const Propagator p = make_propagator(lio, dt);
        const Matrix evolved = p.apply({basis, rho}).rho;
        CHECK(evolved(1, 1).real() == Approx(0.75 * std::exp(-gamma * dt)).epsilon(1e-10));
        CHECK(evolved(0, 1).real() == Approx(0.1 * std::exp(-0.5 * gamma * dt)).epsilon(1e-10));
    }
    SECTION("trace row is preserved for a full chain generator") {
        const Liouvillian lio = chain_liouvillian(6, 1.0, 1.0, 0.3, 0.5, 0.8, 5);
        const Propagator p = make_propagator(lio, 1.0);
        const Vector id = vec(Matrix::Identity(6, 6));
        CHECK(((id.transpose() * p.matrix).transpose() - id).cwiseAbs().maxCoeff() < 1e-10);
    }
    SECTION("trace-norm contraction on random state pairs") {
        const Liouvillian lio = chain_liouvillian(5, 1.0, 0.5, 0.2, 0.4, 0.65, 6);
        const Propagator p = make_propagator(lio, 1.0);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto a = random_state(lio.basis, seed);
            const auto b = random_state(lio.basis, seed + 100);
            const double before = trace_norm(a.rho - b.rho);
            const double after = trace_norm(p.apply(a).rho - p.apply(b).rho);
            CHECK(after <= before + 1e-12);
        }
    }
}

TEST_CASE("periodic dissipative boundary pins the fully mixed steady state") {
    for (double s : {0.0, 0.3, 0.7, 1.0}) {
        const Liouvillian lio = chain_liouvillian(10, 1.0, 1.0, 1.0, 0.5, s, 21);
        const SteadyState ss = steady_state(lio);
        CHECK((ss.rho.rho - Matrix::Identity(10, 10) / 10.0).norm() < 1e-8);
        CHECK(ss.residual < 1e-10);
        CHECK(ss.gap > 0.0);
    }
}

TEST_CASE("symmetric input pins the fully mixed steady state for any boundary") {
    for (double eps : {0.0, 0.4, 0.9}) {
        const Liouvillian lio = chain_liouvillian(8, 1.0, 1.0, eps, 0.5, 0.5, 22);
        const SteadyState ss = steady_state(lio);
        CHECK((ss.rho.rho - Matrix::Identity(8, 8) / 8.0).norm() < 1e-8);
    }
}

TEST_CASE("no coherent hopping: steady populations obey detailed balance") {
    const double s = 0.7;
    const Liouvillian lio = chain_liouvillian(10, 0.0, 0.0, 0.0, 0.9, s, 1);
    const SteadyState ss = steady_state(lio);
    const SiteProfile prof = population_profile(ss.rho);
    const Eigen::VectorXd expected = oracle::geometric_profile(10, s / (1.0 - s));
    for (int l = 0; l < 10; ++l) {
        CHECK(prof.populations[l] == Approx(expected[l]).epsilon(1e-7));
    }
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            if (i != j) CHECK(std::abs(ss.rho.rho(i, j)) < 1e-8);
        }
    }
}

TEST_CASE("steady state is a fixed point of every propagator") {
    const Liouvillian lio = chain_liouvillian(7, 1.0, 1.0, 0.2, 0.6, 0.8, 13);
    const SteadyState ss = steady_state(lio);
    for (double dt : {0.5, 3.0}) {
        const Propagator p = make_propagator(lio, dt);
        CHECK((p.matrix * vec(ss.rho.rho) - vec(ss.rho.rho)).cwiseAbs().maxCoeff() < 1e-9);
    }
    ss.rho.validate();
}

TEST_CASE("spectrum has one zero mode and lives in the left half-plane") {
    Rng rng(40);
    for (int trial = 0; trial < 8; ++trial) {
        const double s = 0.1 + 0.8 * rng.uniform();
        const double eps = 0.95 * rng.uniform();
        const Liouvillian lio = chain_liouvillian(6, 1.0, 1.0, eps, 0.5, s,
                                                  static_cast<std::uint64_t>(trial + 1));
        const Spectrum spec = spectrum(lio);
        CHECK(spec.zero_modes == 1);
        CHECK(spec.gap > 0.0);
        CHECK(spec.t_mix == Approx(1.0 / spec.gap));
        for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
            CHECK(spec.eigenvalues[k].real() <= 1e-9);
        }
    }
}

TEST_CASE("steady_state reports a degenerate null space instead of averaging") {
    // No Hamiltonian, no jumps: the generator vanishes and every state is
    // stationary.
    const auto basis = enumerate_sector(3, 1);
    const Liouvillian zero = build_liouvillian({basis, Matrix::Zero(3, 3)}, {});
    CHECK_THROWS_AS(steady_state(zero), std::runtime_error);
}

TEST_CASE("steady states of distinct inputs are distinct away from the periodic point") {
    const auto basis = enumerate_sector(10, 1);
    const auto net = sample_network(10, Topology::Chain, 1.0, 1.0, 0.0, 0, 31);
    DissipatorSpec dis;
    dis.gamma = 0.5;
    dis.epsilon = 0.0;
    CHECK(separability_distance(net, dis, 0.2, 0.8, basis) > 1e-3);
    CHECK(separability_distance(net, dis, 0.45, 0.45, basis) < 1e-12);

    const auto net_pb = sample_network(10, Topology::Chain, 1.0, 1.0, 1.0, 0, 31);
    DissipatorSpec dis_pb = dis;
    dis_pb.epsilon = 1.0;
    CHECK(separability_distance(net_pb, dis_pb, 0.2, 0.8, basis) < 1e-9);
}

TEST_CASE("echo state property: trace distance contracts under shared inputs") {
    const auto basis = enumerate_sector(10, 1);
    const auto net = sample_network(10, Topology::Chain, 1.0, 0.0, 0.0, 0, 7);
    DissipatorSpec dis;
    dis.gamma = 0.1;
    dis.epsilon = 0.0;
    StepEvolver evolver(net, dis, basis, 1.0);

    Rng rng_inputs(900);
    std::vector<double> inputs(50);
    for (auto& s : inputs) s = rng_inputs.uniform();

    SECTION("identical initial states stay identical") {
        const auto rho = random_state(basis, 4);
        const auto d = esp_distance_trace(evolver, rho, rho, inputs);
        for (double v : d) CHECK(v < 1e-12);
    }
    SECTION("random pairs contract below 1e-3 within 50 steps, monotonically") {
        const auto rho1 = random_state(basis, 5);
        const auto rho2 = random_state(basis, 6);
        const auto d = esp_distance_trace(evolver, rho1, rho2, inputs);
        CHECK(d.back() < 1e-3);
        for (std::size_t k = 1; k < d.size(); ++k) CHECK(d[k] <= d[k - 1] + 1e-12);
    }
    SECTION("states from a different sector are rejected") {
        const auto other = enumerate_sector(10, 2);
        const auto rho1 = random_state(other, 5);
        const auto rho2 = random_state(other, 6);
        CHECK_THROWS_AS(esp_distance_trace(evolver, rho1, rho2, inputs), std::invalid_argument);
    }
}

TEST_CASE("population profiles show edge accumulation away from the periodic point") {
    const auto basis = enumerate_sector(10, 1);
    DissipatorSpec dis;
    dis.gamma = 1.0;

    SECTION("fully mixed state is flat") {
        const SiteProfile prof = population_profile(fully_mixed_state(basis));
        for (int l = 0; l < 10; ++l) CHECK(prof.populations[l] == Approx(0.1));
    }

    SECTION("input 0 accumulates at site 1, input 1 at site L, monotonically") {
        for (double eps : {0.01, 0.2}) {
            const auto net = sample_network(10, Topology::Chain, 1.0, 0.0, eps, 0, 1);
            auto de = dis;
            de.epsilon = eps;
            const auto lo = population_profile(
                steady_state(assemble_liouvillian(net, de.with_input(0.0), basis)).rho);
            const auto hi = population_profile(
                steady_state(assemble_liouvillian(net, de.with_input(1.0), basis)).rho);
            for (int l = 1; l < 10; ++l) {
                CHECK(lo.populations[l] < lo.populations[l - 1]);
                CHECK(hi.populations[l] > hi.populations[l - 1]);
            }
            // mirror symmetry of the two extreme inputs on a clean chain
            for (int l = 0; l < 10; ++l) {
                CHECK(lo.populations[l] == Approx(hi.populations[9 - l]).epsilon(1e-6));
            }
        }
    }

    SECTION("edge population grows as the boundary opens") {
        DensityMatrix tight, loose;
        {
            const auto net = sample_network(10, Topology::Chain, 1.0, 0.0, 0.01, 0, 1);
            auto de = dis;
            de.epsilon = 0.01;
            tight = steady_state(assemble_liouvillian(net, de.with_input(0.0), basis)).rho;
        }
        {
            const auto net = sample_network(10, Topology::Chain, 1.0, 0.0, 0.2, 0, 1);
            auto de = dis;
            de.epsilon = 0.2;
            loose = steady_state(assemble_liouvillian(net, de.with_input(0.0), basis)).rho;
        }
        CHECK(population_profile(tight).populations[0] > population_profile(loose).populations[0]);
    }

    SECTION("coherence column matches the first-row matrix elements in the site basis") {
        const auto rho = random_state(basis, 77);
        const SiteProfile prof = population_profile(rho);
        for (int l = 2; l <= 10; ++l) {
            CHECK(std::abs(prof.coherences[l - 1] - rho.rho(0, l - 1)) < 1e-12);
        }
        CHECK(std::abs(prof.coherences[0] - (rho.rho(0, 0) + 1.0)) < 1e-12);
    }
}

TEST_CASE("state invariants survive a long driven evolution") {
    const auto basis = enumerate_sector(10, 1);
    const auto net = sample_network(10, Topology::Chain, 1.0, 0.01, 0.1, 0, 12);
    DissipatorSpec dis;
    dis.gamma = 0.1;
    dis.epsilon = 0.1;
    StepEvolver evolver(net, dis, basis, 1.0);

    Rng rng(2025);
    Vector v = vec(random_state(basis, 1).rho);
    for (int k = 0; k < 300; ++k) {
        evolver.step(rng.uniform(), v);
        const DensityMatrix state{basis, unvec(v, 10)};
        CHECK(state.trace_error() < 1e-8);
        CHECK(state.hermiticity_error() < 1e-10);
        CHECK(state.min_eigenvalue() > -1e-9);
    }
}

TEST_CASE("propagator cache holds one entry per discrete input value") {
    const auto basis = enumerate_sector(4, 1);
    const auto net = sample_network(4, Topology::Chain, 1.0, 0.0, 0.0, 0, 2);
    DissipatorSpec dis;
    dis.gamma = 0.3;
    auto cache = std::make_shared<PropagatorCache>();
    StepEvolver evolver(net, dis, basis, 2.0, cache);

    Rng rng(8);
    Vector v = vec(fully_mixed_state(basis).rho);
    for (int k = 0; k < 40; ++k) evolver.step(static_cast<double>(rng.coin()), v);
    CHECK(cache->size() == 2);

    SECTION("capacity bound keeps continuous alphabets from accumulating") {
        auto small_cache = std::make_shared<PropagatorCache>(8);
        StepEvolver ev2(net, dis, basis, 2.0, small_cache);
        for (int k = 0; k < 40; ++k) ev2.step(rng.uniform(), v);
        CHECK(small_cache->size() <= 8);
    }
}

TEST_CASE("density matrix validation surfaces violations") {
    const auto basis = enumerate_sector(3, 1);
    DensityMatrix bad{basis, Matrix::Identity(3, 3)};  // trace 3
    CHECK_THROWS_AS(bad.validate(), std::runtime_error);

    Matrix nh = Matrix::Identity(3, 3) / 3.0;
    nh(0, 1) = Complex(0.2, 0.0);  // not Hermitian
    CHECK_THROWS_AS((DensityMatrix{basis, nh}.validate()), std::runtime_error);

    Matrix neg = Matrix::Zero(3, 3);
    neg(0, 0) = 0.6;
    neg(1, 1) = 0.5;
    neg(2, 2) = -0.1;  // negative eigenvalue, trace still 1
    CHECK_THROWS_AS((DensityMatrix{basis, neg}.validate()), std::runtime_error);
}
