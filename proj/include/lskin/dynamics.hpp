// dynamics.hpp — propagation, steady states, spectra, and relaxation diagnostics.

#pragma once

#include "lskin/liouvillian.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

namespace lskin {

// ------------------------------ density matrix -------------------------------

struct DensityMatrix {
    BasisPtr basis;
    Matrix rho;

    double trace_error() const { return std::abs(rho.trace() - Complex(1.0, 0.0)); }

    double hermiticity_error() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    // Throws naming the violated invariant. PSD violations are surfaced, never clipped.
    void validate(double herm_tol = 1e-10, double trace_tol = 1e-10, double psd_floor = -1e-9) const {
        if (!rho.allFinite()) throw std::runtime_error("DensityMatrix: non-finite entries");
        const double he = hermiticity_error();
        if (he > herm_tol) throw std::runtime_error("DensityMatrix: hermiticity residual " + std::to_string(he));
        const double te = trace_error();
        if (te > trace_tol) throw std::runtime_error("DensityMatrix: trace deviates from 1 by " + std::to_string(te));
        const double mn = min_eigenvalue();
        if (mn < psd_floor) throw std::runtime_error("DensityMatrix: minimum eigenvalue " + std::to_string(mn));
    }
};

inline DensityMatrix fully_mixed_state(const BasisPtr& basis) {
    const int d = basis->size();
    return {basis, Matrix::Identity(d, d) / static_cast<double>(d)};
}

// Trace norm of a Hermitian matrix (sum of |eigenvalues|).
inline double trace_norm(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (hermitian + hermitian.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

// --------------------------- matrix exponential ------------------------------

namespace detail {

inline double l1_norm(const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

// Pade numerator/denominator split: U collects odd powers, V even powers.
inline void pade_uv(const Matrix& a, const std::vector<double>& b, Matrix& u, Matrix& v) {
    const Eigen::Index n = a.rows();
    const Matrix id = Matrix::Identity(n, n);
    const int m = static_cast<int>(b.size()) - 1;
    const Matrix a2 = a * a;
    if (m == 3) {
        u = a * (b[3] * a2 + b[1] * id);
        v = b[2] * a2 + b[0] * id;
        return;
    }
    const Matrix a4 = a2 * a2;
    if (m == 5) {
        u = a * (b[5] * a4 + b[3] * a2 + b[1] * id);
        v = b[4] * a4 + b[2] * a2 + b[0] * id;
        return;
    }
    const Matrix a6 = a2 * a4;
    if (m == 7) {
        u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
        v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
        return;
    }
    if (m == 9) {
        const Matrix a8 = a4 * a4;
        u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
        v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
        return;
    }
    // m == 13
    u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

}  // namespace detail

// Scaling-and-squaring Pade exponential (orders 3/5/7/9/13 picked by 1-norm).
inline Matrix expm(const Matrix& a_in) {
    if (a_in.rows() != a_in.cols()) throw std::invalid_argument("expm: matrix must be square");
    if (!a_in.allFinite()) throw std::invalid_argument("expm: non-finite entries");

    static const std::vector<double> b3 = {120, 60, 12, 1};
    static const std::vector<double> b5 = {30240, 15120, 3360, 420, 30, 1};
    static const std::vector<double> b7 = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
    static const std::vector<double> b9 = {17643225600., 8821612800., 2075673600., 302702400.,
                                           30270240., 2162160., 110880., 3960., 90., 1.};
    static const std::vector<double> b13 = {64764752532480000., 32382376266240000., 7771770303897600.,
                                            1187353796428800., 129060195264000., 10559470521600.,
                                            670442572800., 33522128640., 1323241920., 40840800.,
                                            960960., 16380., 182., 1.};
    constexpr double theta3 = 1.495585217958292e-2;
    constexpr double theta5 = 2.539398330063230e-1;
    constexpr double theta7 = 9.504178996162932e-1;
    constexpr double theta9 = 2.097847961257068e0;
    constexpr double theta13 = 5.371920351148152e0;

    const double nrm = detail::l1_norm(a_in);
    Matrix u, v;
    int squarings = 0;
    if (nrm <= theta9) {
        const std::vector<double>* b = &b9;
        if (nrm <= theta3) b = &b3;
        else if (nrm <= theta5) b = &b5;
        else if (nrm <= theta7) b = &b7;
        detail::pade_uv(a_in, *b, u, v);
    } else {
        if (nrm > theta13) squarings = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
        const Matrix a = a_in * std::ldexp(1.0, -squarings);
        detail::pade_uv(a, b13, u, v);
    }
    Matrix r = (v - u).partialPivLu().solve(v + u);
    for (int i = 0; i < squarings; ++i) r = r * r;
    return r;
}

// ------------------------------- propagator ----------------------------------

struct Propagator {
    BasisPtr basis;
    Matrix matrix;  // e^{L dt} on vectorized states
    double dt{0.0};
    double s{0.0};
    double epsilon{0.0};

    DensityMatrix apply(const DensityMatrix& state) const {
        const int d = basis->size();
        if (state.basis->size() != d) throw std::invalid_argument("Propagator::apply: sector mismatch");
        return {state.basis, unvec(matrix * vec(state.rho), d)};
    }
};

inline Propagator make_propagator(const Liouvillian& lio, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("make_propagator: dt must be > 0");
    return {lio.basis, expm(dt * lio.matrix), dt, lio.dissipator.s, lio.dissipator.epsilon};
}

// ------------------------------ steady state ---------------------------------

struct SteadyState {
    DensityMatrix rho;
    double residual{0.0};  // ||L vec(rho)||_2
    double gap{0.0};       // -max Re(lambda) over nonzero eigenvalues
};

struct Spectrum {
    Eigen::VectorXcd eigenvalues;  // sorted by descending real part
    double gap{0.0};
    double t_mix{0.0};  // 1/gap
    int zero_modes{0};  // eigenvalues with |lambda| <= 1e-9
};

inline constexpr double kZeroModeTol = 1e-9;

inline Spectrum spectrum(const Liouvillian& lio) {
    Eigen::ComplexEigenSolver<Matrix> es(lio.matrix, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw std::runtime_error("spectrum: eigensolver failed to converge");
    Eigen::VectorXcd evs = es.eigenvalues();
    std::sort(evs.data(), evs.data() + evs.size(),
              [](const Complex& a, const Complex& b) { return a.real() > b.real(); });
    Spectrum out;
    out.eigenvalues = evs;
    double max_re = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < evs.size(); ++k) {
        if (std::abs(evs[k]) <= kZeroModeTol) {
            ++out.zero_modes;
        } else {
            max_re = std::max(max_re, evs[k].real());
        }
    }
    out.gap = -max_re;
    out.t_mix = out.gap > 0.0 ? 1.0 / out.gap : std::numeric_limits<double>::infinity();
    return out;
}

namespace detail {

// Solve the bordered system [L; trace-row] x = e_last in least squares, then
// polish with iterative refinement using long double residuals. The exact
// steady state solves the system exactly (the null space is one-dimensional
// and has nonzero trace), so refinement drives the forward error well below
// the norm-wise bound of a single QR solve; the geometric steady-state
// profiles probed in tests span ~9 decades and need that headroom.
inline Vector bordered_null_vector(const Matrix& superop, int d) {
    using LongMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
    using LongVector = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, 1>;
    const Eigen::Index d2 = superop.rows();
    Matrix k(d2 + 1, d2);
    k.topRows(d2) = superop;
    k.row(d2).setZero();
    for (int i = 0; i < d; ++i) k(d2, static_cast<Eigen::Index>(i) * d + i) = 1.0;

    Vector b = Vector::Zero(d2 + 1);
    b[d2] = 1.0;

    Eigen::ColPivHouseholderQR<Matrix> qr(k);
    Vector x = qr.solve(b);

    const LongMatrix kl = k.cast<std::complex<long double>>();
    const LongVector bl = b.cast<std::complex<long double>>();
    for (int pass = 0; pass < 3; ++pass) {
        const LongVector r = bl - kl * x.cast<std::complex<long double>>();
        const Vector delta = qr.solve(r.unaryExpr([](const std::complex<long double>& z) {
            return Complex(static_cast<double>(z.real()), static_cast<double>(z.imag()));
        }));
        x += delta;
    }
    return x;
}

}  // namespace detail

// Unique stationary state from the null space of the superoperator, then
// Hermitized and trace-normalized. Throws if the null space is degenerate
// (more than one eigenvalue within kZeroModeTol of zero).
inline SteadyState steady_state(const Liouvillian& lio) {
    const int d = lio.dim();
    const Spectrum spec = spectrum(lio);
    if (spec.zero_modes != 1) {
        throw std::runtime_error("steady_state: degenerate null space (" + std::to_string(spec.zero_modes) +
                                 " zero modes); generator violates uniqueness");
    }

    Vector x = detail::bordered_null_vector(lio.matrix, d);
    Matrix rho = unvec(x, d);
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace().real();

    SteadyState out;
    out.rho = {lio.basis, std::move(rho)};
    out.residual = (lio.matrix * vec(out.rho.rho)).norm();
    out.gap = spec.gap;
    if (out.residual > 1e-10 * std::max(1.0, detail::l1_norm(lio.matrix))) {
        throw std::runtime_error("steady_state: residual " + std::to_string(out.residual) +
                                 " exceeds tolerance; solve did not converge");
    }
    return out;
}

// Frobenius distance between the steady states of two input values.
inline double separability_distance(const NetworkSpec& network, const DissipatorSpec& base, double s1,
                                    double s2, const BasisPtr& basis) {
    const SteadyState a = steady_state(assemble_liouvillian(network, base.with_input(s1), basis));
    const SteadyState b = steady_state(assemble_liouvillian(network, base.with_input(s2), basis));
    return (a.rho.rho - b.rho.rho).norm();
}

// ---------------------------- step propagation -------------------------------

// Cache of step propagators keyed by (s, epsilon, dt, generator hash); safe
// for concurrent lookup with exclusive insert. Bounded so that continuous
// input alphabets do not accumulate one entry per step.
class PropagatorCache {
public:
    using Key = std::tuple<double, double, double, std::uint64_t>;

    explicit PropagatorCache(std::size_t capacity = 64) : capacity_(capacity) {}

    std::shared_ptr<const Matrix> find(const Key& key) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = entries_.find(key);
        return it == entries_.end() ? nullptr : it->second;
    }

    std::shared_ptr<const Matrix> insert(const Key& key, Matrix value) {
        auto holder = std::make_shared<const Matrix>(std::move(value));
        std::lock_guard<std::mutex> lock(mu_);
        if (entries_.size() < capacity_) entries_.emplace(key, holder);
        return holder;
    }

    std::size_t size() const {
        std::lock_guard<std::mutex> lock(mu_);
        return entries_.size();
    }

private:
    mutable std::mutex mu_;
    std::map<Key, std::shared_ptr<const Matrix>> entries_;
    std::size_t capacity_;
};

// Drives vec(rho) through the input-dependent update map. The generator is
// affine in the input, L(s) = L(0) + s (L(1) - L(0)), so only two assemblies
// happen per evolver; each distinct s needs one matrix exponential, cached
// for discrete input alphabets.
class StepEvolver {
public:
    StepEvolver(NetworkSpec network, DissipatorSpec dissipator, BasisPtr basis, double dt,
                std::shared_ptr<PropagatorCache> cache = nullptr)
        : basis_(std::move(basis)),
          network_(std::move(network)),
          dissipator_(std::move(dissipator)),
          dt_(dt),
          cache_(cache ? std::move(cache) : std::make_shared<PropagatorCache>()) {
        if (!(dt_ > 0.0)) throw std::invalid_argument("StepEvolver: dt must be > 0");
        l0_ = assemble_liouvillian(network_, dissipator_.with_input(0.0), basis_).matrix;
        dl_ = assemble_liouvillian(network_, dissipator_.with_input(1.0), basis_).matrix - l0_;
        hash_ = generator_hash(network_, dissipator_);
    }

    const BasisPtr& basis() const { return basis_; }
    const NetworkSpec& network() const { return network_; }
    const DissipatorSpec& dissipator() const { return dissipator_; }
    double dt() const { return dt_; }

    Matrix superoperator(double s) const { return l0_ + s * dl_; }

    std::shared_ptr<const Matrix> propagator(double s) {
        const PropagatorCache::Key key{s, dissipator_.epsilon, dt_, hash_};
        if (auto hit = cache_->find(key)) return hit;
        return cache_->insert(key, expm(dt_ * superoperator(s)));
    }

    void step(double s, Vector& vec_rho) { vec_rho = (*propagator(s)) * vec_rho; }

private:
    BasisPtr basis_;
    NetworkSpec network_;
    DissipatorSpec dissipator_;
    double dt_;
    std::shared_ptr<PropagatorCache> cache_;
    Matrix l0_, dl_;
    std::uint64_t hash_{0};
};

// Per-step trace-norm distance between two states driven by the same inputs.
// Rejects states from different sectors: across sectors each state relaxes
// inside its own symmetry block and the distance need not contract.
inline std::vector<double> esp_distance_trace(StepEvolver& evolver, const DensityMatrix& rho1,
                                              const DensityMatrix& rho2, const std::vector<double>& inputs) {
    const BasisPtr& basis = evolver.basis();
    if (rho1.basis->sites() != basis->sites() || rho1.basis->bosons() != basis->bosons() ||
        rho2.basis->sites() != basis->sites() || rho2.basis->bosons() != basis->bosons()) {
        throw std::invalid_argument("esp_distance_trace: states must live in the evolver's sector");
    }
    const int d = basis->size();
    Vector v1 = vec(rho1.rho);
    Vector v2 = vec(rho2.rho);
    std::vector<double> distances;
    distances.reserve(inputs.size());
    for (double s : inputs) {
        evolver.step(s, v1);
        evolver.step(s, v2);
        distances.push_back(trace_norm(unvec(v1 - v2, d)));
    }
    return distances;
}

// ---------------------------- site observables -------------------------------

struct SiteProfile {
    Eigen::VectorXd populations;   // <n_l>
    Eigen::VectorXcd coherences;   // <a_1 a_l^dag>
};

// Expectation values against sector-embedded operators. The coherence
// operator is normal-ordered inside the sector: a_1 a_l^dag = a_l^dag a_1 for
// l != 1, and n_1 + 1 for l = 1.
inline SiteProfile population_profile(const DensityMatrix& state) {
    const BasisPtr& basis = state.basis;
    const int sites = basis->sites();
    SiteProfile out;
    out.populations.resize(sites);
    out.coherences.resize(sites);
    for (int l = 1; l <= sites; ++l) {
        out.populations[l - 1] = (state.rho * number_operator(basis, l).matrix).trace().real();
        if (l == 1) {
            out.coherences[0] = (state.rho * (number_operator(basis, 1).matrix +
                                              Matrix::Identity(basis->size(), basis->size())))
                                    .trace();
        } else {
            out.coherences[l - 1] = (state.rho * hop_operator(basis, 1, l).matrix).trace();
        }
    }
    return out;
}

}  // namespace lskin
