// liouvillian.hpp — GKLS superoperator assembly with a tunable dissipative boundary.
//
// The generator is rho_dot = -i[H, rho] + sum_i rate_i (L_i rho L_i^dag
// - 1/2 {L_i^dag L_i, rho}). Directional jumps a^dag_{l+1} a_l (rate gamma*s)
// and a_{l+1} a^dag_l (rate gamma*(1-s)) encode the input s; the two boundary
// jumps between sites L and 1 carry their rates scaled by epsilon, which
// interpolates between open (0) and periodic (1) dissipative boundaries.
// On-site dephasing jumps n_l are input- and boundary-independent.
//
// Vectorization is column-stacking throughout: vec(A rho B) = (B^T kron A) vec(rho).
// Every solver, dump, and oracle in this library assumes it.

#pragma once

#include "lskin/fock.hpp"
#include "lskin/network.hpp"

#include <optional>
#include <vector>

namespace lskin {

struct DissipatorSpec {
    double gamma{1.0};    // incoherent hopping strength
    double s{0.5};        // input in [0, 1]; gamma_R = gamma*s, gamma_L = gamma*(1-s)
    double epsilon{0.0};  // boundary parameter in [0, 1]
    std::optional<double> dephasing_gamma;  // defaults to gamma
    bool dephasing_enabled{true};

    double right_rate() const { return gamma * s; }
    double left_rate() const { return gamma * (1.0 - s); }
    double dephasing_rate() const { return dephasing_enabled ? dephasing_gamma.value_or(gamma) : 0.0; }

    DissipatorSpec with_input(double s_k) const {
        DissipatorSpec out = *this;
        out.s = s_k;
        return out;
    }

    void validate() const {
        if (gamma < 0.0) throw std::invalid_argument("dissipator.gamma: must be >= 0");
        if (s < 0.0 || s > 1.0) throw std::invalid_argument("dissipator.s: must lie in [0, 1]");
        if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("dissipator.epsilon: must lie in [0, 1]");
        if (dephasing_gamma && *dephasing_gamma < 0.0) {
            throw std::invalid_argument("dissipator.dephasing_gamma: must be >= 0");
        }
    }
};

struct Boundary {
    double epsilon{0.0};

    static Boundary open() { return {0.0}; }
    static Boundary periodic() { return {1.0}; }
    static Boundary interpolated(double eps) {
        if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("boundary: epsilon must lie in [0, 1]");
        return {eps};
    }
};

// One jump channel: rate multiplies the GKLS dissipator of op.
struct Jump {
    double rate{0.0};
    Matrix op;
};

// Directional hopping jumps. Bulk: l -> l+1 at gamma*s and l+1 -> l at
// gamma*(1-s) for l = 1..L-1. Boundary pair (L -> 1, 1 -> L) carries rates
// scaled by epsilon. Zero-rate channels are omitted.
inline std::vector<Jump> hop_jumps(const BasisPtr& basis, const DissipatorSpec& spec, Boundary boundary) {
    spec.validate();
    const int L = basis->sites();
    const double gr = spec.right_rate();
    const double gl = spec.left_rate();
    std::vector<Jump> jumps;
    jumps.reserve(static_cast<std::size_t>(2 * L));
    for (int l = 1; l < L; ++l) {
        if (gr > 0.0) jumps.push_back({gr, hop_operator(basis, l, l + 1).matrix});
        if (gl > 0.0) jumps.push_back({gl, hop_operator(basis, l + 1, l).matrix});
    }
    if (L >= 2 && boundary.epsilon > 0.0) {
        if (gr > 0.0) jumps.push_back({boundary.epsilon * gr, hop_operator(basis, L, 1).matrix});
        if (gl > 0.0) jumps.push_back({boundary.epsilon * gl, hop_operator(basis, 1, L).matrix});
    }
    return jumps;
}

inline std::vector<Jump> dephasing_jumps(const BasisPtr& basis, const DissipatorSpec& spec) {
    std::vector<Jump> jumps;
    const double gd = spec.dephasing_rate();
    if (gd <= 0.0) return jumps;
    for (int l = 1; l <= basis->sites(); ++l) {
        jumps.push_back({gd, number_operator(basis, l).matrix});
    }
    return jumps;
}

// Full jump set of the generator: directional hops plus on-site dephasing.
inline std::vector<Jump> jump_set(const BasisPtr& basis, const DissipatorSpec& spec, Boundary boundary) {
    auto jumps = hop_jumps(basis, spec, boundary);
    auto deph = dephasing_jumps(basis, spec);
    jumps.insert(jumps.end(), std::make_move_iterator(deph.begin()), std::make_move_iterator(deph.end()));
    return jumps;
}

inline std::vector<Jump> jump_set(const BasisPtr& basis, const DissipatorSpec& spec) {
    return jump_set(basis, spec, Boundary::interpolated(spec.epsilon));
}

// ------------------------- vectorization helpers ----------------------------

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

// Column-stacking vec and its inverse.
inline Vector vec(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Matrix unvec(const Vector& v, int d) {
    if (v.size() != static_cast<Eigen::Index>(d) * d) {
        throw std::invalid_argument("unvec: length does not match dimension");
    }
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

// -i [H, .] as a superoperator.
inline Matrix commutator_superop(const Matrix& h) {
    const Eigen::Index d = h.rows();
    const Matrix id = Matrix::Identity(d, d);
    return Complex(0, -1) * (kron(id, h) - kron(h.transpose(), id));
}

// sum_i rate_i ( (L_i^conj kron L_i) - 1/2 (I kron L_i^dag L_i) - 1/2 ((L_i^dag L_i)^T kron I) ).
inline Matrix dissipator_superop(const std::vector<Jump>& jumps, int d) {
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
    const Matrix id = Matrix::Identity(d, d);
    for (const auto& jump : jumps) {
        const Matrix& l = jump.op;
        if (l.rows() != d || l.cols() != d) throw std::invalid_argument("dissipator_superop: jump dimension mismatch");
        const Matrix ldl = l.adjoint() * l;
        out += jump.rate * (kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id));
    }
    return out;
}

// D(s, epsilon) of the directional hops only: equals D_OB(s) + epsilon*(D_PB(s) - D_OB(s)),
// realized by scaling the two boundary jump rates by epsilon.
inline Matrix interpolated_dissipator(const BasisPtr& basis, const DissipatorSpec& spec) {
    return dissipator_superop(hop_jumps(basis, spec, Boundary::interpolated(spec.epsilon)), basis->size());
}

// ------------------------------- Liouvillian --------------------------------

struct Liouvillian {
    BasisPtr basis;
    Matrix matrix;  // d^2 x d^2, column-stacking convention
    NetworkSpec network;        // provenance
    DissipatorSpec dissipator;  // provenance

    int dim() const { return basis ? basis->size() : 0; }
};

inline Liouvillian build_liouvillian(const SectorOperator& h, const std::vector<Jump>& jumps) {
    const int d = h.dim();
    if (h.matrix.rows() != d || h.matrix.cols() != d) {
        throw std::invalid_argument("build_liouvillian: Hamiltonian dimension mismatch");
    }
    Liouvillian lio;
    lio.basis = h.basis;
    lio.matrix = commutator_superop(h.matrix) + dissipator_superop(jumps, d);
    return lio;
}

// Full generator of the update map: -i[H, .] + D(s, epsilon) + D_d.
inline Liouvillian assemble_liouvillian(const NetworkSpec& network, const DissipatorSpec& dissipator,
                                        const BasisPtr& basis) {
    const SectorOperator h = build_hamiltonian(network, basis);
    Liouvillian lio = build_liouvillian(h, jump_set(basis, dissipator));
    lio.network = network;
    lio.dissipator = dissipator;
    return lio;
}

// Max |entry| of vec(I)^T L; zero for any trace-preserving generator.
inline double trace_preservation_residual(const Matrix& superop) {
    const auto d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(superop.rows()))));
    const Vector id = vec(Matrix::Identity(d, d));
    return (id.transpose() * superop).cwiseAbs().maxCoeff();
}

// Hash covering everything the step propagator depends on besides (s, dt).
inline std::uint64_t generator_hash(const NetworkSpec& network, const DissipatorSpec& dissipator) {
    std::uint64_t h = network_hash(network);
    h = detail::fnv1a_value(h, dissipator.gamma);
    h = detail::fnv1a_value(h, dissipator.epsilon);
    const double gd = dissipator.dephasing_rate();
    h = detail::fnv1a_value(h, gd);
    return h;
}

}  // namespace lskin
