// network.hpp — network topologies and the sector Hamiltonian.
//
// Two configurations: a linear chain whose boundary coupling J_{L,1} scales
// with the boundary parameter epsilon, and an irregular network of random
// coherent pairs whose Hamiltonian does not depend on epsilon at all (only
// the dissipative boundary does, see liouvillian.hpp).

#pragma once

#include "lskin/fock.hpp"
#include "lskin/rng.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace lskin {

enum class Topology { Chain, Irregular };

inline const char* topology_name(Topology t) {
    return t == Topology::Chain ? "chain" : "irregular";
}

inline Topology topology_from_name(const std::string& name) {
    if (name == "chain") return Topology::Chain;
    if (name == "irregular") return Topology::Irregular;
    throw std::invalid_argument("topology: expected \"chain\" or \"irregular\", got \"" + name + "\"");
}

// One undirected coherent coupling amplitude * (a_i a_j^dag + a_i^dag a_j).
struct Edge {
    int i{0};
    int j{0};
    double amplitude{0.0};
};

struct NetworkSpec {
    int sites{0};
    Topology topology{Topology::Chain};
    double J{1.0};
    double W{0.0};        // disorder width; w_l uniform on [-W/2, W/2]
    double epsilon{0.0};  // boundary parameter in [0, 1]
    int edge_count{0};    // irregular only: number of sampled pairs
    std::uint64_t seed{0};

    std::vector<double> onsite;  // realized w_l (size = sites)
    std::vector<Edge> edges;     // realized couplings

    bool realized() const { return !onsite.empty(); }

    void validate() const {
        if (sites < 2) throw std::invalid_argument("network.sites: must be >= 2");
        if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("network.epsilon: must lie in [0, 1]");
        if (W < 0.0) throw std::invalid_argument("network.W: must be >= 0");
        if (topology == Topology::Irregular) {
            const long max_edges = static_cast<long>(sites) * (sites - 1) / 2;
            if (edge_count < 0 || edge_count > max_edges) {
                throw std::invalid_argument("network.edge_count: must lie in 0.." + std::to_string(max_edges));
            }
        }
    }
};

inline int default_edge_count(int sites) {
    return std::min(2 * sites, sites * (sites - 1) / 2);
}

// Draw disorder and (for irregular topology) the coherent edge set.
// Identical seed yields an identical spec.
inline NetworkSpec sample_network(int sites, Topology topology, double J, double W, double epsilon,
                                  int edge_count, std::uint64_t seed) {
    NetworkSpec spec;
    spec.sites = sites;
    spec.topology = topology;
    spec.J = J;
    spec.W = W;
    spec.epsilon = epsilon;
    spec.edge_count = topology == Topology::Irregular ? edge_count : 0;
    spec.seed = seed;
    spec.validate();

    Rng rng(seed);
    spec.onsite.resize(static_cast<std::size_t>(sites));
    for (auto& w : spec.onsite) w = W * (rng.uniform() - 0.5);

    if (topology == Topology::Chain) {
        for (int l = 1; l < sites; ++l) spec.edges.push_back({l, l + 1, J});
        // Boundary coupling J_{L,1} = epsilon * J. For sites == 2 the pair
        // (2,1) coincides with the bulk edge (1,2) and is not added twice.
        if (epsilon > 0.0 && sites > 2) spec.edges.push_back({sites, 1, epsilon * J});
    } else {
        std::vector<std::pair<int, int>> pairs;
        pairs.reserve(static_cast<std::size_t>(sites) * (sites - 1) / 2);
        for (int i = 1; i <= sites; ++i) {
            for (int j = i + 1; j <= sites; ++j) pairs.emplace_back(i, j);
        }
        // Partial Fisher-Yates: the first edge_count entries are a uniform
        // sample without replacement.
        for (int k = 0; k < edge_count; ++k) {
            const auto n_left = static_cast<std::size_t>(pairs.size() - static_cast<std::size_t>(k));
            const auto pick = static_cast<std::size_t>(k) + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n_left));
            std::swap(pairs[static_cast<std::size_t>(k)], pairs[pick]);
        }
        pairs.resize(static_cast<std::size_t>(edge_count));
        std::sort(pairs.begin(), pairs.end());
        for (const auto& [i, j] : pairs) spec.edges.push_back({i, j, J});
    }
    return spec;
}

// H = sum_l w_l n_l + sum_edges amplitude (a_i a_j^dag + a_i^dag a_j),
// embedded on the sector. Hermitian by construction (A + A^dag fill).
inline SectorOperator build_hamiltonian(const NetworkSpec& spec, const BasisPtr& basis) {
    if (spec.sites != basis->sites()) {
        throw std::invalid_argument("build_hamiltonian: spec has " + std::to_string(spec.sites) +
                                    " sites, basis has " + std::to_string(basis->sites()));
    }
    if (!spec.realized()) throw std::invalid_argument("build_hamiltonian: spec has no realized disorder");

    const int d = basis->size();
    Matrix h = Matrix::Zero(d, d);
    for (int site = 1; site <= spec.sites; ++site) {
        h += spec.onsite[static_cast<std::size_t>(site - 1)] * number_operator(basis, site).matrix;
    }
    Matrix hops = Matrix::Zero(d, d);
    for (const auto& e : spec.edges) {
        hops += e.amplitude * hop_operator(basis, e.i, e.j).matrix;
    }
    h += hops + hops.adjoint();
    return {basis, std::move(h)};
}

namespace detail {
inline std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <typename T>
std::uint64_t fnv1a_value(std::uint64_t h, const T& v) {
    return fnv1a(h, &v, sizeof(v));
}
}  // namespace detail

// Structural hash of a realized network, used to key propagator caches.
inline std::uint64_t network_hash(const NetworkSpec& spec) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = detail::fnv1a_value(h, spec.sites);
    h = detail::fnv1a_value(h, spec.topology);
    h = detail::fnv1a_value(h, spec.J);
    h = detail::fnv1a_value(h, spec.W);
    h = detail::fnv1a_value(h, spec.epsilon);
    for (double w : spec.onsite) h = detail::fnv1a_value(h, w);
    for (const auto& e : spec.edges) {
        h = detail::fnv1a_value(h, e.i);
        h = detail::fnv1a_value(h, e.j);
        h = detail::fnv1a_value(h, e.amplitude);
    }
    return h;
}

}  // namespace lskin
