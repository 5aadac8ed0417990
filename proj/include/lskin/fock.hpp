// fock.hpp — fixed-excitation bosonic Fock sectors and sector-embedded operators.
//
// The N_b-boson, L-site sector is the arena every operator in this library
// lives in. States are occupation vectors (n_1, ..., n_L) with sum n_l = N_b,
// enumerated in lexicographically descending order so that basis indices, and
// everything serialized downstream, are stable across runs.
//
// Site indices are 1-based throughout the public API, matching the lattice
// labeling l = 1..L.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace lskin {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Guard against combinatorial blow-up: dense superoperators scale as d^4.
inline constexpr std::size_t kDefaultSectorCap = 5000;

// binomial(sites + bosons - 1, bosons), saturating at SIZE_MAX on overflow.
inline std::size_t sector_dimension(int sites, int bosons) {
    if (sites < 1 || bosons < 0) return 0;
    std::size_t acc = 1;
    for (std::size_t i = 1; i <= static_cast<std::size_t>(bosons); ++i) {
        const std::size_t num = static_cast<std::size_t>(sites) - 1 + i;
        if (acc > SIZE_MAX / num) return SIZE_MAX;
        acc = acc * num / i;  // exact: acc holds binomial(sites-1+i, i)
    }
    return acc;
}

class FockBasis {
public:
    FockBasis(int sites, int bosons, std::vector<std::vector<int>> states)
        : sites_(sites), bosons_(bosons), states_(std::move(states)) {
        for (int k = 0; k < static_cast<int>(states_.size()); ++k) {
            index_.emplace(states_[k], k);
        }
    }

    int sites() const { return sites_; }
    int bosons() const { return bosons_; }
    int size() const { return static_cast<int>(states_.size()); }

    const std::vector<int>& state(int k) const { return states_.at(static_cast<std::size_t>(k)); }
    const std::vector<std::vector<int>>& states() const { return states_; }

    bool contains(const std::vector<int>& occupation) const {
        return index_.find(occupation) != index_.end();
    }

    int index_of(const std::vector<int>& occupation) const {
        auto it = index_.find(occupation);
        if (it == index_.end()) {
            throw std::invalid_argument("FockBasis::index_of: occupation vector not in sector");
        }
        return it->second;
    }

private:
    int sites_;
    int bosons_;
    std::vector<std::vector<int>> states_;
    std::map<std::vector<int>, int> index_;
};

using BasisPtr = std::shared_ptr<const FockBasis>;

// Enumerate the (sites, bosons) sector in descending lexicographic order.
inline BasisPtr enumerate_sector(int sites, int bosons, std::size_t cap = kDefaultSectorCap) {
    if (sites < 1) throw std::invalid_argument("enumerate_sector: need at least one site");
    if (bosons < 0) throw std::invalid_argument("enumerate_sector: negative boson count");
    const std::size_t dim = sector_dimension(sites, bosons);
    if (dim > cap) {
        throw std::runtime_error("enumerate_sector: sector dimension " + std::to_string(dim) +
                                 " exceeds cap " + std::to_string(cap));
    }

    std::vector<std::vector<int>> states;
    states.reserve(dim);
    std::vector<int> occ(static_cast<std::size_t>(sites), 0);
    // Fill site by site, largest occupation first; the last site takes the rest.
    auto rec = [&](auto&& self, int site, int remaining) -> void {
        if (site == sites - 1) {
            occ[static_cast<std::size_t>(site)] = remaining;
            states.push_back(occ);
            return;
        }
        for (int n = remaining; n >= 0; --n) {
            occ[static_cast<std::size_t>(site)] = n;
            self(self, site + 1, remaining - n);
        }
    };
    rec(rec, 0, bosons);

    return std::make_shared<const FockBasis>(sites, bosons, std::move(states));
}

// A dense operator restricted to one Fock sector.
struct SectorOperator {
    BasisPtr basis;
    Matrix matrix;

    int dim() const { return basis ? basis->size() : 0; }
};

namespace detail {
inline void check_site(const FockBasis& basis, int site, const char* who) {
    if (site < 1 || site > basis.sites()) {
        throw std::invalid_argument(std::string(who) + ": site index " + std::to_string(site) +
                                    " outside 1.." + std::to_string(basis.sites()));
    }
}
}  // namespace detail

// a^dag_to a_from embedded on the sector:
// <m| a^dag_to a_from |n> = sqrt(n_from) sqrt(n_to + 1) when m is n with one
// boson moved from `from` to `to`, else 0.
inline SectorOperator hop_operator(const BasisPtr& basis, int from, int to) {
    detail::check_site(*basis, from, "hop_operator");
    detail::check_site(*basis, to, "hop_operator");
    if (from == to) throw std::invalid_argument("hop_operator: from == to (use number_operator)");

    const int d = basis->size();
    Matrix m = Matrix::Zero(d, d);
    std::vector<int> moved;
    for (int col = 0; col < d; ++col) {
        const auto& occ = basis->state(col);
        const int n_from = occ[static_cast<std::size_t>(from - 1)];
        if (n_from == 0) continue;
        moved = occ;
        moved[static_cast<std::size_t>(from - 1)] -= 1;
        moved[static_cast<std::size_t>(to - 1)] += 1;
        const int n_to = occ[static_cast<std::size_t>(to - 1)];
        const double amp = std::sqrt(static_cast<double>(n_from)) * std::sqrt(static_cast<double>(n_to + 1));
        m(basis->index_of(moved), col) = amp;
    }
    return {basis, std::move(m)};
}

// a^dag_site a_site: diagonal occupation of one site.
inline SectorOperator number_operator(const BasisPtr& basis, int site) {
    detail::check_site(*basis, site, "number_operator");
    const int d = basis->size();
    Matrix m = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        m(k, k) = static_cast<double>(basis->state(k)[static_cast<std::size_t>(site - 1)]);
    }
    return {basis, std::move(m)};
}

// Sum of all site occupations; equals bosons() * identity on the sector.
inline SectorOperator total_number_operator(const BasisPtr& basis) {
    const int d = basis->size();
    Matrix m = Matrix::Zero(d, d);
    for (int site = 1; site <= basis->sites(); ++site) {
        m += number_operator(basis, site).matrix;
    }
    return {basis, std::move(m)};
}

inline SectorOperator identity_operator(const BasisPtr& basis) {
    return {basis, Matrix::Identity(basis->size(), basis->size())};
}

}  // namespace lskin
