#include "xxz/basis.hpp"

#include <bit>

#include "xxz/errors.hpp"

namespace xxz {

namespace {

std::vector<int> spins_of(const SpinGraph& g) {
    std::vector<int> ts(g.size());
    for (int i = 0; i < g.size(); ++i) ts[i] = g.sites()[i].twice_spin;
    return ts;
}

}  // namespace

bool SectorBasis::realizable(std::span<const int> twice_spins, int twice_m) {
    int total = 0;
    for (int ts : twice_spins) total += ts;
    if (twice_m < -total || twice_m > total) return false;
    return (total - twice_m) % 2 == 0;
}

std::shared_ptr<const SectorBasis> SectorBasis::build(const SpinGraph& g, int twice_m) {
    const auto ts = spins_of(g);
    return build(ts, twice_m);
}

std::shared_ptr<const SectorBasis> SectorBasis::build(std::span<const int> twice_spins,
                                                      int twice_m) {
    if (!realizable(twice_spins, twice_m))
        throw InvalidArgument("magnetization sector is not realizable (range or parity)");
    auto basis = std::shared_ptr<SectorBasis>(new SectorBasis());
    basis->twice_m_ = twice_m;
    basis->n_ = static_cast<int>(twice_spins.size());
    basis->twice_spins_.assign(twice_spins.begin(), twice_spins.end());

    // Variable-width bit packing for tuple lookup.
    basis->bit_shift_.resize(basis->n_ + 1);
    int shift = 0;
    for (int i = 0; i < basis->n_; ++i) {
        basis->bit_shift_[i] = shift;
        shift += std::bit_width(static_cast<unsigned>(twice_spins[i] + 1));
    }
    basis->bit_shift_[basis->n_] = shift;
    if (shift > 64) throw BudgetExceeded("basis tuple does not pack into 64 bits");

    // Suffix bounds for pruning the lexicographic recursion.
    std::vector<int> suffix(basis->n_ + 1, 0);
    for (int i = basis->n_ - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + twice_spins[i];

    std::vector<std::int8_t> current(basis->n_);
    auto rec = [&](auto&& self, int site, int remaining) -> void {
        if (site == basis->n_) {
            basis->states_.insert(basis->states_.end(), current.begin(), current.end());
            return;
        }
        const int rest = suffix[site + 1];
        for (int tm = -twice_spins[site]; tm <= twice_spins[site]; tm += 2) {
            const int r = remaining - tm;
            if (r < -rest || r > rest) continue;
            current[site] = static_cast<std::int8_t>(tm);
            self(self, site + 1, r);
        }
    };
    rec(rec, 0, twice_m);
    basis->dim_ = basis->states_.size() / basis->n_;

    basis->lookup_.reserve(basis->dim_ * 2);
    for (std::size_t q = 0; q < basis->dim_; ++q)
        basis->lookup_.emplace(basis->pack(basis->state(q)), static_cast<std::uint32_t>(q));
    return basis;
}

std::uint64_t SectorBasis::pack(std::span<const std::int8_t> twice_ms) const {
    std::uint64_t key = 0;
    for (int i = 0; i < n_; ++i) {
        const auto digit = static_cast<std::uint64_t>((twice_ms[i] + twice_spins_[i]) / 2);
        key |= digit << bit_shift_[i];
    }
    return key;
}

std::size_t SectorBasis::index_of(std::span<const std::int8_t> twice_ms) const {
    const auto it = lookup_.find(pack(twice_ms));
    if (it == lookup_.end()) throw InvalidArgument("tuple is not in this sector");
    return it->second;
}

bool SectorBasis::contains(std::span<const std::int8_t> twice_ms) const {
    return lookup_.count(pack(twice_ms)) != 0;
}

std::vector<int> realizable_twice_m(const SpinGraph& g) {
    std::vector<int> out;
    const int total = g.twice_total_spin();
    for (int tm = -total; tm <= total; tm += 2) out.push_back(tm);
    return out;
}

}  // namespace xxz
