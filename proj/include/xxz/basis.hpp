#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "xxz/lattice.hpp"

namespace xxz {

// Basis of one total-magnetization sector: all tuples (m_1..m_N) with
// sum_i m_i = M, ordered lexicographically (site 0 most significant, m
// ascending from -s). Magnetizations are stored as integers 2m.
class SectorBasis {
public:
    static std::shared_ptr<const SectorBasis> build(const SpinGraph& g, int twice_m);
    static std::shared_ptr<const SectorBasis> build(std::span<const int> twice_spins,
                                                    int twice_m);

    int twice_m() const { return twice_m_; }
    std::size_t dim() const { return dim_; }
    int sites() const { return n_; }
    int twice_spin(int site) const { return twice_spins_[site]; }

    // 2m of `site` in basis state `idx`.
    int twice_m_at(std::size_t idx, int site) const { return states_[idx * n_ + site]; }
    std::span<const std::int8_t> state(std::size_t idx) const {
        return {states_.data() + idx * n_, static_cast<std::size_t>(n_)};
    }

    // Position of a magnetization tuple; throws if it is not in the sector.
    std::size_t index_of(std::span<const std::int8_t> twice_ms) const;
    bool contains(std::span<const std::int8_t> twice_ms) const;

    static bool realizable(std::span<const int> twice_spins, int twice_m);

private:
    SectorBasis() = default;
    std::uint64_t pack(std::span<const std::int8_t> twice_ms) const;

    int twice_m_ = 0;
    int n_ = 0;
    std::size_t dim_ = 0;
    std::vector<int> twice_spins_;
    std::vector<std::int8_t> states_;       // dim x N, twice-m values
    std::vector<int> bit_shift_;            // packing layout for the lookup key
    std::unordered_map<std::uint64_t, std::uint32_t> lookup_;
};

// All realizable 2M values, ascending.
std::vector<int> realizable_twice_m(const SpinGraph& g);

}  // namespace xxz
