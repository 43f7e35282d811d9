#include "tdrc/tile_coder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tdrc::env {

void TileCoderConfig::validate() const {
    if (n_tilings < 1) throw std::invalid_argument("n_tilings must be at least 1");
    if (tiles_per_dim.empty()) throw std::invalid_argument("tiles_per_dim must not be empty");
    if (tiles_per_dim.size() != state_bounds.size())
        throw std::invalid_argument("tiles_per_dim and state_bounds differ in length");
    for (int t : tiles_per_dim)
        if (t < 1) throw std::invalid_argument("tiles_per_dim entries must be at least 1");
    for (auto [lo, hi] : state_bounds)
        if (!(lo < hi)) throw std::invalid_argument("state bound low must be below high");
}

int TileCoderConfig::tiles_per_tiling() const {
    int total = 1;
    for (int t : tiles_per_dim) total *= t;
    return total;
}

TileCoder::TileCoder(TileCoderConfig config) : config_(std::move(config)) {
    config_.validate();
    per_tiling_ = config_.tiles_per_tiling();
    const std::size_t dims = config_.tiles_per_dim.size();
    offsets_.resize(config_.n_tilings * dims);
    for (int i = 0; i < config_.n_tilings; ++i)
        for (std::size_t d = 0; d < dims; ++d)
            offsets_[i * dims + d] = static_cast<double>(i) / config_.n_tilings;
}

void TileCoder::active(std::span<const double> state, std::vector<int>& out, bool* clamped) const {
    const std::size_t dims = config_.tiles_per_dim.size();
    if (state.size() != dims) throw std::invalid_argument("state dimension does not match tile coder");
    bool was_clamped = false;
    double scaled[8];
    std::vector<double> scaled_heap;
    double* u = scaled;
    if (dims > 8) {
        scaled_heap.resize(dims);
        u = scaled_heap.data();
    }
    for (std::size_t d = 0; d < dims; ++d) {
        auto [lo, hi] = config_.state_bounds[d];
        double s = state[d];
        if (s < lo || s > hi) {
            was_clamped = true;
            s = std::clamp(s, lo, hi);
        }
        u[d] = (s - lo) / tile_width(d);
    }
    out.resize(config_.n_tilings);
    for (int i = 0; i < config_.n_tilings; ++i) {
        int flat = 0;
        for (std::size_t d = 0; d < dims; ++d) {
            int n = config_.tiles_per_dim[d];
            int cell = static_cast<int>(std::floor(u[d] + offsets_[i * dims + d]));
            cell = std::clamp(cell, 0, n - 1);
            flat = flat * n + cell;
        }
        out[i] = i * per_tiling_ + flat;
    }
    if (clamped) *clamped = was_clamped;
}

double TileCoder::tile_width(std::size_t d) const {
    auto [lo, hi] = config_.state_bounds.at(d);
    const double span = config_.tiles_per_dim.at(d) - static_cast<double>(config_.n_tilings - 1) / config_.n_tilings;
    return (hi - lo) / span;
}

std::vector<int> TileCoder::active(std::span<const double> state, bool* clamped) const {
    std::vector<int> out;
    active(state, out, clamped);
    return out;
}

}  // namespace tdrc::env
