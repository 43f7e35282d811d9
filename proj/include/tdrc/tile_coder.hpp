#pragma once

#include <span>
#include <utility>
#include <vector>

namespace tdrc::env {

struct TileCoderConfig {
    int n_tilings = 16;
    std::vector<int> tiles_per_dim{4, 4};
    std::vector<std::pair<double, double>> state_bounds{{-1.2, 0.5}, {-0.07, 0.07}};

    void validate() const;
    int tiles_per_tiling() const;
    int dimension() const { return n_tilings * tiles_per_tiling(); }
};

// Dense-grid tile coder. Tiling i is shifted by i / n_tilings of a tile width
// along every dimension. Tiles are sized so the most-shifted tiling still
// covers the bounds with tiles_per_dim tiles. Out-of-bounds inputs are clamped
// and reported through `clamped`.
class TileCoder {
public:
    explicit TileCoder(TileCoderConfig config);

    // Writes exactly n_tilings active indices into `out`.
    void active(std::span<const double> state, std::vector<int>& out, bool* clamped = nullptr) const;
    std::vector<int> active(std::span<const double> state, bool* clamped = nullptr) const;

    const TileCoderConfig& config() const { return config_; }
    int dimension() const { return config_.dimension(); }
    double tile_width(std::size_t d) const;

private:
    TileCoderConfig config_;
    std::vector<double> offsets_;  // n_tilings x dims
    int per_tiling_;
};

}  // namespace tdrc::env
