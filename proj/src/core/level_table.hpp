#pragma once

#include <string>
#include <vector>

#include "core/errors.hpp"

namespace cranhet {

// Per-transmitter strategies at every cognitive-hierarchy level 0..top.
// The CU's level-h strategy occupies all RRH rows; BS rows hold their own.
// Level 0 is the non-strategic equal-power anchor.
struct LevelStrategyTable {
    int n_tx = 0;
    int n_levels = 0; // top level + 1
    int n_sub = 0;

    std::vector<double> p; // [tx][level][k]

    LevelStrategyTable() = default;
    LevelStrategyTable(int n_tx_, int n_levels_, int n_sub_)
        : n_tx(n_tx_), n_levels(n_levels_), n_sub(n_sub_),
          p(static_cast<size_t>(n_tx_) * n_levels_ * n_sub_, 0.0) {}

    double at(int tx, int level, int k) const { return p[index(tx, level, k)]; }
    double& at(int tx, int level, int k) { return p[index(tx, level, k)]; }

    bool operator==(const LevelStrategyTable& other) const {
        return n_tx == other.n_tx && n_levels == other.n_levels && n_sub == other.n_sub &&
               p == other.p;
    }

private:
    size_t index(int tx, int level, int k) const {
        if (tx < 0 || tx >= n_tx || level < 0 || level >= n_levels || k < 0 || k >= n_sub)
            throw InvalidArgError("level table: missing strategy (tx=" + std::to_string(tx) +
                                  ", level=" + std::to_string(level) + ")");
        return (static_cast<size_t>(tx) * n_levels + level) * n_sub + k;
    }
};

} // namespace cranhet
