#pragma once

#include <cstdint>
#include <vector>

namespace flurlab {

// Derivation path for reproducible parallel streams: identical
// (master_seed, path) yields an identical stream no matter which thread or in
// which order it is consumed.
struct SeedTree {
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> path;

    SeedTree child(std::uint64_t element) const {
        SeedTree t = *this;
        t.path.push_back(element);
        return t;
    }
};

// Counter-based stream (Philox4x32-10 under a key hashed from the seed tree).
// Value type, cheap to copy, safe to move across threads.
class RandomStream {
  public:
    explicit RandomStream(const SeedTree& tree);

    std::uint64_t next_u64();
    // uniform in (0,1), 53-bit
    double next_uniform();
    // standard normal via the inverse CDF
    double next_gaussian();

  private:
    void refill();
    std::uint32_t key_[2];
    std::uint32_t ctr_hi_[2];
    std::uint64_t block_ = 0;
    std::uint32_t out_[4];
    int pos_ = 4;
};

// n i.i.d. standard normal variates for (tree), deterministic and
// order-independent.
std::vector<double> gaussian_stream(const SeedTree& tree, std::size_t n);

}  // namespace flurlab
