#include "flurlab/rng.hpp"

#include <stdexcept>

#include "flurlab/special.hpp"

namespace flurlab {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
    const std::uint64_t p0 = 0xD2511F53ull * ctr[0];
    const std::uint64_t p1 = 0xCD9E8D57ull * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t c1 = ctr[1], c3 = ctr[3];
    ctr[0] = hi1 ^ c1 ^ key[0];
    ctr[1] = lo1;
    ctr[2] = hi0 ^ c3 ^ key[1];
    ctr[3] = lo0;
}

}  // namespace

RandomStream::RandomStream(const SeedTree& tree) {
    std::uint64_t s = tree.master_seed ^ 0xC2B2AE3D27D4EB4Full;
    std::uint64_t k = splitmix64(s);
    for (std::uint64_t e : tree.path) {
        s ^= e * 0x9E3779B97F4A7C15ull + 0x165667B19E3779F9ull;
        k = splitmix64(s) ^ (k << 1);
    }
    std::uint64_t s2 = k;
    const std::uint64_t kk = splitmix64(s2);
    const std::uint64_t cc = splitmix64(s2);
    key_[0] = static_cast<std::uint32_t>(kk);
    key_[1] = static_cast<std::uint32_t>(kk >> 32);
    ctr_hi_[0] = static_cast<std::uint32_t>(cc);
    ctr_hi_[1] = static_cast<std::uint32_t>(cc >> 32);
}

void RandomStream::refill() {
    std::uint32_t ctr[4] = {static_cast<std::uint32_t>(block_),
                            static_cast<std::uint32_t>(block_ >> 32), ctr_hi_[0], ctr_hi_[1]};
    std::uint32_t key[2] = {key_[0], key_[1]};
    philox_round(ctr, key);
    for (int r = 1; r < 10; ++r) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
        philox_round(ctr, key);
    }
    out_[0] = ctr[0];
    out_[1] = ctr[1];
    out_[2] = ctr[2];
    out_[3] = ctr[3];
    ++block_;
    pos_ = 0;
}

std::uint64_t RandomStream::next_u64() {
    if (pos_ > 2) refill();
    const std::uint64_t lo = out_[pos_], hi = out_[pos_ + 1];
    pos_ += 2;
    return (hi << 32) | lo;
}

double RandomStream::next_uniform() {
    // 53-bit mantissa, strictly inside (0,1)
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::next_gaussian() { return normal_quantile(next_uniform()); }

std::vector<double> gaussian_stream(const SeedTree& tree, std::size_t n) {
    if (n < 1) throw DomainError("gaussian_stream: n >= 1 required");
    RandomStream rs(tree);
    std::vector<double> out(n);
    for (auto& v : out) v = rs.next_gaussian();
    return out;
}

}  // namespace flurlab
