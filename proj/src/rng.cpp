#include "limelens/rng.hpp"

#include "limelens/normal.hpp"

namespace limelens {

double Rng::gaussian() { return normal_quantile(uniform_open()); }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(seed ^ (stream * 0xd6e8feb86659fd93ull)) + index);
}

}  // namespace limelens
