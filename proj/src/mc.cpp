#include "jcone/mc.hpp"

namespace jcone {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t chunk) {
  std::uint64_t a = splitmix64(seed);
  std::uint64_t b = splitmix64(a ^ splitmix64(stream + 0x5851f42d4c957f2dULL));
  std::uint64_t c = splitmix64(b ^ splitmix64(chunk));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(c),
                    static_cast<std::uint32_t>(c >> 32), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

int default_jobs() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

}  // namespace jcone
