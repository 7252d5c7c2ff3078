#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>

namespace repokva {

// Adaptive Simpson on [a, b], started from `min_panels` equal panels and
// refined per panel until the Richardson estimate drops below the panel's
// share of `abs_tol` or `max_depth` halvings have been made.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        int min_panels = 200, double abs_tol = 1e-12, int max_depth = 10);

double trapezoid(std::span<const double> x, std::span<const double> y);

// Sample paths are generated in fixed-size chunks; each chunk draws from its
// own engine seeded by (seed, chunk index), so results never depend on how
// many threads process the chunks.
inline constexpr std::size_t kChunkSize = 1u << 15;

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t chunk, std::uint64_t stream_tag = 0);

// Runs fn(chunk_index) for every chunk, spread across hardware threads.
void for_each_chunk(std::size_t n_chunks, const std::function<void(std::size_t)>& fn);

inline std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

} // namespace repokva
