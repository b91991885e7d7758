#pragma once

// Hot loops with a serial reference and an OpenMP variant. Both variants
// return bit-identical results: per-item work is independent and every
// reduction is either integer-valued or a max with index tie-breaking.

#include <cstdint>
#include <functional>
#include <vector>

#include <omp.h>

#include "rfim/model.hpp"

namespace rfim {

enum class Exec { serial, parallel };

/// H over all 2^f assignments of `free_vertices` (bit i ↔ free_vertices[i]),
/// pinned vertices held at their pins.
std::vector<double> log_weights(const IsingModel& model, const std::vector<int>& free_vertices, Exec exec);

/// Counts of fn(i) over i in [0, count); fn must return a bin in [0, bins).
template <class Fn>
std::vector<std::uint64_t> histogram(std::uint64_t count, std::size_t bins, Fn fn, Exec exec) {
  std::vector<std::uint64_t> total(bins, 0);
  if (exec == Exec::serial) {
    for (std::uint64_t i = 0; i < count; ++i) ++total[fn(i)];
    return total;
  }
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(bins, 0);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) ++local[fn(static_cast<std::uint64_t>(i))];
#pragma omp critical
    for (std::size_t b = 0; b < bins; ++b) total[b] += local[b];
  }
  return total;
}

/// Several histograms filled by one pass: fn(i, counts) increments rows of
/// a `rows` × `bins` table.
template <class Fn>
std::vector<std::vector<std::uint64_t>> histogram_rows(std::uint64_t count, std::size_t rows, std::size_t bins,
                                                       Fn fn, Exec exec) {
  std::vector<std::vector<std::uint64_t>> total(rows, std::vector<std::uint64_t>(bins, 0));
  if (exec == Exec::serial) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i, total);
    return total;
  }
#pragma omp parallel
  {
    std::vector<std::vector<std::uint64_t>> local(rows, std::vector<std::uint64_t>(bins, 0));
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) fn(static_cast<std::uint64_t>(i), local);
#pragma omp critical
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t b = 0; b < bins; ++b) total[r][b] += local[r][b];
  }
  return total;
}

/// Runs fn(i) for i in [0, count) with results stored by index.
template <class T, class Fn>
std::vector<T> map_indexed(std::uint64_t count, Fn fn, Exec exec) {
  std::vector<T> out(count);
  if (exec == Exec::serial) {
    for (std::uint64_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i)
    out[static_cast<std::size_t>(i)] = fn(static_cast<std::uint64_t>(i));
  return out;
}

/// Total progeny of Galton–Watson forests with `roots` initial particles and
/// Bin(delta−1, p0) offspring; totals ≥ cap land in the last bin.
std::vector<std::uint64_t> gw_total_progeny_histogram(int delta, double p0, int roots, std::uint64_t forests,
                                                      int cap, std::uint64_t seed, Exec exec);

int default_threads();

}  // namespace rfim
