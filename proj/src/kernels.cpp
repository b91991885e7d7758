#include "rfim/kernels.hpp"

#include "rfim/error.hpp"
#include "rfim/rng.hpp"

namespace rfim {

namespace {

struct CompiledWeights {
  double constant = 0.0;
  std::vector<double> field;                  // per free index
  std::vector<std::pair<int, int>> pairs;     // free-free edges (free indices)
  std::vector<double> pair_coupling;
  bool plus_minus = true;

  double at(std::uint64_t x) const {
    double h = constant;
    if (plus_minus) {
      for (std::size_t i = 0; i < field.size(); ++i) h += ((x >> i) & 1u) ? field[i] : -field[i];
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        const bool same = (((x >> pairs[k].first) ^ (x >> pairs[k].second)) & 1u) == 0;
        h += same ? pair_coupling[k] : -pair_coupling[k];
      }
    } else {
      for (std::size_t i = 0; i < field.size(); ++i)
        if ((x >> i) & 1u) h += field[i];
      for (std::size_t k = 0; k < pairs.size(); ++k)
        if ((x >> pairs[k].first) & (x >> pairs[k].second) & 1u) h += pair_coupling[k];
    }
    return h;
  }
};

CompiledWeights compile(const IsingModel& model, const std::vector<int>& free_vertices) {
  const Graph& g = model.graph();
  const Convention c = model.convention();
  std::vector<int> local(static_cast<std::size_t>(g.num_vertices()), -1);
  for (std::size_t i = 0; i < free_vertices.size(); ++i) local[static_cast<std::size_t>(free_vertices[i])] = static_cast<int>(i);

  CompiledWeights w;
  w.plus_minus = c == Convention::plus_minus;
  w.field.assign(free_vertices.size(), 0.0);
  for (int v = 0; v < g.num_vertices(); ++v) {
    const int i = local[static_cast<std::size_t>(v)];
    if (i >= 0) {
      w.field[static_cast<std::size_t>(i)] += model.field(v);
    } else {
      w.constant += model.field(v) * spin_value(model.pinned_up(v), c);
    }
  }
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    const int a = local[static_cast<std::size_t>(ed.u)];
    const int b = local[static_cast<std::size_t>(ed.v)];
    const double j = model.coupling(e);
    if (a >= 0 && b >= 0) {
      w.pairs.emplace_back(a, b);
      w.pair_coupling.push_back(j);
    } else if (a >= 0) {
      w.field[static_cast<std::size_t>(a)] += j * spin_value(model.pinned_up(ed.v), c);
    } else if (b >= 0) {
      w.field[static_cast<std::size_t>(b)] += j * spin_value(model.pinned_up(ed.u), c);
    } else {
      w.constant += j * spin_value(model.pinned_up(ed.u), c) * spin_value(model.pinned_up(ed.v), c);
    }
  }
  return w;
}

}  // namespace

std::vector<double> log_weights(const IsingModel& model, const std::vector<int>& free_vertices, Exec exec) {
  if (free_vertices.size() > 40) throw CapacityError("log_weights: too many free vertices");
  const CompiledWeights w = compile(model, free_vertices);
  const std::uint64_t size = std::uint64_t{1} << free_vertices.size();
  std::vector<double> out(size);
  if (exec == Exec::serial) {
    for (std::uint64_t x = 0; x < size; ++x) out[x] = w.at(x);
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t x = 0; x < static_cast<std::int64_t>(size); ++x)
      out[static_cast<std::size_t>(x)] = w.at(static_cast<std::uint64_t>(x));
  }
  return out;
}

std::vector<std::uint64_t> gw_total_progeny_histogram(int delta, double p0, int roots, std::uint64_t forests,
                                                      int cap, std::uint64_t seed, Exec exec) {
  if (delta < 2 || roots < 1 || cap < 1) throw InputError("gw simulation: bad parameters");
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw InputError("gw simulation: p0 must lie in [0,1]");
  const int children = delta - 1;
  auto one = [&](std::uint64_t f) -> std::size_t {
    RngStream rng(seed, stream_id(StreamKind::galton_watson, f));
    std::int64_t alive = roots;
    std::int64_t total = roots;
    while (alive > 0 && total < cap) {
      --alive;
      for (int c = 0; c < children; ++c) {
        if (rng.bernoulli(p0)) {
          ++alive;
          ++total;
        }
      }
    }
    return static_cast<std::size_t>(std::min<std::int64_t>(total, cap));
  };
  return histogram(forests, static_cast<std::size_t>(cap) + 1, one, exec);
}

int default_threads() { return omp_get_max_threads(); }

}  // namespace rfim
