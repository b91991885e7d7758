#include "rfim/glauber.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rfim/error.hpp"

namespace rfim {

namespace {

std::uint64_t join(std::uint32_t hi, std::uint32_t lo) { return (static_cast<std::uint64_t>(hi) << 32) | lo; }

std::uint64_t free_index(const SpinConfiguration& c, const std::vector<int>& free) {
  std::uint64_t x = 0;
  for (std::size_t i = 0; i < free.size(); ++i)
    if (c.up(free[i])) x |= std::uint64_t{1} << i;
  return x;
}

void check_init(const IsingModel& model, const SpinConfiguration& init, const char* what) {
  if (init.size() != model.num_vertices()) throw InputError(std::string(what) + ": configuration size mismatch");
  if (init.convention() != model.convention()) throw InputError(std::string(what) + ": convention mismatch");
  if (!model.respects_pinning(init)) throw InputError(std::string(what) + ": initial state violates the pinning");
}

}  // namespace

ChainState make_chain(SpinConfiguration init, std::uint64_t seed, std::uint64_t replica) {
  ChainState s;
  s.config = std::move(init);
  s.seed = seed;
  s.stream = stream_id(StreamKind::glauber, replica);
  return s;
}

GlauberKernel::GlauberKernel(const IsingModel& model) : model_(model), free_(model.free_vertices()) {}

std::pair<int, double> GlauberKernel::draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t step) const {
  if (free_.empty()) throw InputError("glauber: model has no free vertices");
  const Block b = CounterRng(seed, stream).block(step);
  const int v = free_[scale_below(join(b[0], b[1]), free_.size())];
  return {v, to_unit_open(join(b[2], b[3]))};
}

int GlauberKernel::step(ChainState& s) const {
  const auto [v, u] = draw(s.seed, s.stream, s.step);
  s.config.set(v, u <= model_.prob_up(v, s.config));
  ++s.step;
  return v;
}

void GlauberKernel::run(ChainState& s, std::uint64_t steps) const {
  for (std::uint64_t k = 0; k < steps; ++k) step(s);
}

ChainState glauber_step(const IsingModel& model, ChainState state) {
  check_init(model, state.config, "glauber_step");
  GlauberKernel(model).step(state);
  return state;
}

namespace {

TrajectoryRow observe(const IsingModel& model, const ChainState& s) {
  TrajectoryRow row;
  row.step = s.step;
  double m = 0.0;
  for (int v = 0; v < s.config.size(); ++v) m += s.config.spin(v);
  row.magnetization = s.config.size() > 0 ? m / s.config.size() : 0.0;
  row.energy = hamiltonian(model, s.config);
  return row;
}

}  // namespace

ChainRun run_chain(const IsingModel& model, const SpinConfiguration& init, std::uint64_t steps, std::uint64_t seed,
                   std::uint64_t thin) {
  check_init(model, init, "run_chain");
  ChainRun out;
  out.final_state = make_chain(init, seed);
  if (steps == 0) {
    if (thin > 0) out.trajectory.push_back(observe(model, out.final_state));
    return out;
  }
  const GlauberKernel k(model);
  if (thin > 0) out.trajectory.push_back(observe(model, out.final_state));
  for (std::uint64_t t = 1; t <= steps; ++t) {
    k.step(out.final_state);
    if (thin > 0 && (t % thin == 0 || t == steps)) out.trajectory.push_back(observe(model, out.final_state));
  }
  return out;
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "step,magnetization,energy\n";
  for (const auto& r : rows) os << r.step << ',' << r.magnetization << ',' << r.energy << '\n';
  return os.str();
}

CouplingTrace monotone_coupled_run(const IsingModel& model, const SpinConfiguration& low,
                                   const SpinConfiguration& high, std::uint64_t steps, std::uint64_t seed,
                                   bool stop_at_coalescence) {
  model.require_ferromagnetic("monotone_coupled_run");
  check_init(model, low, "monotone_coupled_run");
  check_init(model, high, "monotone_coupled_run");
  if (!low.leq(high)) throw InputError("monotone_coupled_run: low is not pointwise below high");
  const GlauberKernel k(model);
  CouplingTrace tr;
  tr.low = make_chain(low, seed);
  tr.high = make_chain(high, seed);
  if (low == high) tr.coalescence_step = 0;
  for (std::uint64_t t = 0; t < steps; ++t) {
    if (stop_at_coalescence && tr.coalescence_step) break;
    const auto [v, u] = k.draw(seed, tr.low.stream, t);
    tr.low.config.set(v, u <= model.prob_up(v, tr.low.config));
    tr.high.config.set(v, u <= model.prob_up(v, tr.high.config));
    ++tr.low.step;
    ++tr.high.step;
    ++tr.steps;
    if (!tr.low.config.leq(tr.high.config)) ++tr.order_violations;
    if (!tr.coalescence_step && tr.low.config == tr.high.config) tr.coalescence_step = t + 1;
  }
  for (int v = 0; v < model.num_vertices(); ++v)
    if (tr.low.config.up(v) != tr.high.config.up(v)) tr.disagreement_set.push_back(v);
  return tr;
}

double site_uniform(std::uint64_t seed, int vertex) {
  return CounterRng(seed, stream_id(StreamKind::site_uniform, 0)).uniform(static_cast<std::uint64_t>(vertex));
}

GrandCoupling grand_coupled_update(const std::vector<const GibbsTable*>& tables, const std::vector<int>& order,
                                   std::uint64_t seed) {
  if (tables.empty()) throw InputError("grand_coupled_update: no models");
  const int n = tables.front()->model.num_vertices();
  for (const GibbsTable* t : tables) {
    if (t->model.num_vertices() != n) throw InputError("grand_coupled_update: models over different vertex sets");
  }
  {
    std::vector<int> sorted(order);
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < static_cast<int>(sorted.size()); ++i) {
      if (sorted[static_cast<std::size_t>(i)] != i || static_cast<int>(sorted.size()) != n) {
        throw InputError("grand_coupled_update: order is not a permutation of the vertices");
      }
    }
  }
  struct Cursor {
    std::vector<int> bit_of;  // vertex -> free bit or -1
    std::uint64_t mask = 0;
    std::uint64_t value = 0;
  };
  std::vector<Cursor> cur(tables.size());
  GrandCoupling out;
  for (std::size_t m = 0; m < tables.size(); ++m) {
    cur[m].bit_of.assign(static_cast<std::size_t>(n), -1);
    for (std::size_t i = 0; i < tables[m]->free.size(); ++i)
      cur[m].bit_of[static_cast<std::size_t>(tables[m]->free[i])] = static_cast<int>(i);
    out.states.push_back(tables[m]->model.constant_configuration(false));
  }
  for (int x : order) {
    const double u = site_uniform(seed, x);
    for (std::size_t m = 0; m < tables.size(); ++m) {
      const GibbsTable& t = *tables[m];
      const int bit = cur[m].bit_of[static_cast<std::size_t>(x)];
      if (bit < 0) continue;  // pinned: already at its pin
      const std::uint64_t b = std::uint64_t{1} << bit;
      double total = 0.0, up = 0.0;
      for (std::uint64_t idx = 0; idx < t.probs.size(); ++idx) {
        if ((idx & cur[m].mask) != cur[m].value) continue;
        total += t.probs[idx];
        if (idx & b) up += t.probs[idx];
      }
      if (!(total > 0.0)) throw NumericalError("grand_coupled_update: revealed prefix has zero probability");
      const bool is_up = u <= up / total;
      out.states[m].set(x, is_up);
      cur[m].mask |= b;
      if (is_up) cur[m].value |= b;
    }
  }
  for (int v = 0; v < n; ++v) {
    for (std::size_t m = 1; m < out.states.size(); ++m) {
      if (out.states[m].up(v) != out.states[0].up(v)) {
        out.disagreement_set.push_back(v);
        break;
      }
    }
  }
  return out;
}

GrandCoupling grand_coupled_update(const std::vector<IsingModel>& models, const std::vector<int>& order,
                                   std::uint64_t seed) {
  std::vector<GibbsTable> tables;
  tables.reserve(models.size());
  for (const auto& m : models) tables.push_back(gibbs_table(m, Exec::serial));
  std::vector<const GibbsTable*> ptrs;
  for (const auto& t : tables) ptrs.push_back(&t);
  return grand_coupled_update(ptrs, order, seed);
}

std::vector<std::uint64_t> replica_histogram(const IsingModel& model, const SpinConfiguration& init,
                                             std::uint64_t steps, std::uint64_t replicas, std::uint64_t seed,
                                             Exec exec) {
  check_init(model, init, "replica_histogram");
  const GlauberKernel k(model);
  if (k.free().size() > 20) throw CapacityError("replica_histogram: more than 20 free vertices");
  const std::size_t bins = std::size_t{1} << k.free().size();
  auto one = [&](std::uint64_t r) -> std::size_t {
    ChainState s = make_chain(init, seed, r);
    k.run(s, steps);
    return free_index(s.config, k.free());
  };
  return histogram(replicas, bins, one, exec);
}

std::vector<TvPoint> empirical_tv_curve(const IsingModel& model, const SpinConfiguration& init,
                                        const std::vector<std::uint64_t>& steps, std::uint64_t replicas,
                                        std::uint64_t seed, Exec exec) {
  check_init(model, init, "empirical_tv_curve");
  if (replicas == 0) throw InputError("empirical_tv_curve: replicas must be >= 1");
  const GibbsTable table = gibbs_table(model, Exec::serial);
  const GlauberKernel k(model);
  std::vector<std::uint64_t> grid(steps);
  std::sort(grid.begin(), grid.end());
  const std::size_t bins = table.size();
  auto one = [&](std::uint64_t r, std::vector<std::vector<std::uint64_t>>& counts) {
    ChainState s = make_chain(init, seed, r);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (!k.free().empty()) k.run(s, grid[g] - s.step);
      ++counts[g][free_index(s.config, table.free)];
    }
  };
  const auto counts = histogram_rows(replicas, grid.size(), bins, one, exec);
  double err = 0.0;
  for (double p : table.probs) err += std::sqrt(p * (1.0 - p) / static_cast<double>(replicas));
  std::vector<TvPoint> out;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> emp(bins);
    for (std::size_t x = 0; x < bins; ++x) emp[x] = static_cast<double>(counts[g][x]) / static_cast<double>(replicas);
    out.push_back({grid[g], tv_distance(emp, table.probs), 0.5 * err});
  }
  return out;
}

std::vector<std::vector<std::uint64_t>> transition_counts(const IsingModel& model, std::uint64_t samples,
                                                          std::uint64_t seed, Exec exec) {
  const TableSampler sampler(gibbs_table(model, Exec::serial));
  const GlauberKernel k(model);
  const std::size_t n = sampler.table().size();
  if (n > 4096) throw CapacityError("transition_counts: state space too large");
  const CounterRng starts(seed, stream_id(StreamKind::sampler, 0));
  auto one = [&](std::uint64_t i) -> std::size_t {
    const std::uint64_t x = sampler.sample_index(starts.uniform(i));
    ChainState s = make_chain(sampler.table().configuration(x), seed, i);
    k.step(s);
    return static_cast<std::size_t>(x * n + free_index(s.config, sampler.table().free));
  };
  const auto flat = histogram(samples, n * n, one, exec);
  std::vector<std::vector<std::uint64_t>> out(n, std::vector<std::uint64_t>(n));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) out[x][y] = flat[x * n + y];
  return out;
}

}  // namespace rfim
