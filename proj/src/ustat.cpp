#include "pustat/ustat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pustat {
namespace {

// Visits ordered tuples (i0, i1, ..., i_{k-1}) of distinct indices in
// lexicographic order. For each first index the later entries range over
// `candidates(i0)` (ascending) filtered by `compatible(j, chosen)`.
template <class Candidates, class Compatible, class Eval>
void enumerate_tuples(std::size_t n, int k, Candidates&& candidates,
                      Compatible&& compatible, Eval&& eval,
                      EvaluationReport& report) {
  std::vector<std::size_t> chosen(static_cast<std::size_t>(k));
  double local = 0.0;
  double local_max = 0.0;
  auto recurse = [&](auto&& self, const std::vector<std::size_t>& cand,
                     int depth) -> void {
    if (depth == k) {
      const double v = eval(chosen);
      report.value += v;
      local += v;
      ++report.tuple_count;
      return;
    }
    for (std::size_t j : cand) {
      bool used = false;
      for (int p = 0; p < depth; ++p) {
        if (chosen[p] == j) {
          used = true;
          break;
        }
      }
      if (used || !compatible(j, chosen, depth)) continue;
      chosen[depth] = j;
      self(self, cand, depth + 1);
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    chosen[0] = i;
    local = 0.0;
    if (k == 1) {
      const double v = eval(chosen);
      report.value += v;
      local = v;
      ++report.tuple_count;
    } else {
      recurse(recurse, candidates(i), 1);
    }
    local_max = i == 0 ? local : std::max(local_max, local);
  }
  report.local_max = local_max;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Uniform grid over the bounding box of the points. Cells have side rho
// unless that would create far more cells than points, in which case the
// side grows; any side >= rho keeps the 3^d neighbourhood exhaustive.
class CellGrid {
 public:
  CellGrid(const PointConfiguration& config, double rho) : config_(config) {
    const std::size_t n = config.size();
    dim_ = config.dim();
    lo_.assign(dim_, 0.0);
    std::vector<double> hi(dim_, 0.0);
    for (int a = 0; a < dim_; ++a) {
      lo_[a] = hi[a] = config.coords(0)[a];
    }
    for (std::size_t i = 1; i < n; ++i) {
      const auto x = config.coords(i);
      for (int a = 0; a < dim_; ++a) {
        lo_[a] = std::min(lo_[a], x[a]);
        hi[a] = std::max(hi[a], x[a]);
      }
    }
    double span = 0.0;
    for (int a = 0; a < dim_; ++a) span = std::max(span, hi[a] - lo_[a]);
    const double max_cells = 4.0 * static_cast<double>(n) + 64.0;
    side_ = rho;
    auto cells_for = [&](double side) {
      double total = 1.0;
      for (int a = 0; a < dim_; ++a) {
        total *= std::floor((hi[a] - lo_[a]) / side) + 1.0;
      }
      return total;
    };
    if (cells_for(side_) > max_cells) {
      side_ = std::max(rho, span / std::floor(std::pow(max_cells, 1.0 / dim_)));
      while (cells_for(side_) > max_cells) side_ *= 1.25;
    }
    counts_.assign(dim_, 0);
    std::size_t total = 1;
    for (int a = 0; a < dim_; ++a) {
      counts_[a] = static_cast<std::int64_t>(std::floor((hi[a] - lo_[a]) / side_)) + 1;
      total *= static_cast<std::size_t>(counts_[a]);
    }
    // Counting sort of point indices by cell; indices stay ascending
    // within each cell.
    start_.assign(total + 1, 0);
    cell_of_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      cell_of_[i] = cell_index(config.coords(i));
      ++start_[cell_of_[i] + 1];
    }
    for (std::size_t c = 0; c < total; ++c) start_[c + 1] += start_[c];
    members_.resize(n);
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) members_[fill[cell_of_[i]]++] = i;
  }

  // Indices j != i with |x_j - x_i|^2 <= threshold2, ascending.
  std::vector<std::size_t> neighbours(std::size_t i, double threshold2) const {
    std::vector<std::size_t> out;
    std::vector<std::int64_t> base(dim_);
    std::size_t c = cell_of_[i];
    for (int a = dim_ - 1; a >= 0; --a) {
      base[a] = static_cast<std::int64_t>(c % counts_[a]);
      c /= counts_[a];
    }
    std::vector<int> offset(dim_, -1);
    const auto xi = config_.coords(i);
    while (true) {
      bool inside = true;
      std::size_t cell = 0;
      for (int a = 0; a < dim_; ++a) {
        const std::int64_t v = base[a] + offset[a];
        if (v < 0 || v >= counts_[a]) {
          inside = false;
          break;
        }
        cell = cell * static_cast<std::size_t>(counts_[a]) + static_cast<std::size_t>(v);
      }
      if (inside) {
        for (std::size_t p = start_[cell]; p < start_[cell + 1]; ++p) {
          const std::size_t j = members_[p];
          if (j != i && squared_distance(xi, config_.coords(j)) <= threshold2) {
            out.push_back(j);
          }
        }
      }
      int a = 0;
      while (a < dim_ && offset[a] == 1) offset[a++] = -1;
      if (a == dim_) break;
      ++offset[a];
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::size_t cell_index(std::span<const double> x) const {
    std::size_t cell = 0;
    for (int a = 0; a < dim_; ++a) {
      auto v = static_cast<std::int64_t>(std::floor((x[a] - lo_[a]) / side_));
      v = std::clamp<std::int64_t>(v, 0, counts_[a] - 1);
      cell = cell * static_cast<std::size_t>(counts_[a]) + static_cast<std::size_t>(v);
    }
    return cell;
  }

  const PointConfiguration& config_;
  int dim_ = 0;
  double side_ = 0.0;
  std::vector<double> lo_;
  std::vector<std::int64_t> counts_;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> cell_of_;
  std::vector<std::size_t> members_;
};

}  // namespace

EvalMode preferred_mode(const Kernel& kernel) {
  return kernel.domain() == Domain::points && kernel.locality_radius()
             ? EvalMode::grid
             : EvalMode::naive;
}

EvaluationReport evaluate(const Kernel& kernel, const PointConfiguration& config,
                          EvalMode mode) {
  if (kernel.domain() != Domain::points) {
    throw std::invalid_argument(kernel.name() + " is a flat kernel; got points");
  }
  if (mode == EvalMode::grid && !kernel.locality_radius()) {
    throw std::invalid_argument(kernel.name() +
                                ": grid mode needs a locality radius");
  }
  EvaluationReport report;
  report.mode = mode;
  const std::size_t n = config.size();
  const int k = kernel.order();
  if (n == 0) return report;
  if (n < static_cast<std::size_t>(k)) {
    report.local_max = 0.0;
    return report;
  }
  std::vector<PointView> views(static_cast<std::size_t>(k));
  auto eval = [&](const std::vector<std::size_t>& idx) {
    for (int p = 0; p < k; ++p) views[p] = config[idx[p]];
    return kernel.eval_points(views);
  };

  if (mode == EvalMode::naive) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    enumerate_tuples(
        n, k, [&](std::size_t) -> const std::vector<std::size_t>& { return all; },
        [](std::size_t, const std::vector<std::size_t>&, int) { return true; },
        eval, report);
    return report;
  }

  const double rho = *kernel.locality_radius();
  const double threshold = rho * (1.0 + 1e-9);
  const double threshold2 = threshold * threshold;
  const CellGrid grid(config, rho);
  enumerate_tuples(
      n, k, [&](std::size_t i) { return grid.neighbours(i, threshold2); },
      [&](std::size_t j, const std::vector<std::size_t>& chosen, int depth) {
        // chosen[0] is already within range of every candidate.
        for (int p = 1; p < depth; ++p) {
          if (squared_distance(config.coords(j), config.coords(chosen[p])) >
              threshold2) {
            return false;
          }
        }
        return true;
      },
      eval, report);
  return report;
}

EvaluationReport evaluate(const Kernel& kernel, const FlatConfiguration& config,
                          EvalMode mode) {
  if (kernel.domain() != Domain::flats) {
    throw std::invalid_argument(kernel.name() + " is a point kernel; got flats");
  }
  if (mode == EvalMode::grid) {
    throw std::invalid_argument("flat configurations only support naive mode");
  }
  EvaluationReport report;
  const std::size_t n = config.size();
  const int k = kernel.order();
  if (n == 0) return report;
  if (n < static_cast<std::size_t>(k)) {
    report.local_max = 0.0;
    return report;
  }
  std::vector<const Flat*> args(static_cast<std::size_t>(k));
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  enumerate_tuples(
      n, k, [&](std::size_t) -> const std::vector<std::size_t>& { return all; },
      [](std::size_t, const std::vector<std::size_t>&, int) { return true; },
      [&](const std::vector<std::size_t>& idx) {
        for (int p = 0; p < k; ++p) args[p] = &config[idx[p]];
        return kernel.eval_flats(args);
      },
      report);
  return report;
}

Estimate mecke_expectation(const Kernel& kernel, const IntensitySpec& intensity,
                           const Window& window, std::size_t mc_samples,
                           std::uint64_t seed) {
  if (mc_samples == 0) throw std::invalid_argument("mc_samples must be positive");
  const double mass = intensity.total_mass(window);
  if (!(mass > 0.0)) {
    throw std::invalid_argument("mecke_expectation: zero total mass");
  }
  const int k = kernel.order();
  const double scale = std::pow(mass, k);
  Stream rng(seed, 0, 0x4d45434b);
  RunningEstimate acc(mc_samples);

  if (kernel.domain() == Domain::flats) {
    std::vector<Flat> lines(static_cast<std::size_t>(k));
    std::vector<const Flat*> args(static_cast<std::size_t>(k));
    for (int p = 0; p < k; ++p) args[p] = &lines[p];
    for (std::size_t s = 0; s < mc_samples; ++s) {
      for (int p = 0; p < k; ++p) {
        lines[p] = sample_line(intensity.reference, window, rng);
      }
      acc.add(kernel.eval_flats(args));
    }
    return acc.finish(scale);
  }

  const PointMeasure measure(intensity, window);
  const auto d = static_cast<std::size_t>(window.dim());
  std::vector<double> coords(static_cast<std::size_t>(k) * d);
  std::vector<PointView> args(static_cast<std::size_t>(k));
  for (std::size_t s = 0; s < mc_samples; ++s) {
    for (int p = 0; p < k; ++p) {
      std::span<double> x(coords.data() + p * d, d);
      args[p].mark = measure.sample(rng, x);
      args[p].x = x;
    }
    acc.add(kernel.eval_points(args));
  }
  return acc.finish(scale);
}

double local_sum_max(const Kernel& kernel, const PointConfiguration& config) {
  return evaluate(kernel, config, preferred_mode(kernel)).local_max.value_or(0.0);
}

double local_sum_max(const Kernel& kernel, const FlatConfiguration& config) {
  return evaluate(kernel, config).local_max.value_or(0.0);
}

}  // namespace pustat
