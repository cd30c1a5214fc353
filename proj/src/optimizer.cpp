#include "cooc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cooc/errors.hpp"
#include "cooc/likelihood.hpp"
#include "cooc/rng.hpp"

namespace cooc {

namespace {

// A swap must beat this margin to be taken. Large enough that accumulated
// rounding in the 4-term delta cannot masquerade as an improvement, small
// enough to stay within the 1e-9 oracle tolerance used in tests.
constexpr double kSwapThreshold = -1e-9;

}  // namespace

std::string to_string(InitMode mode) {
  switch (mode) {
    case InitMode::random: return "random";
    case InitMode::square_blocks: return "square-blocks";
    case InitMode::frequency: return "frequency";
  }
  throw std::invalid_argument("unknown init mode");
}

std::string to_string(ZMode mode) {
  return mode == ZMode::quantized ? "quantized" : "empirical";
}

InitMode init_mode_from_string(const std::string& name) {
  if (name == "random") return InitMode::random;
  if (name == "square-blocks") return InitMode::square_blocks;
  if (name == "frequency") return InitMode::frequency;
  throw std::invalid_argument("unknown init mode: " + name);
}

ZMode z_mode_from_string(const std::string& name) {
  if (name == "quantized") return ZMode::quantized;
  if (name == "empirical") return ZMode::empirical;
  throw std::invalid_argument("unknown z mode: " + name);
}

void FitConfig::validate() const {
  if (group_size < 2) throw std::invalid_argument("fit: group size must be >= 2");
  if (bins < 2) throw std::invalid_argument("fit: bins must be >= 2");
  if (max_iterations < 1)
    throw std::invalid_argument("fit: max iterations must be >= 1");
  if (!(tolerance > 0.0)) throw std::invalid_argument("fit: tolerance must be > 0");
  if (swap_passes < 1)
    throw std::invalid_argument("fit: swap passes must be >= 1");
}

void FitTrace::validate() const {
  double prev = initial_bits;
  for (const FitIteration& it : iterations) {
    if (it.step1_delta > 0.0 || it.step2_delta > 0.0 || it.step3_delta > 0.0)
      throw std::invalid_argument("fit trace: positive step delta");
    if (it.bits > prev) throw std::invalid_argument("fit trace: objective increased");
    prev = it.bits;
  }
}

Grouping init_grouping(const IndexDomain& domain, int group_size, InitMode mode,
                       std::uint64_t seed) {
  std::size_t n = domain.size();
  if (group_size < 1 || std::size_t(group_size) > n)
    throw std::invalid_argument("init_grouping: group size outside [1, domain]");
  Grouping g;
  g.domain = domain;
  g.group_size = group_size;
  g.group_count = static_cast<int>((n + group_size - 1) / group_size);
  g.assignment.resize(n);
  if (mode == InitMode::frequency)
    throw std::invalid_argument(
        "init_grouping: frequency start needs training maps; use fit() or "
        "frequency_grouping()");
  if (mode == InitMode::random) {
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    SplitMix64 rng(seed);
    rng.shuffle(order);
    for (std::size_t i = 0; i < n; ++i)
      g.assignment[order[i]] = static_cast<std::uint32_t>(i / group_size);
  } else {
    int r = static_cast<int>(std::lround(std::sqrt(double(group_size))));
    if (r * r != group_size)
      throw std::invalid_argument(
          "init_grouping: square-blocks needs a perfect-square group size");
    if (domain.width % r != 0 || domain.height % r != 0)
      throw std::invalid_argument(
          "init_grouping: block side " + std::to_string(r) +
          " does not divide " + std::to_string(domain.width) + "x" +
          std::to_string(domain.height));
    int blocks_per_row = domain.width / r;
    for (int row = 0; row < domain.height; ++row)
      for (int col = 0; col < domain.width; ++col)
        g.assignment[std::size_t(row) * domain.width + col] =
            static_cast<std::uint32_t>((row / r) * blocks_per_row + (col / r));
  }
  g.validate();
  return g;
}

Grouping frequency_grouping(const std::vector<SignificanceMap>& maps,
                            int group_size) {
  if (maps.empty())
    throw std::invalid_argument("frequency_grouping: no training maps");
  const IndexDomain& domain = maps.front().domain;
  std::size_t n = domain.size();
  if (group_size < 1 || std::size_t(group_size) > n)
    throw std::invalid_argument(
        "frequency_grouping: group size outside [1, domain]");
  std::vector<std::size_t> freq(n, 0);
  for (const SignificanceMap& y : maps)
    for (std::size_t p = 0; p < n; ++p)
      if (y.bits.test(p)) ++freq[p];
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return freq[a] > freq[b];
                   });
  Grouping g;
  g.domain = domain;
  g.group_size = group_size;
  g.group_count = static_cast<int>((n + group_size - 1) / group_size);
  g.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    g.assignment[order[i]] = static_cast<std::uint32_t>(i / group_size);
  g.validate();
  return g;
}

std::vector<GroupValues> step1_update_z(const std::vector<GroupCounts>& counts,
                                        const std::vector<GroupHistogram>& hists,
                                        const Grouping& grouping, ZMode mode) {
  std::size_t L = counts.size();
  int K = grouping.group_count;
  std::vector<GroupValues> z(L, GroupValues(K, 0.0));
  if (mode == ZMode::empirical) {
    for (std::size_t l = 0; l < L; ++l)
      for (int k = 0; k < K; ++k) z[l][k] = double(counts[l][k]);
    return z;
  }
  for (std::size_t l = 0; l < L; ++l) {
    for (int k = 0; k < K; ++k) {
      const GroupHistogram& h = hists[k];
      int sk = grouping.size_of(k);
      double m = double(counts[l][k]);
      double best_val = 0.0, best_z = 0.0;
      for (int b = 0; b < h.bins(); ++b) {
        double c = h.center(b);
        double val = -std::log2(h.probs[b] / h.width(b)) +
                     bernoulli_data_bits(m, sk, clamped_significance_prob(c, sk));
        bool take = b == 0 || val < best_val;
        if (!take && val == best_val) {
          // Tie: prefer the candidate nearest the observed count, then the
          // smaller one (centers ascend, so never replace on equal distance).
          take = std::abs(c - m) < std::abs(best_z - m);
        }
        if (take) {
          best_val = val;
          best_z = c;
        }
      }
      z[l][k] = best_z;
    }
  }
  return z;
}

std::vector<GroupHistogram> step2_update_hists(const std::vector<GroupValues>& z,
                                               const Grouping& grouping,
                                               int bins) {
  if (z.empty()) throw std::invalid_argument("step2: no training values");
  int K = grouping.group_count;
  std::vector<GroupHistogram> hists(K);
  std::vector<double> column(z.size());
  for (int k = 0; k < K; ++k) {
    for (std::size_t l = 0; l < z.size(); ++l) column[l] = z[l][k];
    hists[k] = GroupHistogram::from_counts(column, grouping.size_of(k), bins);
  }
  return hists;
}

Grouping step3_update_groups(const std::vector<SignificanceMap>& maps,
                             const std::vector<GroupValues>& z,
                             const Grouping& grouping, int swap_passes) {
  std::size_t L = maps.size();
  std::size_t n = grouping.domain.size();
  int K = grouping.group_count;
  if (K < 2 || L == 0) return grouping;

  // Index costs are fixed during the whole step: c[p*K + k] says what index
  // p would cost as a member of group k, given the current z. Built as
  // base_k (index in no map) plus a per-map correction for maps holding p.
  std::vector<double> base(K, 0.0);
  std::vector<double> diff(std::size_t(K) * L);
  for (int k = 0; k < K; ++k) {
    int sk = grouping.size_of(k);
    for (std::size_t l = 0; l < L; ++l) {
      double pi = clamped_significance_prob(z[l][k], sk);
      base[k] -= std::log2(1.0 - pi);
      diff[std::size_t(k) * L + l] = std::log2(1.0 - pi) - std::log2(pi);
    }
  }
  std::vector<double> cost(n * K, 0.0);
  for (std::size_t l = 0; l < L; ++l)
    for (std::uint32_t p : maps[l].bits.members())
      for (int k = 0; k < K; ++k)
        cost[std::size_t(p) * K + k] += diff[std::size_t(k) * L + l];
  for (std::size_t p = 0; p < n; ++p)
    for (int k = 0; k < K; ++k) cost[p * K + k] += base[k];

  Grouping out = grouping;
  std::vector<std::uint32_t>& a = out.assignment;
  for (int pass = 0; pass < swap_passes; ++pass) {
    bool changed = false;
    for (std::size_t p = 0; p < n; ++p) {
      const double* cp = &cost[p * K];
      std::uint32_t kp = a[p];
      double best_delta = kSwapThreshold;
      std::size_t best_q = n;
      for (std::size_t q = 0; q < n; ++q) {
        std::uint32_t kq = a[q];
        if (kq == kp) continue;
        double delta = (cp[kq] + cost[q * K + kp]) - (cp[kp] + cost[q * K + kq]);
        if (delta < best_delta) {
          best_delta = delta;
          best_q = q;
        }
      }
      if (best_q < n) {
        std::swap(a[p], a[best_q]);
        changed = true;
      }
    }
    if (!changed) break;
  }
  return out;
}

namespace {

struct FitState {
  const std::vector<SignificanceMap>* maps;
  const FitConfig* config;
  Grouping grouping;
  std::vector<GroupHistogram> hists;
  std::vector<GroupCounts> counts;   // m_l(k) under the current grouping
  std::vector<GroupValues> z;
  std::vector<double> group_bits;    // objective restricted to one group

  // Objective contribution of group k, summed over maps in map order. In
  // quantized mode this is the joint code of (z, y | z); in empirical mode
  // z plays no role and the sum is the exact significance-map code length.
  double objective_of_group(int k) const {
    int sk = grouping.size_of(k);
    const GroupHistogram& h = hists[k];
    double sum = 0.0;
    if (config->z_mode == ZMode::quantized) {
      for (std::size_t l = 0; l < counts.size(); ++l) {
        double zv = z[l][k];
        sum += -std::log2(h.pmf(zv)) +
               bernoulli_data_bits(double(counts[l][k]), sk,
                                   clamped_significance_prob(zv, sk));
      }
    } else {
      for (std::size_t l = 0; l < counts.size(); ++l) {
        int m = counts[l][k];
        sum += log2_binomial(sk, m) - std::log2(h.pmf(double(m)));
      }
    }
    return sum;
  }

  void refresh_all_group_bits() {
    group_bits.resize(grouping.group_count);
    for (int k = 0; k < grouping.group_count; ++k)
      group_bits[k] = objective_of_group(k);
  }

  double total_objective() const {
    double t = 0.0;
    for (double b : group_bits) t += b;
    return t;
  }

  // Step 1 with per-group recompute. New z minimizes each (l,k) term over a
  // candidate set containing the previous value, so every group total can
  // only go down.
  double run_step1() {
    double before = total_objective();
    std::vector<GroupValues> z_new =
        step1_update_z(counts, hists, grouping, config->z_mode);
    if (z_new != z) {
      z = std::move(z_new);
      refresh_all_group_bits();
    }
    return total_objective() - before;
  }

  // Step 2, guarded per group: the smoothed histogram replaces the old one
  // only where it does not worsen that group's objective (smoothing can
  // lose to the incumbent when counts are concentrated).
  double run_step2() {
    double before = total_objective();
    std::vector<GroupHistogram> proposed =
        step2_update_hists(z, grouping, config->bins);
    for (int k = 0; k < grouping.group_count; ++k) {
      std::swap(hists[k], proposed[k]);
      double bits = objective_of_group(k);
      if (bits <= group_bits[k])
        group_bits[k] = bits;
      else
        std::swap(hists[k], proposed[k]);
    }
    return total_objective() - before;
  }

  // Step 3, guarded as a whole: swaps decrease the fixed-cost surrogate, so
  // a regression of the true objective can only be rounding noise; revert in
  // that case to keep the trace exact.
  double run_step3() {
    double before = total_objective();
    Grouping proposed =
        step3_update_groups(*maps, z, grouping, config->swap_passes);
    if (proposed.assignment == grouping.assignment) return 0.0;
    std::vector<GroupCounts> counts_new(maps->size());
    for (std::size_t l = 0; l < maps->size(); ++l)
      counts_new[l] = group_counts((*maps)[l], proposed);
    std::vector<double> bits_old = group_bits;
    std::swap(grouping, proposed);
    std::swap(counts, counts_new);
    refresh_all_group_bits();
    double after = total_objective();
    if (after <= before) return after - before;
    std::swap(grouping, proposed);
    std::swap(counts, counts_new);
    group_bits = std::move(bits_old);
    return 0.0;
  }
};

}  // namespace

std::pair<CoocModel, FitTrace> fit(const std::vector<SignificanceMap>& maps,
                                   const FitConfig& config) {
  config.validate();
  if (maps.empty()) throw std::invalid_argument("fit: no training maps");
  const IndexDomain& domain = maps.front().domain;
  for (const SignificanceMap& y : maps)
    if (!(y.domain == domain))
      throw std::invalid_argument("fit: maps must share one domain");

  FitState st;
  st.maps = &maps;
  st.config = &config;
  st.grouping = config.init == InitMode::frequency
                    ? frequency_grouping(maps, config.group_size)
                    : init_grouping(domain, config.group_size, config.init,
                                    config.seed);
  st.hists.resize(st.grouping.group_count);
  for (int k = 0; k < st.grouping.group_count; ++k)
    st.hists[k] = GroupHistogram::uniform(st.grouping.size_of(k), config.bins);
  st.counts.resize(maps.size());
  for (std::size_t l = 0; l < maps.size(); ++l)
    st.counts[l] = group_counts(maps[l], st.grouping);
  st.z = step1_update_z(st.counts, st.hists, st.grouping, config.z_mode);
  st.refresh_all_group_bits();

  FitTrace trace;
  trace.initial_bits = st.total_objective();
  double prev_bits = trace.initial_bits;
  double tol_bits = config.tolerance * double(maps.size()) * double(domain.size());

  int iterations_run = 0;
  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    FitIteration row;
    row.step1_delta = st.run_step1();
    row.step2_delta = st.run_step2();
    row.step3_delta = st.run_step3();
    row.bits = st.total_objective();
    trace.iterations.push_back(row);
    iterations_run = iter;
    double improvement = prev_bits - row.bits;
    prev_bits = row.bits;
    if (improvement < tol_bits) break;
  }

  // The loop ends with histograms one step behind the final grouping; bring
  // z and the histograms up to date (never worsens, usually a no-op).
  {
    FitIteration row;
    row.step1_delta = st.run_step1();
    row.step2_delta = st.run_step2();
    row.step3_delta = 0.0;
    row.bits = st.total_objective();
    if (row.step1_delta != 0.0 || row.step2_delta != 0.0)
      trace.iterations.push_back(row);
  }

  CoocModel model;
  model.grouping = std::move(st.grouping);
  model.histograms = std::move(st.hists);
  model.meta = FitMeta{config.group_size, config.bins, iterations_run,
                       trace.final_bits(), config.seed};
  model.validate();
  trace.validate();
  return {std::move(model), std::move(trace)};
}

CoocModel fit_histograms_only(const std::vector<SignificanceMap>& maps,
                              const Grouping& grouping, int bins) {
  if (maps.empty()) throw std::invalid_argument("fit: no training maps");
  grouping.validate();
  for (const SignificanceMap& y : maps)
    if (!(y.domain == grouping.domain))
      throw std::invalid_argument("fit: maps must share the grouping's domain");
  int K = grouping.group_count;
  std::vector<GroupValues> z(maps.size(), GroupValues(K, 0.0));
  for (std::size_t l = 0; l < maps.size(); ++l) {
    GroupCounts m = group_counts(maps[l], grouping);
    for (int k = 0; k < K; ++k) z[l][k] = double(m[k]);
  }
  CoocModel model;
  model.grouping = grouping;
  model.histograms = step2_update_hists(z, grouping, bins);
  model.meta = FitMeta{grouping.group_size, bins, 0, 0.0, 0};
  model.meta.final_bits = total_bits(maps, model).bits;
  model.validate();
  return model;
}

double adjusted_rand_index(const std::vector<std::uint32_t>& a,
                           const std::vector<std::uint32_t>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("adjusted_rand_index: length mismatch");
  if (a.empty()) throw std::invalid_argument("adjusted_rand_index: empty");
  auto relabel = [](const std::vector<std::uint32_t>& v, std::size_t& classes) {
    std::vector<std::uint32_t> sorted(v);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    classes = sorted.size();
    std::vector<std::uint32_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      out[i] = static_cast<std::uint32_t>(
          std::lower_bound(sorted.begin(), sorted.end(), v[i]) - sorted.begin());
    return out;
  };
  std::size_t ra = 0, rb = 0;
  std::vector<std::uint32_t> la = relabel(a, ra), lb = relabel(b, rb);
  std::vector<std::int64_t> table(ra * rb, 0), rows(ra, 0), cols(rb, 0);
  for (std::size_t i = 0; i < la.size(); ++i) {
    table[std::size_t(la[i]) * rb + lb[i]]++;
    rows[la[i]]++;
    cols[lb[i]]++;
  }
  auto pairs = [](std::int64_t n) { return double(n) * double(n - 1) / 2.0; };
  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (std::int64_t c : table) sum_cells += pairs(c);
  for (std::int64_t r : rows) sum_rows += pairs(r);
  for (std::int64_t c : cols) sum_cols += pairs(c);
  double total = pairs(static_cast<std::int64_t>(a.size()));
  double expected = sum_rows * sum_cols / total;
  double maximum = 0.5 * (sum_rows + sum_cols);
  if (maximum == expected) return 1.0;
  return (sum_cells - expected) / (maximum - expected);
}

void write_trace_csv(const FitTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw format_error("cannot create file: " + path.string());
  out << "iteration,bits,step1_delta,step2_delta,step3_delta\n";
  out << std::setprecision(17);
  out << "0," << trace.initial_bits << ",0,0,0\n";
  for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
    const FitIteration& it = trace.iterations[i];
    out << (i + 1) << "," << it.bits << "," << it.step1_delta << ","
        << it.step2_delta << "," << it.step3_delta << "\n";
  }
  if (!out) throw format_error("short write: " + path.string());
}

}  // namespace cooc
