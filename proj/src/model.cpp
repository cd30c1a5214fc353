#include "cooc/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cooc/likelihood.hpp"

namespace cooc {

int GroupHistogram::bin_of(double z) const {
  if (z < edges.front() || z > edges.back())
    throw std::invalid_argument("histogram: count outside [0, s]");
  // upper_bound over e_1..e_{B-1}; the last bin is closed at e_B.
  int b = static_cast<int>(
      std::upper_bound(edges.begin() + 1, edges.end() - 1, z) - (edges.begin() + 1));
  return b;
}

std::vector<int> GroupHistogram::equal_width_edges(int group_size, int bins) {
  int counts = group_size + 1;
  int b = std::min(bins, counts);
  std::vector<int> edges(std::size_t(b) + 1);
  for (int i = 0; i < b; ++i)
    edges[i] = static_cast<int>((std::int64_t(i) * counts) / b);
  edges[b] = group_size;
  return edges;
}

GroupHistogram GroupHistogram::uniform(int group_size, int bins) {
  GroupHistogram h;
  h.edges = equal_width_edges(group_size, bins);
  int b = static_cast<int>(h.edges.size()) - 1;
  h.probs.resize(b);
  for (int i = 0; i < b; ++i)
    h.probs[i] = double(h.width(i)) / double(group_size + 1);
  return h;
}

GroupHistogram GroupHistogram::from_counts(const std::vector<double>& values,
                                           int group_size, int bins) {
  if (values.empty())
    throw std::invalid_argument("histogram: need at least one count value");
  GroupHistogram h;
  h.edges = equal_width_edges(group_size, bins);
  int b = static_cast<int>(h.edges.size()) - 1;
  std::vector<std::int64_t> tally(b, 0);
  for (double z : values) tally[h.bin_of(z)]++;
  h.probs.resize(b);
  double denom = double(values.size()) + double(b);
  for (int i = 0; i < b; ++i) h.probs[i] = (double(tally[i]) + 1.0) / denom;
  return h;
}

[[noreturn]] static void invariant_failure(const std::string& what) {
  throw std::invalid_argument(what);
}

void GroupHistogram::validate() const {
  if (bins() < 1 || edges.size() != probs.size() + 1)
    invariant_failure("histogram: edge/probability size mismatch");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) invariant_failure("histogram: non-positive bin probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    invariant_failure("histogram: bin probabilities must sum to 1");
}

std::vector<std::vector<std::uint32_t>> Grouping::members() const {
  std::vector<std::vector<std::uint32_t>> out(group_count);
  for (int k = 0; k < group_count; ++k) out[k].reserve(size_of(k));
  for (std::uint32_t p = 0; p < assignment.size(); ++p)
    out[assignment[p]].push_back(p);
  return out;
}

void Grouping::validate() const {
  std::size_t n = domain.size();
  if (group_size < 1) invariant_failure("grouping: group size must be >= 1");
  if (assignment.size() != n)
    invariant_failure("grouping: assignment length != domain size");
  int expected_groups = static_cast<int>((n + group_size - 1) / group_size);
  if (group_count != expected_groups)
    invariant_failure("grouping: group count inconsistent with size");
  std::vector<std::size_t> sizes(group_count, 0);
  for (std::uint32_t k : assignment) {
    if (k >= static_cast<std::uint32_t>(group_count))
      invariant_failure("grouping: group id out of range");
    sizes[k]++;
  }
  for (int k = 0; k < group_count; ++k)
    if (sizes[k] != static_cast<std::size_t>(size_of(k)))
      invariant_failure("grouping: group " + std::to_string(k) +
                        " has size " + std::to_string(sizes[k]) +
                        ", expected " + std::to_string(size_of(k)));
}

void CoocModel::validate() const {
  grouping.validate();
  if (histograms.size() != static_cast<std::size_t>(grouping.group_count))
    invariant_failure("model: histogram count != group count");
  for (int k = 0; k < grouping.group_count; ++k) {
    const GroupHistogram& h = histograms[k];
    if (h.edges.size() != h.probs.size() + 1 || h.bins() < 1)
      invariant_failure("model: malformed histogram");
    if (h.edges.front() != 0 || h.max_count() != grouping.size_of(k))
      invariant_failure("model: histogram range != group size");
    double sum = 0.0;
    for (double p : h.probs) {
      if (!(p > 0.0)) invariant_failure("model: non-positive bin probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      invariant_failure("model: bin probabilities must sum to 1");
  }
}

GroupCounts group_counts(const SignificanceMap& y, const Grouping& grouping) {
  if (y.domain != grouping.domain)
    throw std::invalid_argument("group_counts: map and grouping domains differ");
  GroupCounts z(grouping.group_count, 0);
  const auto& words = y.bits.words();
  for (std::size_t wi = 0; wi < words.size(); ++wi) {
    std::uint64_t w = words[wi];
    while (w) {
      int b = std::countr_zero(w);
      z[grouping.assignment[wi * 64 + b]]++;
      w &= w - 1;
    }
  }
  return z;
}

double exact_map_bits(const SignificanceMap& y, const Grouping& grouping,
                      const std::vector<GroupHistogram>& hists) {
  GroupCounts z = group_counts(y, grouping);
  double bits = 0.0;
  for (int k = 0; k < grouping.group_count; ++k) {
    int s_k = grouping.size_of(k);
    bits += log2_binomial(s_k, z[k]) - std::log2(hists[k].pmf(z[k]));
  }
  return bits;
}

double exact_map_bits(const SignificanceMap& y, const CoocModel& model) {
  return exact_map_bits(y, model.grouping, model.histograms);
}

TotalBits total_bits(const std::vector<SignificanceMap>& maps,
                     const CoocModel& model) {
  if (maps.empty()) throw std::invalid_argument("total_bits: empty dataset");
  ModelEvaluator eval(model);
  TotalBits out;
  for (const SignificanceMap& y : maps) out.bits += eval.map_bits(y);
  out.bits_per_pixel =
      out.bits / (double(maps.size()) * double(model.grouping.domain.size()));
  return out;
}

ModelEvaluator::ModelEvaluator(const CoocModel& model) : model_(&model) {
  int K = model.grouping.group_count;
  cost_.resize(K);
  for (int k = 0; k < K; ++k) {
    int s_k = model.grouping.size_of(k);
    cost_[k].resize(std::size_t(s_k) + 1);
    for (int z = 0; z <= s_k; ++z)
      cost_[k][z] =
          log2_binomial(s_k, z) - std::log2(model.histograms[k].pmf(z));
  }
}

double ModelEvaluator::map_bits(const SignificanceMap& y) const {
  return map_bits(group_counts(y, model_->grouping));
}

double ModelEvaluator::map_bits(const GroupCounts& counts) const {
  double bits = 0.0;
  for (std::size_t k = 0; k < cost_.size(); ++k) bits += cost_[k][counts[k]];
  return bits;
}

std::vector<double> ModelEvaluator::group_bits(const SignificanceMap& y) const {
  GroupCounts z = group_counts(y, model_->grouping);
  std::vector<double> out(cost_.size());
  for (std::size_t k = 0; k < cost_.size(); ++k) out[k] = cost_[k][z[k]];
  return out;
}

}  // namespace cooc
