#include "cooc/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <string>
#include <thread>

#include "cooc/errors.hpp"

namespace cooc {

namespace {

// Runs fn(i) for i in [0, count) across `threads` workers in fixed strides;
// each call owns slot i of its output, so results match the serial order.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  int usable = std::max(1, threads);
  if (usable == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  usable = static_cast<int>(
      std::min<std::size_t>(count, static_cast<std::size_t>(usable)));
  std::vector<std::thread> pool;
  pool.reserve(usable);
  for (int t = 0; t < usable; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += usable) fn(i);
    });
  for (std::thread& th : pool) th.join();
}

}  // namespace

void ClassModelSet::validate() const {
  if (models.size() != 10)
    throw std::invalid_argument("class models: expected 10 classes, have " +
                                std::to_string(models.size()));
  for (const CoocModel& m : models) {
    m.validate();
    if (!(m.grouping.domain == models.front().grouping.domain))
      throw std::invalid_argument("class models: domains differ between classes");
    if (m.grouping.group_size != models.front().grouping.group_size)
      throw std::invalid_argument(
          "class models: group sizes differ between classes");
  }
}

SweepResult sweep_group_sizes(const std::vector<SignificanceMap>& train,
                              const std::vector<SignificanceMap>& test,
                              const std::vector<int>& sizes,
                              const FitConfig& config) {
  if (train.empty()) throw std::invalid_argument("sweep: no training maps");
  const IndexDomain& domain = train.front().domain;
  std::size_t n = domain.size();

  auto fitted_bpp = [&](int s, double& train_bpp, double& test_bpp) {
    FitConfig c = config;
    c.group_size = s;
    CoocModel model = fit(train, c).first;
    train_bpp = total_bits(train, model).bits_per_pixel;
    test_bpp = test.empty() ? 0.0 : total_bits(test, model).bits_per_pixel;
  };

  SweepResult result;
  for (int s : sizes) {
    if (s < 2 || std::size_t(s) > n)
      throw std::invalid_argument("sweep: group size " + std::to_string(s) +
                                  " outside [2, " + std::to_string(n) + "]");
    SweepRow row;
    row.group_size = s;
    row.log2_size = std::log2(double(s));
    fitted_bpp(s, row.train_optimized, row.test_optimized);

    row.train_square = row.test_square = std::nan("");
    int r = static_cast<int>(std::lround(std::sqrt(double(s))));
    if (domain.kind == IndexDomain::Kind::pixel && r * r == s &&
        domain.width % r == 0 && domain.height % r == 0) {
      Grouping blocks = init_grouping(domain, s, InitMode::square_blocks, 0);
      CoocModel square = fit_histograms_only(train, blocks, config.bins);
      row.train_square = total_bits(train, square).bits_per_pixel;
      if (!test.empty())
        row.test_square = total_bits(test, square).bits_per_pixel;
    }
    result.rows.push_back(row);
  }
  fitted_bpp(static_cast<int>(n), result.train_single, result.test_single);
  return result;
}

ClassModelSet train_class_models(const std::vector<SignificanceMap>& maps,
                                 const std::vector<int>& labels,
                                 const FitConfig& config, int threads) {
  if (maps.size() != labels.size())
    throw std::invalid_argument("train: map/label count mismatch");
  std::vector<std::vector<SignificanceMap>> by_class(10);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    int d = labels[i];
    if (d < 0 || d > 9)
      throw std::invalid_argument("train: label outside [0,9]");
    by_class[d].push_back(maps[i]);
  }
  for (int d = 0; d < 10; ++d)
    if (by_class[d].empty())
      throw std::invalid_argument("train: class " + std::to_string(d) +
                                  " has no training maps");
  ClassModelSet set;
  set.models.resize(10);
  parallel_for(10, threads, [&](std::size_t d) {
    FitConfig c = config;
    c.seed = config.seed + d;
    set.models[d] = fit(by_class[d], c).first;
  });
  set.validate();
  return set;
}

int map_classify(const SignificanceMap& y, const ClassModelSet& models) {
  int best = 0;
  double best_bits = exact_map_bits(y, models.models[0]);
  for (int d = 1; d < models.classes(); ++d) {
    double bits = exact_map_bits(y, models.models[d]);
    if (bits < best_bits) {
      best = d;
      best_bits = bits;
    }
  }
  return best;
}

std::vector<int> classify_all(const std::vector<SignificanceMap>& maps,
                              const ClassModelSet& models, int threads) {
  std::vector<ModelEvaluator> evals;
  evals.reserve(models.models.size());
  for (const CoocModel& m : models.models) evals.emplace_back(m);
  std::vector<int> out(maps.size());
  parallel_for(maps.size(), threads, [&](std::size_t i) {
    int best = 0;
    double best_bits = evals[0].map_bits(maps[i]);
    for (std::size_t d = 1; d < evals.size(); ++d) {
      double bits = evals[d].map_bits(maps[i]);
      if (bits < best_bits) {
        best = static_cast<int>(d);
        best_bits = bits;
      }
    }
    out[i] = best;
  });
  return out;
}

FeatureVector extract_features(const SignificanceMap& y,
                               const ClassModelSet& models) {
  FeatureVector f;
  f.classes = models.classes();
  f.groups = models.groups_per_class();
  f.bits.reserve(std::size_t(f.classes) * f.groups);
  for (const CoocModel& m : models.models) {
    std::vector<double> per_group = ModelEvaluator(m).group_bits(y);
    f.bits.insert(f.bits.end(), per_group.begin(), per_group.end());
  }
  return f;
}

std::vector<FeatureVector> extract_features_all(
    const std::vector<SignificanceMap>& maps, const ClassModelSet& models,
    int threads) {
  std::vector<ModelEvaluator> evals;
  evals.reserve(models.models.size());
  for (const CoocModel& m : models.models) evals.emplace_back(m);
  std::vector<FeatureVector> out(maps.size());
  parallel_for(maps.size(), threads, [&](std::size_t i) {
    FeatureVector f;
    f.classes = models.classes();
    f.groups = models.groups_per_class();
    f.bits.reserve(std::size_t(f.classes) * f.groups);
    for (const ModelEvaluator& e : evals) {
      std::vector<double> per_group = e.group_bits(maps[i]);
      f.bits.insert(f.bits.end(), per_group.begin(), per_group.end());
    }
    out[i] = std::move(f);
  });
  return out;
}

double evaluate_error(const std::vector<int>& predictions,
                      const std::vector<int>& labels) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("evaluate_error: length mismatch");
  if (predictions.empty())
    throw std::invalid_argument("evaluate_error: empty input");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    wrong += predictions[i] != labels[i];
  return double(wrong) / double(predictions.size());
}

// ---- CSV ----

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw format_error("cannot create file: " + path.string());
  out << std::setprecision(17);
  return out;
}

void finish_csv(std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw format_error("short write: " + path.string());
}

}  // namespace

void write_sweep_csv(const SweepResult& sweep,
                     const std::filesystem::path& path) {
  std::ofstream out = open_csv(path);
  out << "size,log2_size,train_optimized,test_optimized,train_square,"
         "test_square,train_single,test_single\n";
  for (const SweepRow& r : sweep.rows) {
    out << r.group_size << "," << r.log2_size << "," << r.train_optimized
        << "," << r.test_optimized << ",";
    if (!std::isnan(r.train_square)) out << r.train_square;
    out << ",";
    if (!std::isnan(r.test_square)) out << r.test_square;
    out << "," << sweep.train_single << "," << sweep.test_single << "\n";
  }
  finish_csv(out, path);
}

void write_features_csv(const std::vector<FeatureVector>& features,
                        const std::vector<int>& labels,
                        const std::filesystem::path& path) {
  if (!labels.empty() && labels.size() != features.size())
    throw std::invalid_argument("features csv: label count mismatch");
  std::ofstream out = open_csv(path);
  if (!features.empty()) {
    out << "label";
    for (int d = 0; d < features.front().classes; ++d)
      for (int k = 0; k < features.front().groups; ++k)
        out << ",bits_" << d << "_" << k;
    out << "\n";
  }
  for (std::size_t i = 0; i < features.size(); ++i) {
    out << (labels.empty() ? -1 : labels[i]);
    for (double b : features[i].bits) out << "," << b;
    out << "\n";
  }
  finish_csv(out, path);
}

void write_predictions_csv(const std::vector<int>& predictions,
                           const std::vector<int>& labels,
                           const std::filesystem::path& path) {
  if (!labels.empty() && labels.size() != predictions.size())
    throw std::invalid_argument("predictions csv: label count mismatch");
  std::ofstream out = open_csv(path);
  out << "id,predicted,label\n";
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    out << i << "," << predictions[i] << ",";
    if (!labels.empty()) out << labels[i];
    out << "\n";
  }
  finish_csv(out, path);
}

void write_costs_csv(const std::vector<double>& bits, std::size_t domain_size,
                     const std::filesystem::path& path) {
  std::ofstream out = open_csv(path);
  out << "id,bits,bits_per_pixel\n";
  for (std::size_t i = 0; i < bits.size(); ++i)
    out << i << "," << bits[i] << "," << bits[i] / double(domain_size) << "\n";
  finish_csv(out, path);
}

}  // namespace cooc
