#include "srea/eval/metrics.hpp"

#include <sstream>
#include <stdexcept>

namespace srea::eval {

namespace {

void check_inputs(std::span<const int> pred, std::span<const int> truth, std::size_t k) {
  if (pred.size() != truth.size()) {
    throw std::invalid_argument("prediction and truth lengths differ (" +
                                std::to_string(pred.size()) + " vs " +
                                std::to_string(truth.size()) + ")");
  }
  if (k == 0) throw std::invalid_argument("class count must be positive");
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < 0 || static_cast<std::size_t>(pred[i]) >= k || truth[i] < 0 ||
        static_cast<std::size_t>(truth[i]) >= k) {
      throw std::out_of_range("label at position " + std::to_string(i) + " outside [0, " +
                              std::to_string(k) + ")");
    }
  }
}

}  // namespace

ConfusionMatrix confusion_matrix(std::span<const int> pred, std::span<const int> truth,
                                 std::size_t k) {
  check_inputs(pred, truth, k);
  ConfusionMatrix cm;
  cm.k = k;
  cm.counts.assign(k * k, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++cm.counts[static_cast<std::size_t>(truth[i]) * k + static_cast<std::size_t>(pred[i])];
  }
  return cm;
}

std::vector<double> ConfusionMatrix::row_percentages() const {
  std::vector<double> out(k * k, 0.0);
  for (std::size_t r = 0; r < k; ++r) {
    std::size_t total = 0;
    for (std::size_t c = 0; c < k; ++c) total += at(r, c);
    if (total == 0) continue;
    for (std::size_t c = 0; c < k; ++c) {
      out[r * k + c] = 100.0 * static_cast<double>(at(r, c)) / static_cast<double>(total);
    }
  }
  return out;
}

std::string ConfusionMatrix::to_csv() const {
  std::ostringstream os;
  os << "truth";
  for (std::size_t c = 0; c < k; ++c) os << ",pred" << c;
  os << '\n';
  for (std::size_t r = 0; r < k; ++r) {
    os << r;
    for (std::size_t c = 0; c < k; ++c) os << ',' << at(r, c);
    os << '\n';
  }
  return os.str();
}

F1Report f1_report(std::span<const int> pred, std::span<const int> truth, std::size_t k) {
  const ConfusionMatrix cm = confusion_matrix(pred, truth, k);
  F1Report report;
  report.per_class.assign(k, 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t tp = cm.at(j, j);
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (std::size_t o = 0; o < k; ++o) {
      if (o == j) continue;
      fp += cm.at(o, j);
      fn += cm.at(j, o);
    }
    const std::size_t denom = 2 * tp + fp + fn;
    if (denom == 0) {
      report.empty_classes.push_back(static_cast<int>(j));
      report.warnings.push_back("class " + std::to_string(j) +
                                " has no true or predicted samples; its F1 counts as 0");
      continue;
    }
    report.per_class[j] = 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
    total += report.per_class[j];
  }
  report.macro = total / static_cast<double>(k);
  return report;
}

double macro_f1(std::span<const int> pred, std::span<const int> truth, std::size_t k) {
  return f1_report(pred, truth, k).macro;
}

double accuracy(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("accuracy: length mismatch");
  if (pred.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

}  // namespace srea::eval
