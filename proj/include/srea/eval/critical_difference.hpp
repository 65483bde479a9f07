#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace srea::eval {

/// Two-tailed Nemenyi critical value q_alpha (studentized range / sqrt 2)
/// for 2 to 20 algorithms; alpha is 0.05 or 0.10.
double nemenyi_q(std::size_t n_algorithms, double alpha);

/// q_alpha * sqrt(k (k + 1) / (6 N)).
double nemenyi_cd(std::size_t n_algorithms, std::size_t n_conditions, double alpha = 0.05);

struct CdLayout {
  struct Entry {
    std::string name;
    double rank = 0.0;
  };
  double cd = 0.0;
  double axis_min = 1.0;
  double axis_max = 1.0;
  std::vector<Entry> entries;               // sorted by rank, best first
  std::vector<std::vector<std::size_t>> cliques;  // indices into entries

  std::string to_json() const;
  std::string to_svg() const;
};

/// Groups algorithms into maximal runs whose rank spread is at most cd.
/// Single algorithms are not reported as cliques.
CdLayout cd_diagram_layout(const std::vector<std::string>& names,
                           const std::vector<double>& mean_ranks, double cd);

}  // namespace srea::eval
