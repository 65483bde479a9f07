#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace srea::eval {

enum class MwuMethod { automatic, exact, normal };
enum class Alternative { two_sided, greater, less };

/// Table notation for a pairwise comparison of group a against group b.
enum class Verdict { better, worse, similar };
std::string_view to_string(Verdict v);  // "+", "-", "≈"

struct MwuResult {
  double u_a = 0.0;  // rank sum of a minus n_a (n_a + 1) / 2
  double u_b = 0.0;
  double p = 1.0;
  double z = 0.0;    // normal approximation only
  bool exact = false;
  Verdict verdict = Verdict::similar;
};

/// Mann-Whitney U test with midranks for ties. `automatic` uses the exact
/// null distribution when min(n_a, n_b) <= 8 and there are no ties, and the
/// normal approximation with tie and continuity correction otherwise. The
/// verdict is + / - when p < alpha and a lies above / below b.
MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b, double alpha = 0.05,
                         Alternative alternative = Alternative::two_sided,
                         MwuMethod method = MwuMethod::automatic);

/// Exact null distribution of U_a for tie-free groups: entry u holds
/// P(U_a = u), u = 0 .. n_a * n_b.
std::vector<double> mann_whitney_null_distribution(std::size_t n_a, std::size_t n_b);

/// Midranks (1-based) of the pooled values.
std::vector<double> midranks(std::span<const double> values);

}  // namespace srea::eval
