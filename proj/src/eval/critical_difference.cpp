#include "srea/eval/critical_difference.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace srea::eval {

namespace {

// Studentized range quantiles divided by sqrt(2), k = 2 .. 20.
constexpr std::array<double, 19> kQ005{
    1.959964233, 2.343700476, 2.569032073, 2.727774717, 2.849705382, 2.948319908, 3.030878867,
    3.10173026,  3.16368342,  3.218653901, 3.268003591, 3.312738701, 3.353617959, 3.391230382,
    3.426041249, 3.458424619, 3.488684546, 3.517072762, 3.543799277};
constexpr std::array<double, 19> kQ010{
    1.644853627, 2.052293189, 2.291341043, 2.459516343, 2.588520082, 2.692732919, 2.779884381,
    2.854606339, 2.919889307, 2.977768861, 3.029694954, 3.076733814, 3.119693199, 3.159199496,
    3.195743856, 3.229723422, 3.261461439, 3.291224313, 3.319233831};

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

double nemenyi_q(std::size_t n_algorithms, double alpha) {
  if (n_algorithms < 2 || n_algorithms > 20) {
    throw std::invalid_argument("nemenyi_q: tabulated for 2 to 20 algorithms, got " +
                                std::to_string(n_algorithms));
  }
  if (std::fabs(alpha - 0.05) < 1e-12) return kQ005[n_algorithms - 2];
  if (std::fabs(alpha - 0.10) < 1e-12) return kQ010[n_algorithms - 2];
  throw std::invalid_argument("nemenyi_q: alpha must be 0.05 or 0.1");
}

double nemenyi_cd(std::size_t n_algorithms, std::size_t n_conditions, double alpha) {
  if (n_conditions == 0) throw std::invalid_argument("nemenyi_cd: no conditions");
  const double k = static_cast<double>(n_algorithms);
  return nemenyi_q(n_algorithms, alpha) *
         std::sqrt(k * (k + 1.0) / (6.0 * static_cast<double>(n_conditions)));
}

CdLayout cd_diagram_layout(const std::vector<std::string>& names,
                           const std::vector<double>& mean_ranks, double cd) {
  if (names.size() != mean_ranks.size()) {
    throw std::invalid_argument("cd_diagram_layout: names and ranks differ in length");
  }
  if (!(cd >= 0.0)) throw std::invalid_argument("cd_diagram_layout: negative critical distance");
  CdLayout layout;
  layout.cd = cd;
  std::vector<std::size_t> order(names.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mean_ranks[a] < mean_ranks[b]; });
  for (std::size_t i : order) layout.entries.push_back({names[i], mean_ranks[i]});
  layout.axis_max = std::max(1.0, static_cast<double>(names.size()));
  for (const auto& e : layout.entries) {
    layout.axis_min = std::min(layout.axis_min, std::floor(e.rank));
    layout.axis_max = std::max(layout.axis_max, std::ceil(e.rank));
  }

  // On sorted ranks the cliques of "spread <= cd" are contiguous runs; a run
  // starting at i is maximal iff it reaches further than the previous one.
  const std::size_t n = layout.entries.size();
  std::size_t last_end = 0;
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i;
    while (j + 1 < n && layout.entries[j + 1].rank - layout.entries[i].rank <= cd + 1e-12) ++j;
    if (j > i && (!any || j > last_end)) {
      std::vector<std::size_t> clique(j - i + 1);
      std::iota(clique.begin(), clique.end(), i);
      layout.cliques.push_back(std::move(clique));
      last_end = j;
      any = true;
    }
  }
  return layout;
}

std::string CdLayout::to_json() const {
  nlohmann::ordered_json j;
  j["cd"] = cd;
  j["axis"] = {{"min", axis_min}, {"max", axis_max}};
  j["algorithms"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) j["algorithms"].push_back({{"name", e.name}, {"rank", e.rank}});
  j["cliques"] = nlohmann::ordered_json::array();
  for (const auto& c : cliques) {
    nlohmann::ordered_json names = nlohmann::ordered_json::array();
    for (std::size_t i : c) names.push_back(entries[i].name);
    j["cliques"].push_back(names);
  }
  return j.dump(2);
}

std::string CdLayout::to_svg() const {
  const double width = 640.0;
  const double left = 60.0;
  const double right = width - 60.0;
  const double axis_y = 60.0;
  const double span = std::max(axis_max - axis_min, 1e-9);
  auto x_of = [&](double rank) { return left + (rank - axis_min) / span * (right - left); };
  const double height = axis_y + 40.0 + 22.0 * static_cast<double>(entries.size()) +
                        12.0 * static_cast<double>(cliques.size());

  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<line x1=\"" << left << "\" y1=\"" << axis_y << "\" x2=\"" << right << "\" y2=\""
     << axis_y << "\" stroke=\"black\"/>\n";
  for (double r = axis_min; r <= axis_max + 1e-9; r += 1.0) {
    os << "<line x1=\"" << x_of(r) << "\" y1=\"" << axis_y - 5 << "\" x2=\"" << x_of(r)
       << "\" y2=\"" << axis_y << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << x_of(r) << "\" y=\"" << axis_y - 10 << "\" text-anchor=\"middle\">"
       << static_cast<int>(r) << "</text>\n";
  }
  // CD scale bar.
  os << "<line x1=\"" << left << "\" y1=\"20\" x2=\"" << left + cd / span * (right - left)
     << "\" y2=\"20\" stroke=\"black\" stroke-width=\"2\"/>\n";
  os << "<text x=\"" << left << "\" y=\"14\">CD = " << cd << "</text>\n";

  const double clique_top = axis_y + 12.0;
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    const double y = clique_top + 12.0 * static_cast<double>(c);
    os << "<line x1=\"" << x_of(entries[cliques[c].front()].rank) - 3 << "\" y1=\"" << y
       << "\" x2=\"" << x_of(entries[cliques[c].back()].rank) + 3 << "\" y2=\"" << y
       << "\" stroke=\"black\" stroke-width=\"4\"/>\n";
  }
  const double label_top = clique_top + 12.0 * static_cast<double>(cliques.size()) + 16.0;
  const std::size_t half = (entries.size() + 1) / 2;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const bool left_side = i < half;
    const std::size_t row = left_side ? i : entries.size() - 1 - i;
    const double y = label_top + 22.0 * static_cast<double>(row);
    const double x = x_of(entries[i].rank);
    const double tx = left_side ? left - 10.0 : right + 10.0;
    os << "<polyline fill=\"none\" stroke=\"black\" points=\"" << x << "," << axis_y << " " << x
       << "," << y << " " << tx << "," << y << "\"/>\n";
    os << "<text x=\"" << (left_side ? tx - 4 : tx + 4) << "\" y=\"" << y + 4
       << "\" text-anchor=\"" << (left_side ? "end" : "start") << "\">" << xml_escape(entries[i].name) << " ("
       << entries[i].rank << ")</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace srea::eval
