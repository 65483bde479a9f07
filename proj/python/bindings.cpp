#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "srea/algo/relabel.hpp"
#include "srea/algo/schedule.hpp"
#include "srea/cli/config.hpp"
#include "srea/cli/experiment.hpp"
#include "srea/data/synthetic.hpp"
#include "srea/data/windowing.hpp"
#include "srea/eval/critical_difference.hpp"
#include "srea/eval/friedman.hpp"
#include "srea/eval/mann_whitney.hpp"
#include "srea/eval/metrics.hpp"
#include "srea/noise/transition.hpp"

namespace py = pybind11;
using namespace srea;

namespace {

template <typename T>
std::vector<T> to_vector(const py::array_t<T, py::array::c_style | py::array::forcecast>& a) {
  return std::vector<T>(a.data(), a.data() + a.size());
}

py::array_t<double> transition_matrix(const std::string& kind, std::size_t k, double eps) {
  const auto T = noise::build_transition(noise::parse_noise_kind(kind), k, eps);
  py::array_t<double> out({k, k});
  std::copy(T.data().begin(), T.data().end(), out.mutable_data());
  return out;
}

py::tuple corrupt_labels(const py::array_t<int, py::array::c_style | py::array::forcecast>& labels,
                         const std::string& kind, std::size_t k, double eps, std::uint64_t seed) {
  const auto y = to_vector(labels);
  core::Rng rng = core::Rng(seed).substream(core::Stream::noise);
  const auto c = noise::corrupt(y, noise::build_transition(noise::parse_noise_kind(kind), k, eps), rng);
  py::array_t<int> noisy(std::vector<py::ssize_t>{static_cast<py::ssize_t>(c.labels.size())});
  py::array_t<bool> flipped(std::vector<py::ssize_t>{static_cast<py::ssize_t>(c.flipped.size())});
  std::copy(c.labels.begin(), c.labels.end(), noisy.mutable_data());
  for (std::size_t i = 0; i < c.flipped.size(); ++i) flipped.mutable_data()[i] = c.flipped[i];
  return py::make_tuple(noisy, flipped);
}

py::tuple dataset_arrays(const data::Dataset& ds) {
  py::array_t<float> x({ds.size(), ds.channels, ds.length});
  std::copy(ds.samples.begin(), ds.samples.end(), x.mutable_data());
  py::array_t<int> y(std::vector<py::ssize_t>{static_cast<py::ssize_t>(ds.size())});
  std::copy(ds.labels.begin(), ds.labels.end(), y.mutable_data());
  return py::make_tuple(x, y);
}

py::dict chp_series(std::size_t days, const std::string& season, std::uint64_t seed) {
  data::ChpConfig cfg;
  cfg.days = days;
  if (season == "summer") {
    cfg.season = data::Season::summer;
  } else if (season != "heating") {
    throw py::value_error("season must be 'heating' or 'summer'");
  }
  core::Rng rng = core::Rng(seed).substream(core::Stream::data);
  const auto s = data::generate_chp_like(cfg, rng);
  const std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(s.size())};
  py::dict out;
  out["timestamp"] = py::array_t<std::int64_t>(shape, s.timestamps.data());
  for (std::size_t c = 0; c < s.channel_names.size(); ++c) {
    out[py::str(s.channel_names[c])] = py::array_t<double>(shape, s.columns[c].data());
  }
  return out;
}

py::dict mwu(const std::vector<double>& a, const std::vector<double>& b, double alpha,
             const std::string& alternative, const std::string& method) {
  eval::Alternative alt = eval::Alternative::two_sided;
  if (alternative == "greater") {
    alt = eval::Alternative::greater;
  } else if (alternative == "less") {
    alt = eval::Alternative::less;
  } else if (alternative != "two-sided") {
    throw py::value_error("alternative must be 'two-sided', 'greater' or 'less'");
  }
  eval::MwuMethod m = eval::MwuMethod::automatic;
  if (method == "exact") {
    m = eval::MwuMethod::exact;
  } else if (method == "normal") {
    m = eval::MwuMethod::normal;
  } else if (method != "auto") {
    throw py::value_error("method must be 'auto', 'exact' or 'normal'");
  }
  const auto r = eval::mann_whitney_u(a, b, alpha, alt, m);
  py::dict out;
  out["u_a"] = r.u_a;
  out["u_b"] = r.u_b;
  out["p"] = r.p;
  out["z"] = r.z;
  out["exact"] = r.exact;
  out["verdict"] = std::string(eval::to_string(r.verdict));
  return out;
}

py::dict friedman(const std::vector<std::vector<double>>& scores) {
  eval::ScoreMatrix m;
  m.scores = scores;
  for (std::size_t i = 0; i < scores.size(); ++i) m.algorithms.push_back("a" + std::to_string(i));
  const std::size_t n = scores.empty() ? 0 : scores.front().size();
  for (std::size_t c = 0; c < n; ++c) m.conditions.push_back("c" + std::to_string(c));
  const auto r = eval::friedman_test(m);
  py::dict out;
  out["mean_ranks"] = r.mean_ranks;
  out["chi2"] = r.chi2;
  out["f_stat"] = r.f_stat;
  out["p_chi2"] = r.p_chi2;
  out["p_f"] = r.p_f;
  out["warnings"] = r.warnings;
  return out;
}

cli::ExperimentConfig make_config(const py::dict& options) {
  cli::ExperimentConfig c;
  for (const auto& [key, value] : options) {
    std::string text;
    if (py::isinstance<py::bool_>(value)) {
      text = value.cast<bool>() ? "true" : "false";
    } else if (py::isinstance<py::list>(value) || py::isinstance<py::tuple>(value)) {
      for (const auto& item : value) {
        if (!text.empty()) text += ",";
        text += py::str(item).cast<std::string>();
      }
    } else {
      text = py::str(value).cast<std::string>();
    }
    cli::set_config_value(c, key.cast<std::string>(), text);
  }
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Self-re-labeling time-series classification under label noise";
  m.attr("__version__") = cli::code_version();

  py::register_exception<cli::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("transition_matrix", &transition_matrix, py::arg("kind"), py::arg("k"), py::arg("epsilon"),
        "Row-stochastic k x k label-noise matrix ('symmetric', 'asymmetric' or 'flip').");
  m.def("corrupt", &corrupt_labels, py::arg("labels"), py::arg("kind"), py::arg("k"),
        py::arg("epsilon"), py::arg("seed") = 0, "Returns (noisy_labels, flipped_mask).");

  m.def(
      "alpha_at",
      [](int t, int lambda_init, int delta_start, int delta_end) {
        return algo::alpha_at(t, {lambda_init, delta_start, delta_end});
      },
      py::arg("t"), py::arg("lambda_init") = 0, py::arg("delta_start") = 25, py::arg("delta_end") = 30);
  m.def(
      "w_at",
      [](int t, int lambda_init, int delta_start, int delta_end) {
        return algo::w_at(t, {lambda_init, delta_start, delta_end});
      },
      py::arg("t"), py::arg("lambda_init") = 0, py::arg("delta_start") = 25, py::arg("delta_end") = 30);

  m.def("ema_weights", &algo::ema_weights, py::arg("m"));
  m.def(
      "cluster_pseudo_label",
      [](const std::vector<float>& embedding, const std::vector<float>& centers, std::size_t k) {
        return algo::cluster_pseudo_label(embedding, centers, k);
      },
      py::arg("embedding"), py::arg("centers"), py::arg("k"),
      "Softmin over distances; centers are d x k, row-major.");
  m.def(
      "correct_label",
      [](int given, const std::vector<double>& y_c, const std::vector<double>& y_cc, double w,
         bool halve) { return algo::correct_label(given, y_c, y_cc, w, halve); },
      py::arg("given"), py::arg("y_c"), py::arg("y_cc") = std::vector<double>{}, py::arg("w"),
      py::arg("halve") = false);

  m.def(
      "macro_f1",
      [](const std::vector<int>& pred, const std::vector<int>& truth, std::size_t k) {
        return eval::macro_f1(pred, truth, k);
      },
      py::arg("pred"), py::arg("truth"), py::arg("k"));
  m.def(
      "confusion_matrix",
      [](const std::vector<int>& pred, const std::vector<int>& truth, std::size_t k) {
        const auto cm = eval::confusion_matrix(pred, truth, k);
        py::array_t<std::size_t> out({k, k});
        std::copy(cm.counts.begin(), cm.counts.end(), out.mutable_data());
        return out;
      },
      py::arg("pred"), py::arg("truth"), py::arg("k"));
  m.def("mann_whitney_u", &mwu, py::arg("a"), py::arg("b"), py::arg("alpha") = 0.05,
        py::arg("alternative") = "two-sided", py::arg("method") = "auto");
  m.def("friedman_test", &friedman, py::arg("scores"), "scores[algorithm][condition], higher is better");
  m.def("nemenyi_cd", &eval::nemenyi_cd, py::arg("n_algorithms"), py::arg("n_conditions"),
        py::arg("alpha") = 0.05);

  m.def(
      "generate_cbf",
      [](std::size_t n, std::size_t length, std::uint64_t seed) {
        core::Rng rng = core::Rng(seed).substream(core::Stream::data);
        return dataset_arrays(data::generate_cbf(n, length, rng));
      },
      py::arg("n") = 930, py::arg("length") = 128, py::arg("seed") = 0, "Returns (X[n, 1, L], y).");
  m.def("generate_chp_like", &chp_series, py::arg("days") = 60, py::arg("season") = "heating",
        py::arg("seed") = 0, "One-minute series as a dict of arrays.");
  m.def(
      "windowize_chp",
      [](std::size_t days, std::uint64_t seed) {
        data::ChpConfig cfg;
        cfg.days = days;
        core::Rng rng = core::Rng(seed).substream(core::Stream::data);
        return dataset_arrays(data::windowize(data::generate_chp_like(cfg, rng), data::WindowingConfig{}));
      },
      py::arg("days") = 60, py::arg("seed") = 0, "Windowed CHP-like dataset (X[n, 3, 36], y).");

  m.def(
      "config_hash", [](const py::dict& options) { return cli::config_hash(make_config(options)); },
      py::arg("options") = py::dict());
  m.def(
      "train",
      [](const py::dict& options, std::uint64_t seed) {
        const auto config = make_config(options);
        cli::RunResult result;
        {
          py::gil_scoped_release release;
          result = cli::run_experiment(config, seed);
        }
        return py::module_::import("json").attr("loads")(cli::metrics_json(result));
      },
      py::arg("options") = py::dict(), py::arg("seed") = 0,
      "Runs one experiment; options use the config-file keys. Returns the metrics dict.");
}
