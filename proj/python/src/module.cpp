#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <optional>
#include <sstream>

#include "fairaudit/audit.hpp"
#include "fairaudit/beta_calibration.hpp"
#include "fairaudit/error.hpp"
#include "fairaudit/semisupervised.hpp"
#include "fairaudit/simulation.hpp"
#include "fairaudit/study_io.hpp"
#include "fairaudit/supervised.hpp"

namespace py = pybind11;
using namespace fairaudit;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<int, py::array::c_style | py::array::forcecast>;

// NaN outcomes mark unlabeled records.
AuditDataset make_dataset(const DoubleArray& y, const DoubleArray& s,
                          const IntArray& a, std::optional<DoubleArray> w,
                          double cutoff, std::vector<bool> categorical) {
  const auto n = static_cast<std::size_t>(s.size());
  if (static_cast<std::size_t>(y.size()) != n ||
      static_cast<std::size_t>(a.size()) != n) {
    throw InputError("y, s and a must have the same length");
  }
  std::size_t q = 0;
  if (w) {
    if (w->ndim() != 2 || static_cast<std::size_t>(w->shape(0)) != n) {
      throw InputError("w must be a 2-d array with one row per record");
    }
    q = static_cast<std::size_t>(w->shape(1));
  }
  if (!categorical.empty() && categorical.size() != q) {
    throw InputError("categorical needs one flag per covariate column");
  }
  std::vector<CovariateKind> kinds(q, CovariateKind::Continuous);
  for (std::size_t k = 0; k < categorical.size(); ++k) {
    if (categorical[k]) kinds[k] = CovariateKind::Categorical;
  }
  auto yv = y.unchecked<1>();
  auto sv = s.unchecked<1>();
  auto av = a.unchecked<1>();
  std::vector<AuditRecord> records(n);
  for (std::size_t i = 0; i < n; ++i) {
    AuditRecord& r = records[i];
    const double yi = yv(static_cast<py::ssize_t>(i));
    if (!std::isnan(yi)) {
      if (yi != 0.0 && yi != 1.0) throw InputError("y must be 0, 1 or NaN");
      r.y = static_cast<int>(yi);
    }
    r.s = sv(static_cast<py::ssize_t>(i));
    r.a = av(static_cast<py::ssize_t>(i));
    if (w) {
      auto wv = w->unchecked<2>();
      for (std::size_t k = 0; k < q; ++k) {
        r.w.push_back(wv(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(k)));
      }
    }
  }
  return AuditDataset(std::move(records), cutoff, std::move(kinds));
}

ImputationConfig imputation_config(const AuditDataset& data,
                                   std::optional<int> order,
                                   std::optional<double> lambda, int folds,
                                   std::uint64_t seed) {
  ImputationConfig cfg;
  for (std::size_t k = 0; k < data.covariate_count(); ++k) {
    (data.covariate_kinds()[k] == CovariateKind::Continuous ? cfg.continuous
                                                            : cfg.categorical)
        .push_back(k);
  }
  cfg.order = order;
  cfg.lambda = lambda;
  cfg.folds = folds;
  cfg.seed = seed;
  return cfg;
}

py::dict dataset_arrays(const AuditDataset& data) {
  const auto n = static_cast<py::ssize_t>(data.records().size());
  const auto q = static_cast<py::ssize_t>(data.covariate_count());
  DoubleArray y(n), s(n);
  IntArray a(n);
  DoubleArray w({n, q});
  auto yv = y.mutable_unchecked<1>();
  auto sv = s.mutable_unchecked<1>();
  auto av = a.mutable_unchecked<1>();
  auto wv = w.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < n; ++i) {
    const AuditRecord& r = data.records()[static_cast<std::size_t>(i)];
    yv(i) = r.y ? *r.y : std::nan("");
    sv(i) = r.s;
    av(i) = r.a;
    for (py::ssize_t k = 0; k < q; ++k) wv(i, k) = r.w[static_cast<std::size_t>(k)];
  }
  py::dict out;
  out["y"] = y;
  out["s"] = s;
  out["a"] = a;
  out["w"] = w;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Group-fairness disparity estimation from partially labeled data";

  // Translators run newest first, so the base class goes in first.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base);
  py::register_exception<DegenerateGroupError>(m, "DegenerateGroupError", base);
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base);
  py::register_exception<SolverError>(m, "SolverError", base);

  py::enum_<Metric>(m, "Metric")
      .value("TPR", Metric::TPR)
      .value("FPR", Metric::FPR)
      .value("PPV", Metric::PPV)
      .value("NPV", Metric::NPV)
      .value("F1", Metric::F1)
      .value("ACC", Metric::ACC)
      .value("BS", Metric::BS);
  m.attr("ALL_METRICS") = std::vector<Metric>(kAllMetrics.begin(), kAllMetrics.end());

  py::enum_<Method>(m, "Method")
      .value("SUPERVISED", Method::Supervised)
      .value("INFAIRNESS", Method::Infairness)
      .value("JI", Method::Ji);

  py::class_<GroupMoments>(m, "GroupMoments")
      .def(py::init([](double mu_y, double mu_d, double mu_s2, double mu_sy,
                       double mu_dy, int group) {
             return GroupMoments{mu_y, mu_d, mu_s2, mu_sy, mu_dy, group};
           }),
           py::arg("mu_y") = 0.0, py::arg("mu_d") = 0.0, py::arg("mu_s2") = 0.0,
           py::arg("mu_sy") = 0.0, py::arg("mu_dy") = 0.0, py::arg("group") = 0)
      .def_readwrite("mu_y", &GroupMoments::mu_y)
      .def_readwrite("mu_d", &GroupMoments::mu_d)
      .def_readwrite("mu_s2", &GroupMoments::mu_s2)
      .def_readwrite("mu_sy", &GroupMoments::mu_sy)
      .def_readwrite("mu_dy", &GroupMoments::mu_dy)
      .def_readwrite("group", &GroupMoments::group);

  py::class_<MetricEstimate>(m, "MetricEstimate")
      .def_readonly("metric", &MetricEstimate::metric)
      .def_readonly("method", &MetricEstimate::method)
      .def_readonly("point", &MetricEstimate::point)
      .def_readonly("se", &MetricEstimate::se)
      .def_readonly("ci_low", &MetricEstimate::ci_low)
      .def_readonly("ci_high", &MetricEstimate::ci_high)
      .def_property_readonly("p_value", &MetricEstimate::p_value)
      .def("__repr__", [](const MetricEstimate& e) {
        std::ostringstream os;
        os << "MetricEstimate(" << to_string(e.metric) << ", " << to_string(e.scope)
           << ", point=" << e.point << ", se=" << e.se << ")";
        return os.str();
      });

  py::class_<GroupedEstimate>(m, "GroupedEstimate")
      .def_readonly("group0", &GroupedEstimate::group0)
      .def_readonly("group1", &GroupedEstimate::group1)
      .def_readonly("delta", &GroupedEstimate::delta);

  py::class_<AuditDataset>(m, "AuditDataset")
      .def(py::init(&make_dataset), py::arg("y"), py::arg("s"), py::arg("a"),
           py::arg("w") = py::none(), py::arg("cutoff") = 0.5,
           py::arg("categorical") = std::vector<bool>{},
           "Records with NaN outcome are unlabeled.")
      .def_property_readonly("cutoff", &AuditDataset::cutoff)
      .def("labeled_count",
           py::overload_cast<int>(&AuditDataset::labeled_count, py::const_))
      .def("unlabeled_count",
           py::overload_cast<int>(&AuditDataset::unlabeled_count, py::const_))
      .def("arrays", &dataset_arrays);

  m.def("classify", &classify, py::arg("s"), py::arg("cutoff"));
  m.def("metric_from_moments", &metric_from_moments, py::arg("metric"),
        py::arg("moments"));
  m.def("disparity", &disparity, py::arg("metric"), py::arg("m0"), py::arg("m1"));
  m.def("group_moments", py::overload_cast<const AuditDataset&, int>(
                             &group_moments_supervised),
        py::arg("data"), py::arg("group"));

  m.def("estimate_supervised", &estimate_supervised, py::arg("data"),
        py::arg("metric"));
  m.def(
      "estimate_infairness",
      [](const AuditDataset& data, Metric metric, std::optional<int> order,
         std::optional<double> lam, int folds, std::uint64_t seed) {
        return estimate_infairness(data, metric,
                                   imputation_config(data, order, lam, folds, seed));
      },
      py::arg("data"), py::arg("metric"), py::arg("order") = py::none(),
      py::arg("lam") = py::none(), py::arg("folds") = 10, py::arg("seed") = 0,
      "order=None selects by GBIC; lam=None selects by cross-validation.");
  m.def(
      "estimate_ji",
      [](const AuditDataset& data, Metric metric) { return estimate_ji(data, metric); },
      py::arg("data"), py::arg("metric"));
  m.def(
      "relative_efficiency",
      [](const GroupedEstimate& sup, const GroupedEstimate& ss) {
        return efficiency_comparison(sup, ss).re;
      },
      py::arg("supervised"), py::arg("infairness"));

  m.def(
      "simulate_dataset",
      [](int scenario, std::size_t n, std::size_t unlabeled, std::size_t train,
         std::uint64_t seed) {
        auto cfg = sim::ScenarioConfig::defaults(scenario);
        cfg.n = n;
        cfg.N = unlabeled;
        cfg.n_train = train;
        cfg.seed = seed;
        cfg.validate();
        Rng train_rng = Rng::derive(seed, 1, 0);
        const auto model =
            sim::train_score_model(sim::gen_population(cfg, train, train_rng));
        Rng rng = Rng::derive(seed, 2, 0);
        return sim::make_audit_dataset(cfg, model, n, unlabeled, rng);
      },
      py::arg("scenario"), py::arg("n") = 1000, py::arg("unlabeled") = 20000,
      py::arg("train") = 3000, py::arg("seed") = 1);

  m.def(
      "run_study_json",
      [](int scenario, int reps, std::size_t n, std::size_t unlabeled,
         std::uint64_t seed, std::size_t oracle_size, int threads) {
        auto cfg = sim::ScenarioConfig::defaults(scenario);
        cfg.replications = reps;
        cfg.n = n;
        cfg.N = unlabeled;
        cfg.seed = seed;
        cfg.oracle_size = oracle_size;
        cfg.threads = threads;
        cfg.validate();
        sim::SimulationSummary s;
        {
          py::gil_scoped_release release;
          s = sim::run_study(cfg, {sim::kAllStudyMethods.begin(),
                                   sim::kAllStudyMethods.end()});
        }
        return sim::summary_to_json(s);
      },
      py::arg("scenario"), py::arg("reps") = 500, py::arg("n") = 1000,
      py::arg("unlabeled") = 20000, py::arg("seed") = 1,
      py::arg("oracle_size") = 1'000'000, py::arg("threads") = 1);

  m.def(
      "audit_csv_json",
      [](const std::string& path, const std::string& outcome,
         const std::string& score, const std::string& group,
         const std::string& covariates, std::vector<std::string> methods,
         std::optional<int> order, std::optional<double> lam, int folds,
         std::uint64_t seed, double cutoff) {
        AuditConfig cfg;
        cfg.outcome_column = outcome;
        cfg.score_column = score;
        cfg.group_column = group;
        cfg.covariates = parse_covariates(covariates);
        cfg.methods.clear();
        for (const std::string& name : methods) {
          const auto method = parse_method(name);
          if (!method) throw InputError("unknown method '" + name + "'");
          cfg.methods.push_back(*method);
        }
        cfg.basis_order = order;
        cfg.lambda = lam;
        cfg.folds = folds;
        cfg.seed = seed;
        cfg.cutoff = cutoff;
        IngestResult in = ingest_csv(path, cfg);
        return report_to_json(run_audit(in.dataset, cfg, std::move(in.warnings)));
      },
      py::arg("path"), py::arg("outcome"), py::arg("score"), py::arg("group"),
      py::arg("covariates") = "",
      py::arg("methods") = std::vector<std::string>{"supervised", "infairness"},
      py::arg("order") = py::none(), py::arg("lam") = py::none(),
      py::arg("folds") = 10, py::arg("seed") = 0, py::arg("cutoff") = 0.5);
}
