#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "annokn/annogk_pipeline.hpp"
#include "annokn/annokn_pipeline.hpp"
#include "annokn/error.hpp"
#include "annokn/knockoff_filter.hpp"
#include "annokn/knockoff_gen.hpp"
#include "annokn/simulation.hpp"

namespace py = pybind11;
using namespace annokn;

namespace {

py::dict selection_dict(const SelectionResult& s) {
  py::dict d;
  d["threshold"] = s.threshold;
  d["q_values"] = s.q_values;
  d["selected"] = s.selected;
  d["fdp_estimate"] = s.fdp_estimate;
  d["q"] = s.q;
  return d;
}

py::dict result_dict(const PipelineResult& r) {
  py::dict d;
  d["beta"] = r.fit.beta;
  d["w"] = r.stats.w;
  d["selection"] = selection_dict(r.selection);
  d["lambda_anno"] = r.penalty.lambda_anno;
  d["phi"] = r.penalty.phi;
  d["lambda0"] = r.penalty.lambda0;
  d["lambda0_grid"] = r.lambda0_grid;
  d["tuning_scores"] = r.cv_errors;
  d["chosen_index"] = r.chosen_index;
  d["trace"] = r.trace;
  d["outer_iterations"] = r.outer_iterations;
  d["outer_converged"] = r.outer_converged;
  return d;
}

AnnotationMatrix annotations_or_empty(const std::optional<Matrix>& a, Eigen::Index p) {
  return a ? AnnotationMatrix::from_raw(*a) : AnnotationMatrix::empty(p);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Annotation-informed knockoff selection";

  py::register_exception<Error>(m, "AnnoknError", PyExc_RuntimeError);

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_readwrite("lambda0_grid", &PipelineConfig::lambda0_grid)
      .def_readwrite("grid_size", &PipelineConfig::grid_size)
      .def_readwrite("grid_min_ratio", &PipelineConfig::grid_min_ratio)
      .def_readwrite("cv_folds", &PipelineConfig::cv_folds)
      .def_readwrite("d", &PipelineConfig::d)
      .def_readwrite("tau2", &PipelineConfig::tau2)
      .def_readwrite("max_outer_iter", &PipelineConfig::max_outer_iter)
      .def_readwrite("outer_tol", &PipelineConfig::outer_tol)
      .def_readwrite("seed", &PipelineConfig::seed)
      .def_readwrite("q", &PipelineConfig::q)
      .def_readwrite("threads", &PipelineConfig::threads)
      .def_readwrite("frac_train", &PipelineConfig::frac_train)
      .def_readwrite("pseudo_splits", &PipelineConfig::pseudo_splits);

  m.def("standardize", [](const Matrix& raw) { return standardize(raw).values(); }, py::arg("raw"),
        "Columns centered and scaled to unit (n-1) standard deviation.");

  m.def("solve_d_equicorrelated", &solve_d_equicorrelated, py::arg("sigma"), py::arg("m") = 1);
  m.def("build_sigma_m", &build_sigma_m, py::arg("sigma"), py::arg("s"), py::arg("m") = 1);
  m.def(
      "sample_knockoffs",
      [](const Matrix& x, const Matrix& sigma, std::uint64_t seed) {
        return sample_knockoffs(standardize(x), KnockoffModel::equicorrelated(sigma), seed).values();
      },
      py::arg("x"), py::arg("sigma"), py::arg("seed"), "Equicorrelated Gaussian knockoffs of standardized x.");
  m.def(
      "sample_knockoff_zscores",
      [](const Vector& z, const Matrix& sigma, std::uint64_t seed) {
        return sample_knockoff_zscores(z, KnockoffModel::equicorrelated(sigma), seed);
      },
      py::arg("z"), py::arg("sigma"), py::arg("seed"), "Returns (z, z_knockoff) stacked.");

  m.def(
      "solve_lasso",
      [](const Matrix& gram, const Vector& linear, const Vector& phi, double lambda0) {
        const FitResult fit = solve_lasso(LassoProblem(gram, linear, phi.size()), phi, lambda0);
        return py::make_tuple(fit.beta, fit.objective, fit.converged);
      },
      py::arg("gram"), py::arg("linear"), py::arg("phi"), py::arg("lambda0"),
      "Minimizes 1/2 b'Gb - b'c + lambda0 sum phi |b|; returns (beta, objective, converged).");

  m.def("lcd_stats", [](const Vector& beta, Eigen::Index p) { return lcd_stats(beta, p).w; }, py::arg("beta"),
        py::arg("p"));
  m.def(
      "knockoff_threshold", [](const Vector& w, double q) { return selection_dict(knockoff_threshold(w, q)); },
      py::arg("w"), py::arg("q"));

  m.def(
      "annokn_fit",
      [](const Vector& y, const Matrix& x, const Matrix& x_knock, const std::optional<Matrix>& a,
         const PipelineConfig& config, bool lite) {
        const AnnotationMatrix anno = annotations_or_empty(a, x.cols());
        py::gil_scoped_release release;
        const PipelineResult r = lite ? annokn_lite_fit(y, x, x_knock, anno, config)
                                      : annokn_fit(y, x, x_knock, anno, config);
        py::gil_scoped_acquire acquire;
        return result_dict(r);
      },
      py::arg("y"), py::arg("x"), py::arg("x_knock"), py::arg("annotations") = py::none(),
      py::arg("config") = PipelineConfig{}, py::arg("lite") = false,
      "Individual-level fit. x, x_knock and y should be standardized.");

  m.def(
      "annogk_fit",
      [](const Vector& z, const Matrix& ld, double n, const std::optional<Matrix>& a, const PipelineConfig& config,
         double shrinkage) {
        SummaryStats stats;
        stats.z = z;
        stats.n = n;
        for (Eigen::Index j = 0; j < z.size(); ++j) stats.snp_ids.push_back("snp" + std::to_string(j + 1));
        const AnnotationMatrix anno = annotations_or_empty(a, z.size());
        const LdMatrix sigma = LdMatrix::from_correlation(ld, shrinkage);
        py::gil_scoped_release release;
        const PipelineResult r = annogk_fit(stats, sigma, anno, config);
        py::gil_scoped_acquire acquire;
        return result_dict(r);
      },
      py::arg("z"), py::arg("ld"), py::arg("n"), py::arg("annotations") = py::none(),
      py::arg("config") = PipelineConfig{}, py::arg("shrinkage") = 0.0, "Summary-statistics fit.");

  m.def(
      "make_pseudo_split",
      [](const Vector& zm, const Matrix& sigma_m, double n, double frac_train, std::uint64_t seed) {
        const PseudoSplit s = make_pseudo_split(zm, sigma_m, n, frac_train, seed);
        return py::make_tuple(s.z_train, s.z_valid, s.n_train, s.n_valid);
      },
      py::arg("zm"), py::arg("sigma_m"), py::arg("n"), py::arg("frac_train"), py::arg("seed"));

  m.def(
      "simulate_ar1",
      [](int n, int p, double rho, int n_causal, int causal_pool, double exponent, double h2, std::uint64_t seed) {
        SimScenario s;
        s.n = n;
        s.p = p;
        s.rho = rho;
        s.n_causal = n_causal;
        s.causal_pool = causal_pool;
        s.causal_prob_exponent = exponent;
        s.h2 = h2;
        const SimDataset d = generate_ar1(s, seed);
        return py::make_tuple(d.x.values(), d.y, d.support, d.annotations.values());
      },
      py::arg("n"), py::arg("p"), py::arg("rho"), py::arg("n_causal"), py::arg("causal_pool"),
      py::arg("causal_prob_exponent"), py::arg("h2"), py::arg("seed"),
      "Returns (x, y, support, index_annotation).");
}
