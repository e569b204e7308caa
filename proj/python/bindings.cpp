#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "seqrecon/config.hpp"
#include "seqrecon/study.hpp"

namespace py = pybind11;
using namespace seqrecon;

namespace {

RunConfig config_from(const std::string& json_text) {
  return json_text.empty() ? RunConfig{} : parse_config(json_text);
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["converged"] = r.converged;
  d["iterations"] = r.iterations;
  d["objective"] = r.objective;
  d["final_rho"] = r.final_rho;
  d["warnings"] = r.warnings;
  std::vector<double> obj, primal, dual;
  for (const auto& h : r.history) {
    obj.push_back(h.objective);
    primal.push_back(h.primal);
    dual.push_back(h.dual);
  }
  d["objective_history"] = obj;
  d["primal_history"] = primal;
  d["dual_history"] = dual;
  return d;
}

AdmmParams admm(int max_iter) {
  AdmmParams p;
  p.max_iter = max_iter;
  return p;
}

WeightMask weights_from_image(const RealImage& w) {
  WeightMask m;
  m.w = vectorize(w);
  m.edge_count = (m.w.array() < 1.0).count();
  return m;
}

}  // namespace

PYBIND11_MODULE(_seqrecon, m) {
  m.doc() = "Joint reconstruction of image sequences from band-limited Fourier data";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<int, int>(), py::arg("N"), py::arg("J") = 1)
      .def_readonly("N", &GridSpec::half_bandwidth)
      .def_readonly("J", &GridSpec::frames)
      .def_property_readonly("side", &GridSpec::side)
      .def("__repr__", [](const GridSpec& g) {
        return "GridSpec(N=" + std::to_string(g.half_bandwidth) + ", J=" + std::to_string(g.frames) + ")";
      });

  py::class_<FourierFrame>(m, "FourierFrame")
      .def_readonly("grid", &FourierFrame::grid)
      .def_readonly("coeffs", &FourierFrame::coeffs, "centered coefficients, entry (k+N, l+N)")
      .def_readonly("available", &FourierFrame::available)
      .def_readonly("index", &FourierFrame::index)
      .def_readonly("noise_sigma", &FourierFrame::noise_sigma);

  m.def(
      "simulate",
      [](const std::string& config) {
        const RunConfig cfg = config_from(config);
        return acquire(cfg.scene, cfg.simulation);
      },
      py::arg("config") = "", "Noisy, band-deficient frames of the configured scene (JSON text).");

  m.def(
      "truth",
      [](const std::string& config) {
        const RunConfig cfg = config_from(config);
        std::vector<RealImage> out;
        for (int t = 1; t <= cfg.scene.frames; ++t) out.push_back(rasterize(cfg.scene, t, cfg.grid).values);
        return out;
      },
      py::arg("config") = "", "Ground-truth images of the configured scene.");

  m.def(
      "frame_from_image",
      [](const RealImage& image, const Mask& mask, int index) {
        if (image.rows() != image.cols() || image.rows() % 2 == 0)
          throw Error("frame_from_image: image must be square with odd side");
        const GridSpec g(static_cast<int>(image.rows() / 2));
        return forward(ImageGrid(g, image), mask, index);
      },
      py::arg("image"), py::arg("mask"), py::arg("index") = 1,
      "DFT of a (2N+1)x(2N+1) image restricted to the available mask.");

  py::class_<EdgeMap>(m, "EdgeMap")
      .def_readonly("angles", &EdgeMap::angles)
      .def_readonly("per_rotation", &EdgeMap::per_rotation)
      .def_readonly("signed_average", &EdgeMap::signed_average)
      .def_readonly("averaged", &EdgeMap::averaged);

  m.def(
      "edge_map",
      [](const FourierFrame& f, int rotations, double epsilon_pixels, const std::string& factor) {
        std::optional<ConcentrationFactor> cf;
        if (factor != "gaussian") cf = ConcentrationFactor::parse(factor);
        return edge_map(f, rotations, EdgeRegularizer::for_grid(f.grid, epsilon_pixels), cf);
      },
      py::arg("frame"), py::arg("rotations") = 10, py::arg("epsilon_pixels") = 3.0,
      py::arg("factor") = "gaussian");

  m.def(
      "concentration_sum_1d",
      [](const std::vector<std::complex<double>>& fhat, const std::string& factor,
         const std::vector<double>& x) {
        return concentration_sum_1d(fhat, ConcentrationFactor::parse(factor), x);
      },
      py::arg("fhat"), py::arg("factor"), py::arg("x"));

  m.def(
      "weights",
      [](const EdgeMap& e, std::optional<double> tau) {
        const int side = static_cast<int>(e.averaged.rows());
        const double t = tau ? *tau : default_weight_threshold(GridSpec(side / 2));
        return unvectorize(weights_from_edges(e, t).w, side, side);
      },
      py::arg("edges"), py::arg("tau") = py::none(), "Per-pixel l1 weights as an image.");

  m.def(
      "change_masks",
      [](const std::vector<EdgeMap>& edges, int d, double tau_diff) {
        PipelineOptions opt;
        opt.change.d = d;
        opt.change.tau_diff = tau_diff;
        std::vector<Mask> out;
        for (const auto& p : detect_changes(edges, opt).pairs) out.push_back(p.C);
        return out;
      },
      py::arg("edges"), py::arg("d") = 3, py::arg("tau_diff") = 1e-3,
      "One mask per consecutive pair, 1 where the frames are coupled.");

  m.def("diff_measure", [](const Mask& a, const Mask& b) { return diff_measure(a, b); });

  m.def(
      "solve_l1",
      [](const FourierFrame& f, double mu, int max_iter) {
        auto r = solve_l1(f, mu, admm(max_iter));
        return py::make_tuple(r.image.values, report_dict(r.report));
      },
      py::arg("frame"), py::arg("mu"), py::arg("max_iter") = 500);

  m.def(
      "solve_vbjs",
      [](const FourierFrame& f, const RealImage& w, int max_iter) {
        auto r = solve_vbjs(f, weights_from_image(w), admm(max_iter));
        return py::make_tuple(r.image.values, report_dict(r.report));
      },
      py::arg("frame"), py::arg("weights"), py::arg("max_iter") = 500);

  m.def(
      "solve_joint",
      [](const std::vector<FourierFrame>& frames, const std::vector<RealImage>& weights,
         const std::vector<Mask>& masks, double beta, int max_iter) {
        std::vector<WeightMask> w;
        for (const auto& x : weights) w.push_back(weights_from_image(x));
        const Eigen::Index pixels = frames.empty() ? 0 : frames.front().grid.pixels();
        JointProblem jp{frames, w, CouplingOperator(masks, pixels), beta};
        auto r = solve_joint(jp, admm(max_iter));
        std::vector<RealImage> images;
        for (auto& im : r.images) images.push_back(std::move(im.values));
        return py::make_tuple(images, report_dict(r.report));
      },
      py::arg("frames"), py::arg("weights"), py::arg("masks"), py::arg("beta") = 0.5,
      py::arg("max_iter") = 500);

  m.def(
      "mse_log",
      [](const RealImage& truth, const RealImage& approx, std::optional<Mask> mask) {
        if (truth.rows() != truth.cols() || truth.rows() % 2 == 0)
          throw Error("mse_log: images must be square with odd side");
        const GridSpec g(static_cast<int>(truth.rows() / 2));
        const RegionSelector region = mask ? RegionSelector::occluded(*mask) : RegionSelector::whole();
        return mse_log(ImageGrid(g, truth), ImageGrid(g, approx), region).value;
      },
      py::arg("truth"), py::arg("approx"), py::arg("mask") = py::none(),
      "log10 of the mean squared error, over the mask when given.");

  m.def(
      "run_pipeline",
      [](const std::string& config) {
        const RunConfig cfg = config_from(config);
        py::gil_scoped_release release;
        auto frames = acquire(cfg.scene, cfg.simulation);
        auto run = run_joint(frames, cfg.pipeline);
        py::gil_scoped_acquire acquire;
        std::vector<RealImage> images;
        for (auto& im : run.run.images) images.push_back(std::move(im.values));
        return py::make_tuple(images, report_dict(run.run.reports.front()));
      },
      py::arg("config") = "", "Simulate the configured scene and reconstruct it jointly.");

  m.def("config_hash", [](const std::string& text) { return config_hash(text); });
}
