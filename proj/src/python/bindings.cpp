#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hatt/apps.hpp"
#include "hatt/errors.hpp"
#include "hatt/flop_model.hpp"
#include "hatt/random.hpp"
#include "hatt/recompress.hpp"

namespace py = pybind11;
using namespace hatt;

namespace {

using FArray = py::array_t<double, py::array::f_style | py::array::forcecast>;
using CArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

TTCore core_from_array(const FArray& a) {
  if (a.ndim() != 3) throw ShapeError("a TT core must be a 3-way array (r, n, r')");
  std::vector<double> values(a.data(), a.data() + a.size());
  return TTCore(a.shape(0), a.shape(1), a.shape(2), std::move(values));
}

py::array core_to_array(const TTCore& c) {
  FArray out({c.left_rank(), c.mode_size(), c.right_rank()});
  std::copy(c.data(), c.data() + c.numel(), out.mutable_data());
  return out;
}

TTTensor tt_from_arrays(const std::vector<FArray>& cores) {
  std::vector<TTCore> out;
  out.reserve(cores.size());
  for (const auto& c : cores) out.push_back(core_from_array(c));
  return TTTensor(std::move(out));
}

py::array dense_to_array(const DenseTensor& x) {
  std::vector<py::ssize_t> dims(x.shape().dims().begin(), x.shape().dims().end());
  CArray out(dims);
  std::copy(x.values().begin(), x.values().end(), out.mutable_data());
  return out;
}

DenseTensor dense_from_array(const CArray& a, const ResourceLimits& limits) {
  std::vector<Index> dims(a.shape(), a.shape() + a.ndim());
  return DenseTensor(Shape(dims), std::vector<double>(a.data(), a.data() + a.size()), limits);
}

std::vector<Index> chain(std::size_t d, Index inner) {
  std::vector<Index> c(d + 1, inner);
  c.front() = c.back() = 1;
  return c;
}

std::vector<Index> targets_arg(const py::object& t, std::size_t d) {
  if (py::isinstance<py::int_>(t)) return chain(d, t.cast<Index>());
  return t.cast<std::vector<Index>>();
}

ResourceLimits make_limits(std::optional<Index> dense_cap, std::optional<Index> core_cap) {
  ResourceLimits l;
  if (dense_cap) l.max_dense_elements = *dense_cap;
  if (core_cap) l.max_core_elements = *core_cap;
  return l;
}

HpcrlVariant make_variant(const std::string& variant, std::optional<Index> max_terms) {
  if (variant == "direct") {
    if (max_terms) throw UsageError("max_terms needs variant='svd'");
    return HpcrlVariant::direct();
  }
  if (variant == "svd") return HpcrlVariant::svd(max_terms);
  throw UsageError("variant must be 'svd' or 'direct'");
}

py::dict ledger_dict(const FlopLedger& f) {
  py::dict d;
  d["matmul"] = f.matmul_flops;
  d["qr"] = f.qr_flops;
  d["svd"] = f.svd_flops;
  d["measured"] = f.exact();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tensor-train recompression of Hadamard products";

  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<BoundsError>(m, "BoundsError", PyExc_IndexError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<TTTensor>(m, "TT")
      .def(py::init(&tt_from_arrays), py::arg("cores"),
           "Build from 3-way core arrays of shape (r_{k-1}, n_k, r_k).")
      .def_property_readonly("order", &TTTensor::order)
      .def_property_readonly("shape", [](const TTTensor& x) { return x.shape().dims(); })
      .def_property_readonly("ranks", &TTTensor::ranks)
      .def_property_readonly("max_rank", &TTTensor::max_rank)
      .def("core", [](const TTTensor& x, std::size_t k) { return core_to_array(x.core(k)); },
           py::arg("k"), "Core k (1-based) as an (r, n, r') array.")
      .def("cores",
           [](const TTTensor& x) {
             py::list out;
             for (const auto& c : x.cores()) out.append(core_to_array(c));
             return out;
           })
      .def("full",
           [](const TTTensor& x, std::optional<Index> dense_cap) {
             return dense_to_array(tt_to_dense(x, make_limits(dense_cap, std::nullopt)));
           },
           py::arg("dense_cap") = py::none())
      .def("norm", &tt_norm)
      .def("__repr__", [](const TTTensor& x) {
        std::string s = "TT(ranks=[";
        const auto r = x.ranks();
        for (std::size_t k = 0; k < r.size(); ++k) s += (k ? ", " : "") + std::to_string(r[k]);
        return s + "])";
      });

  m.def("random_tt",
        [](std::vector<Index> shape, std::vector<Index> ranks, std::uint64_t seed,
           const std::string& dist) {
          Distribution kind;
          if (dist == "gaussian") kind = Distribution::gaussian;
          else if (dist == "uniform") kind = Distribution::uniform;
          else throw UsageError("distribution must be 'gaussian' or 'uniform'");
          return random_tt(RandomSpec{Shape(std::move(shape)), std::move(ranks), kind, seed});
        },
        py::arg("shape"), py::arg("ranks"), py::arg("seed") = 0, py::arg("distribution") = "gaussian");

  m.def("hadamard",
        [](const TTTensor& y, const TTTensor& z, std::optional<Index> core_cap) {
          return tt_hadamard(y, z, make_limits(std::nullopt, core_cap));
        },
        py::arg("y"), py::arg("z"), py::arg("core_cap") = py::none(),
        "Exact Hadamard product; ranks multiply.");
  m.def("add", &tt_add, py::arg("y"), py::arg("z"));
  m.def("scale", &tt_scale, py::arg("y"), py::arg("c"));
  m.def("dot", &tt_dot, py::arg("y"), py::arg("z"));
  m.def("dot3", &tt_dot3, py::arg("x"), py::arg("y"), py::arg("z"));
  m.def("norm", &tt_norm, py::arg("y"));
  m.def("relative_error",
        [](const TTTensor& approx, const CArray& ref) {
          return relative_error(approx, dense_from_array(ref, ResourceLimits{}));
        },
        py::arg("approx"), py::arg("reference"));
  m.def("relative_error_tt",
        py::overload_cast<const TTTensor&, const TTTensor&>(&relative_error), py::arg("approx"),
        py::arg("reference"));

  m.def("recompress",
        [](const TTTensor& y, const TTTensor& z, const py::object& targets,
           const std::string& algorithm, std::uint64_t seed, const std::string& variant,
           std::optional<Index> max_terms, std::optional<Index> core_cap) {
          RecompressOptions o;
          o.algorithm = parse_algorithm(algorithm);
          o.seed = seed;
          o.svd_variant = make_variant(variant, max_terms);
          o.limits = make_limits(std::nullopt, core_cap);
          RecompressResult res =
              recompress_hadamard(y, z, targets_arg(targets, y.order()), o);
          py::dict report;
          report["algorithm"] = res.report.algorithm;
          report["seed"] = res.report.seed;
          report["output_ranks"] = res.report.output_ranks;
          report["wall_time_s"] = res.report.wall_time_s;
          report["flops"] = ledger_dict(res.report.flops_measured);
          report["flops_predicted"] = res.report.flops_predicted;
          return py::make_tuple(res.tensor, report);
        },
        py::arg("y"), py::arg("z"), py::arg("targets"), py::arg("algorithm") = "hatt-2",
        py::arg("seed") = 0, py::arg("variant") = "svd", py::arg("max_terms") = py::none(),
        py::arg("core_cap") = py::none(),
        "Recompress Y (.) Z to the target ranks; returns (tt, report).");

  m.def("tt_rounding",
        [](const TTTensor& a, const py::object& targets) {
          FlopLedger f;
          return tt_rounding(a, targets_arg(targets, a.order()), f);
        },
        py::arg("a"), py::arg("targets"));
  m.def("rand_orth",
        [](const TTTensor& a, const py::object& targets, std::uint64_t seed) {
          FlopLedger f;
          return rand_orth(a, targets_arg(targets, a.order()), seed, f);
        },
        py::arg("a"), py::arg("targets"), py::arg("seed") = 0);
  m.def("tt_svd",
        [](const CArray& x, double rel_tol) {
          FlopLedger f;
          return tt_svd(dense_from_array(x, ResourceLimits{}), rel_tol, f);
        },
        py::arg("x"), py::arg("rel_tol") = 1e-12);

  m.def("flop_model",
        [](const std::string& algorithm, Index d, Index n, Index r, Index s, Index ell,
           std::optional<double> terms) {
          return flop_model(algorithm, FlopModelParams{d, n, r, s, ell, terms});
        },
        py::arg("algorithm"), py::arg("d"), py::arg("n"), py::arg("r"), py::arg("s"),
        py::arg("ell"), py::arg("terms") = py::none());
  m.def("flop_model_names", [] {
    std::vector<std::string> out;
    for (auto n : flop_model_names()) out.emplace_back(n);
    return out;
  });

  m.def("hilbert_tt", &hilbert_tt, py::arg("d"), py::arg("n"), py::arg("r"));
  m.def("separable_tt",
        [](const std::string& kind, Index d, Index n) {
          return separable_tt(separable_spec(parse_separable_kind(kind), d, n));
        },
        py::arg("kind"), py::arg("d") = 4, py::arg("n") = 10);
  m.def("fourier_tt",
        [](std::vector<Index> shape, Index harmonics, std::uint64_t seed) {
          FourierSpec spec;
          spec.shape = Shape(std::move(shape));
          spec.harmonics = harmonics;
          FlopLedger f;
          FourierPair p = fourier_tt(spec, seed, f);
          return py::make_tuple(p.y, p.z);
        },
        py::arg("shape") = std::vector<Index>{8, 8, 8, 8, 8}, py::arg("harmonics") = 60,
        py::arg("seed") = 0);
  m.def("power_iteration_max",
        [](const TTTensor& y, Index rank, Index max_iterations, const std::string& algorithm,
           const std::string& scheme, std::uint64_t seed, double tol) {
          PowerIterOptions o;
          o.rank = rank;
          o.max_iterations = max_iterations;
          o.algorithm = parse_algorithm(algorithm);
          o.scheme = parse_power_scheme(scheme);
          o.seed = seed;
          o.tol = tol;
          PowerIterResult r = power_iteration_max(y, o);
          py::dict out;
          out["estimate"] = r.estimate;
          out["iterations"] = r.iterations_used;
          out["history"] = r.history;
          out["flops"] = ledger_dict(r.flops);
          out["wall_time_s"] = r.wall_time_s;
          return out;
        },
        py::arg("y"), py::arg("rank") = 5, py::arg("max_iterations") = 100,
        py::arg("algorithm") = "hatt-2", py::arg("scheme") = "linear", py::arg("seed") = 0,
        py::arg("tol") = 1e-12);
  m.def("save_tt", &save_tt, py::arg("path"), py::arg("x"));
  m.def("load_tt", &load_tt, py::arg("path"));
}
