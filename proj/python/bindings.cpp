#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "zecmac/cli.hpp"
#include "zecmac/errors.hpp"
#include "zecmac/estimator.hpp"
#include "zecmac/io.hpp"
#include "zecmac/rates.hpp"
#include "zecmac/zec.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace zecmac;
using io::Json;

namespace {

std::string info(const std::string& joint, const uv::VarList& x, const uv::VarList& y, const uv::VarList& given) {
  const auto j = io::joint_from_json(io::parse_json(joint, "joint"));
  return cli::info_report(j, x, y, given).dump();
}

std::string region(const std::string& mac, std::size_t n, const std::string& method, std::uint64_t cap_u,
                   std::uint64_t cap_wmax, std::size_t limit_n) {
  const auto m = io::mac_from_json(io::parse_json(mac, "mac"));
  if (method != "thm1" && method != "bruteforce") throw ConfigError("method must be thm1 or bruteforce");
  zec::Caps caps;
  caps.cap_u = cap_u ? cap_u : cap_wmax;
  caps.cap_wmax = cap_wmax;
  caps.limit_n = limit_n;
  if (n > limit_n) throw CapError("n exceeds limit_n");
  zec::Region r;
  {
    py::gil_scoped_release release;
    r = method == "thm1" ? zec::enumerate_region_thm1(m, n, caps) : zec::enumerate_region_bruteforce(m, n, caps);
  }
  Json out = io::codes_json(r);
  Json pts = Json::array();
  for (const auto& p : r.points) pts.push_back(io::point_json(p));
  out["points"] = pts;
  out["hull"] = io::hull_json(r.hull)["vertices"];
  out["warnings"] = r.warnings;
  return out.dump();
}

py::dict feasibility(const std::vector<double>& h, const std::string& points) {
  const auto j = io::parse_json(points, "points");
  std::vector<rates::RatePoint> pts;
  for (const auto& p : j) pts.push_back(io::point_from_json(p));
  const auto hull = rates::convex_hull(rates::maximal_points(pts));
  const auto f = rates::feasibility_check(rates::to_rational(h), hull);
  py::dict d;
  d["verdict"] = rates::to_string(f.verdict);
  d["margin"] = f.margin;
  d["certified"] = f.certified;
  return d;
}

bool zero_error(const std::string& code, const std::string& mac) {
  return zec::is_zero_error(io::code_from_json(io::parse_json(code, "code")),
                            io::mac_from_json(io::parse_json(mac, "mac")));
}

py::tuple run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = cli::run(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Zero-error MAC codes, rate regions and distributed state estimation";

  // later registrations are tried first, so the base goes in first
  auto& base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<CapError>(m, "CapError", base.ptr());

  m.def("info", &info, "Overlap partition report of a JointRange (JSON in, JSON out)", py::arg("joint"),
        py::arg("x"), py::arg("y"), py::arg("given") = uv::VarList{});
  m.def("region", &region, "Maximal rate points, hull and codes of a MacSpec at blocklength n", py::arg("mac"),
        py::arg("n") = 1, py::arg("method") = "thm1", py::arg("cap_u") = 0, py::arg("cap_wmax") = 4,
        py::arg("limit_n") = 4);
  m.def("feasibility", &feasibility, "Classify an entropy triple against the hull of rate points", py::arg("h"),
        py::arg("points"));
  m.def("is_zero_error", &zero_error, py::arg("code"), py::arg("mac"));
  m.def("topological_entropy", &est::topological_entropy, py::arg("A"));
  m.def("run", &run, "Run the command-line tool, returning (exit code, stdout, stderr)", py::arg("args"));

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
