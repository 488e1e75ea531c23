#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "xxz/analytic.hpp"
#include "xxz/entanglement.hpp"
#include "xxz/exact.hpp"
#include "xxz/factorization.hpp"
#include "xxz/sweep.hpp"

namespace py = pybind11;
using namespace xxz;

namespace {

int tm_from(double m) { return static_cast<int>(std::lround(2.0 * m)); }

SignAssignment signs_from(const SpinGraph& g, const std::vector<int>& nu) {
    if (nu.size() != g.edges().size())
        throw InvalidArgument("sign list length must equal the edge count");
    SignAssignment s;
    s.nu.reserve(nu.size());
    for (int v : nu) {
        if (v != 1 && v != -1) throw InvalidArgument("signs must be +1 or -1");
        s.nu.push_back(static_cast<std::int8_t>(v));
    }
    return s;
}

std::vector<int> signs_to(const SignAssignment& s) {
    return std::vector<int>(s.nu.begin(), s.nu.end());
}

FieldPattern pattern_from(const SpinGraph& g, const std::string& kind) {
    return FieldPattern::from_name(g, kind);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact ground-state factorization in finite XXZ spin arrays";

    py::register_exception<InfeasibleAnisotropy>(m, "InfeasibleAnisotropy", PyExc_ValueError);
    py::register_exception<LoopInconsistency>(m, "LoopInconsistency", PyExc_ValueError);
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    py::class_<SpinGraph>(m, "SpinGraph")
        .def_property_readonly("n", &SpinGraph::size)
        .def_property_readonly("edges",
                               [](const SpinGraph& g) {
                                   std::vector<std::tuple<int, int, double, double>> out;
                                   for (const Edge& e : g.edges())
                                       out.push_back({e.i, e.j, e.j_xy, e.j_z});
                                   return out;
                               })
        .def_property_readonly("spins",
                               [](const SpinGraph& g) {
                                   std::vector<double> out;
                                   for (const Site& s : g.sites()) out.push_back(s.spin());
                                   return out;
                               })
        .def_property_readonly("hilbert_dim", &SpinGraph::hilbert_dim)
        .def("__repr__", [](const SpinGraph& g) {
            return "<SpinGraph n=" + std::to_string(g.size()) + " edges=" +
                   std::to_string(g.edges().size()) + ">";
        });

    m.def("build_chain",
          [](int n, double spin, double j_xy, double j_z, bool cyclic) {
              return build_chain(n, twice_spin_from(spin), j_xy, j_z, cyclic);
          },
          py::arg("n"), py::arg("spin"), py::arg("j_xy"), py::arg("j_z"),
          py::arg("cyclic") = false);
    m.def("build_rectangular",
          [](int rows, int cols, double spin, double j_xy, double j_z) {
              return build_rectangular(rows, cols, twice_spin_from(spin), j_xy, j_z);
          },
          py::arg("rows"), py::arg("cols"), py::arg("spin"), py::arg("j_xy"), py::arg("j_z"));
    m.def("build_spin_star",
          [](int n, double spin, double j_xy, double j_z) {
              return build_spin_star(n, twice_spin_from(spin), j_xy, j_z);
          },
          py::arg("n"), py::arg("spin"), py::arg("j_xy"), py::arg("j_z"));

    m.def("eta_ratio", &eta_ratio, py::arg("delta"), py::arg("sign"));
    m.def("separable_energy", &separable_energy);
    m.def("factorizing_fields",
          [](const SpinGraph& g, const std::vector<int>& nu) {
              return factorizing_fields(g, signs_from(g, nu)).h;
          },
          py::arg("graph"), py::arg("signs"));
    m.def("propagate_angles",
          [](const SpinGraph& g, const std::vector<int>& nu, double seed_theta) {
              return propagate_angles(g, signs_from(g, nu), seed_theta).theta;
          },
          py::arg("graph"), py::arg("signs"), py::arg("seed_theta"));
    m.def("enumerate_sign_assignments",
          [](const SpinGraph& g, long limit) {
              std::vector<std::vector<int>> out;
              SignAssignmentStream stream(g);
              while (auto a = stream.next()) {
                  out.push_back(signs_to(*a));
                  if (limit >= 0 && static_cast<long>(out.size()) >= limit) break;
              }
              return out;
          },
          py::arg("graph"), py::arg("limit") = -1);
    // exact integers cross the boundary as python ints via their decimal form
    m.def("count_configurations",
          [](int rows, int cols) {
              return py::module_::import("builtins").attr("int")(
                  count_configurations(rows, cols).to_string());
          },
          py::arg("rows"), py::arg("cols"));
    m.def("terrace_map",
          [](const SpinGraph& g, const std::vector<int>& nu) {
              return terrace_map(g, signs_from(g, nu));
          },
          py::arg("graph"), py::arg("signs"));

    m.def("ground_scan",
          [](const SpinGraph& g, const std::vector<double>& fields, int k) {
              SolveOptions opts;
              opts.want_vectors = false;
              const SpectrumResult res = ground_scan(g, FieldConfig(fields), k, opts);
              py::dict out;
              out["ground_energy"] = res.extreme_energy;
              out["degeneracy"] = res.degeneracy;
              std::vector<double> ms;
              for (int tm : res.extreme_twice_m) ms.push_back(0.5 * tm);
              out["ground_m"] = ms;
              py::dict sectors;
              for (const auto& sec : res.sectors) {
                  py::dict sd;
                  sd["dim"] = sec.dim;
                  sd["values"] = sec.values;
                  sectors[py::cast(0.5 * sec.twice_m)] = sd;
              }
              out["sectors"] = sectors;
              return out;
          },
          py::arg("graph"), py::arg("fields"), py::arg("k") = 1);

    m.def("sector_ground_state",
          [](const SpinGraph& g, const std::vector<double>& fields, double m) {
              const SpectrumResult res =
                  SpectrumSolver(g).scan(FieldConfig(fields), 1);
              const auto& sec = res.sector(tm_from(m));
              return std::pair{sec.values[0], Eigen::VectorXd(sec.vectors.col(0))};
          },
          py::arg("graph"), py::arg("fields"), py::arg("m"));

    m.def("sector_dense_hamiltonian",
          [](const SpinGraph& g, const std::vector<double>& fields, double m) {
              return build_sector(g, FieldConfig(fields), tm_from(m)).dense();
          },
          py::arg("graph"), py::arg("fields"), py::arg("m"));

    m.def("projected_state",
          [](const SpinGraph& g, const std::vector<int>& nu, double m) {
              const ProjectedState ps = projected_state(g, signs_from(g, nu), tm_from(m));
              std::vector<std::vector<double>> basis;
              for (std::size_t q = 0; q < ps.basis->dim(); ++q) {
                  std::vector<double> tuple;
                  for (int i = 0; i < ps.basis->sites(); ++i)
                      tuple.push_back(0.5 * ps.basis->twice_m_at(q, i));
                  basis.push_back(tuple);
              }
              return std::pair{Eigen::VectorXd(ps.amplitudes), basis};
          },
          py::arg("graph"), py::arg("signs"), py::arg("m"));

    m.def("jacobi_q", &jacobi_q, py::arg("n"), py::arg("m"), py::arg("k"), py::arg("eta"));
    m.def("pair_projected_state",
          [](double spin, double delta, int sign, double m) {
              return Eigen::VectorXd(
                  pair_projected_state(twice_spin_from(spin), delta, sign, tm_from(m))
                      .amplitudes);
          },
          py::arg("spin"), py::arg("delta"), py::arg("sign"), py::arg("m"));

    m.def("reduced_pair_alternating",
          [](int n, double spin, double delta, const std::string& cls, double m) {
              PairClass c = cls == "oe" ? PairClass::odd_even
                            : cls == "oo" ? PairClass::odd_odd
                                          : PairClass::even_even;
              if (cls != "oe" && cls != "oo" && cls != "ee")
                  throw InvalidArgument("class must be oe, oo or ee");
              return Eigen::MatrixXd(
                  reduced_pair_alternating(n, twice_spin_from(spin), delta, c, tm_from(m))
                      .matrix);
          },
          py::arg("n"), py::arg("spin"), py::arg("delta"), py::arg("cls"), py::arg("m"));

    m.def("partial_trace",
          [](const SpinGraph& g, const std::vector<double>& fields, double m, int i, int j) {
              const SpectrumResult res = SpectrumSolver(g).scan(FieldConfig(fields), 1);
              const auto& sec = res.sector(tm_from(m));
              return Eigen::MatrixXd(
                  partial_trace(sec.vectors.col(0), *sec.basis, i, j).matrix);
          },
          py::arg("graph"), py::arg("fields"), py::arg("m"), py::arg("i"), py::arg("j"),
          "reduced pair state of the in-sector ground state");

    m.def("negativity_of",
          [](const Eigen::MatrixXd& rho, double si, double sj) {
              PairDensityMatrix p;
              p.twice_si = twice_spin_from(si);
              p.twice_sj = twice_spin_from(sj);
              p.matrix = rho;
              return negativity(p);
          },
          py::arg("rho"), py::arg("spin_i") = 0.5, py::arg("spin_j") = 0.5);
    m.def("concurrence_of",
          [](const Eigen::MatrixXd& rho) {
              PairDensityMatrix p;
              p.twice_si = p.twice_sj = 1;
              p.matrix = rho;
              return concurrence(p);
          },
          py::arg("rho"));

    m.def("boundary_h2",
          [](double spin, double j, double delta, int branch, double h1) {
              return boundary_hyperbola(twice_spin_from(spin), j, delta, branch).h2_of_h1(h1);
          },
          py::arg("spin"), py::arg("j"), py::arg("delta"), py::arg("branch"), py::arg("h1"));
    m.def("factorizing_crossing",
          [](double spin, double j, double delta) {
              return boundary_hyperbola(twice_spin_from(spin), j, delta, 1).crossing_field();
          },
          py::arg("spin"), py::arg("j"), py::arg("delta"), "2 h_s");

    m.def("w_state_package",
          [](int n, double spin, double j, double jz, double h1, double h2) {
              const WStatePackage pkg =
                  w_state_package(n, twice_spin_from(spin), j, jz, h1, h2);
              py::dict out;
              out["alpha"] = pkg.data.alpha;
              out["lambda"] = pkg.data.lambda;
              out["e_aligned"] = pkg.data.e_aligned;
              out["e_one_flip"] = pkg.data.e_one_flip;
              out["rho_oe"] = Eigen::MatrixXd(pkg.rho_oe.matrix);
              out["rho_oo"] = Eigen::MatrixXd(pkg.rho_oo.matrix);
              out["rho_ee"] = Eigen::MatrixXd(pkg.rho_ee.matrix);
              out["neg_oe"] = pkg.neg_oe;
              out["neg_oo"] = pkg.neg_oo;
              out["neg_ee"] = pkg.neg_ee;
              out["conc_oe"] = pkg.conc_oe;
              out["conc_oo"] = pkg.conc_oo;
              out["conc_ee"] = pkg.conc_ee;
              return out;
          },
          py::arg("n"), py::arg("spin"), py::arg("j"), py::arg("jz"), py::arg("h1"),
          py::arg("h2"));

    m.def("mean_field",
          [](double h_odd, double h_even, double spin, double j, double delta) {
              const MeanFieldResult r =
                  mean_field(h_odd, h_even, twice_spin_from(spin), j, delta);
              py::dict out;
              out["phase"] = r.phase == MeanFieldPhase::aligned ? "aligned"
                             : r.phase == MeanFieldPhase::symmetry_breaking
                                 ? "symmetry_breaking"
                                 : "antiferromagnetic";
              out["energy_per_cell"] = r.energy_per_cell;
              out["degenerate"] = r.degenerate;
              if (r.angles) out["angles"] = *r.angles;
              return out;
          },
          py::arg("h_odd"), py::arg("h_even"), py::arg("spin"), py::arg("j"),
          py::arg("delta"));

    m.def("scan_diagram",
          [](const SpinGraph& g, const std::string& pattern, double h_min, double h_max,
             double step, int workers) {
              GridSpec grid{h_min, h_max, h_min, h_max, step};
              ScanOptions opts;
              opts.workers = workers;
              const PhaseDiagram d = scan_diagram(g, pattern_from(g, pattern), grid, opts);
              std::vector<std::tuple<double, double, double, bool, double>> cells;
              for (const DiagramCell& c : d.cells)
                  cells.push_back({c.h1, c.h2, 0.5 * c.twice_m, c.boundary, c.energy});
              return cells;
          },
          py::arg("graph"), py::arg("pattern"), py::arg("h_min"), py::arg("h_max"),
          py::arg("step"), py::arg("workers") = 1);

    m.def("local_field_spectrum",
          [](const SpinGraph& g, const std::vector<double>& base, std::vector<int> sites,
             double theta, const std::vector<double>& strengths, int k) {
              std::vector<LocalFieldTarget> targets;
              for (int s : sites) targets.push_back({s, theta, 0.0});
              return local_parallel_field_spectrum(g, FieldConfig(base), targets, strengths,
                                                   k)
                  .energies;
          },
          py::arg("graph"), py::arg("base_fields"), py::arg("sites"), py::arg("theta"),
          py::arg("strengths"), py::arg("k") = 1);
}
