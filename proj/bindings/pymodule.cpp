// Python bindings for the core operations: parsing, structural analysis,
// mass-action systems, stability, Hopf machinery, scans, integration and
// the cycle/permanence probes.
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "crnosc/dynamics.hpp"
#include "crnosc/hopf.hpp"
#include "crnosc/netdsl.hpp"

namespace py = pybind11;
using namespace crn;

namespace {

ModelId model_id(const std::string& name) {
  auto id = model_from_string(name);
  if (!id) throw py::value_error("unknown model id '" + name + "'");
  return *id;
}

py::dict structure_dict(const StructureReport& rep) {
  py::dict d;
  d["num_species"] = rep.num_species;
  d["num_reactions"] = rep.num_reactions;
  d["num_complexes"] = rep.num_complexes;
  d["num_linkage_classes"] = rep.num_linkage_classes;
  d["rank"] = rep.rank;
  d["deficiency"] = rep.deficiency;
  d["reversible"] = rep.reversible;
  d["strongly_connected"] = rep.strongly_connected;
  d["bimolecular"] = rep.bimolecular;
  d["mass_conserving"] = rep.mass_conserving;
  if (rep.conservation) {
    py::list dv;
    for (auto& r : *rep.conservation) dv.append(r.to_double());
    d["conservation_vector"] = dv;
  } else {
    d["conservation_vector"] = py::none();
  }
  py::list flags;
  for (auto f : rep.flags) flags.append(to_string(f));
  d["flags"] = flags;
  d["lint"] = rep.lint;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "oscillation analysis for bimolecular mass-action reaction networks";

  py::class_<ReactionNetwork>(m, "ReactionNetwork")
      .def_readonly("name", &ReactionNetwork::name)
      .def_readonly("species", &ReactionNetwork::species)
      .def_property_readonly("num_species", &ReactionNetwork::num_species)
      .def_property_readonly("num_complexes", &ReactionNetwork::num_complexes)
      .def_property_readonly("num_reactions", &ReactionNetwork::num_reactions)
      .def("__repr__", [](const ReactionNetwork& n) {
        return "<ReactionNetwork " + (n.name.empty() ? std::string("?") : n.name) + ": " +
               std::to_string(n.num_species()) + " species, " +
               std::to_string(n.num_reactions()) + " reactions>";
      });

  m.def(
      "parse_network",
      [](const std::string& text, const std::string& name) {
        auto result = parse_network({text, name});
        if (!result.ok()) {
          std::string msg;
          for (auto& d : result.diagnostics) msg += d.format(name) + "\n";
          throw py::value_error(msg);
        }
        return *result.network;
      },
      py::arg("text"), py::arg("name") = "<input>");
  m.def("render_network", &render_network);
  m.def("stoichiometric_matrix",
        [](const ReactionNetwork& net) { return stoichiometric_matrix(net); });
  m.def("deficiency", &deficiency);
  m.def("structural_report",
        [](const ReactionNetwork& net) { return structure_dict(structural_report(net)); });

  py::class_<MassActionSystem>(m, "MassActionSystem")
      .def(py::init([](const ReactionNetwork& net, const std::map<std::string, double>& rates) {
             return MassActionSystem(net, RateAssignment{rates});
           }),
           py::arg("network"), py::arg("rates"))
      .def_property_readonly("network", &MassActionSystem::network)
      .def_property_readonly("dim", &MassActionSystem::dim)
      .def("rhs", &MassActionSystem::rhs)
      .def("jacobian", &MassActionSystem::jacobian)
      .def("relative_residual", &MassActionSystem::relative_residual);

  py::class_<ModelInstance>(m, "ModelInstance")
      .def_property_readonly("id", [](const ModelInstance& mi) { return to_string(mi.id); })
      .def_readonly("params", &ModelInstance::params)
      .def_property_readonly("system",
                             [](const ModelInstance& mi) -> const MassActionSystem& {
                               return mi.system;
                             },
                             py::return_value_policy::reference_internal);

  m.def(
      "builtin_model",
      [](const std::string& id, const std::map<std::string, double>& params) {
        return builtin_model(model_id(id), params);
      },
      py::arg("id"), py::arg("params") = std::map<std::string, double>{});
  m.def("builtin_source", [](const std::string& id) { return builtin_source(model_id(id)); });
  m.def("builtin_network", [](const std::string& id) { return builtin_network(model_id(id)); });
  m.def("w_params_from_pqr", &w_params_from_pqr, py::arg("p"), py::arg("q"), py::arg("r"));
  m.def("closed_form_equilibrium", &closed_form_equilibrium, py::arg("model"),
        py::arg("t") = 1.0);
  m.def(
      "find_equilibrium",
      [](const MassActionSystem& sys, const Eigen::VectorXd& anchor) {
        auto res = find_equilibrium(sys, anchor);
        return py::make_tuple(res.ok(), res.point, res.residual, res.iterations);
      },
      py::arg("system"), py::arg("anchor"));
  m.def("detailed_balance_check", [](const MassActionSystem& sys) {
    auto res = detailed_balance_check(sys);
    py::dict d;
    d["balanced"] = res.balanced;
    d["witness"] = res.witness;
    d["residual"] = res.residual;
    d["notes"] = res.notes;
    return d;
  });

  py::class_<StabilityReport>(m, "StabilityReport")
      .def_readonly("reduced_jacobian", &StabilityReport::reduced_jacobian)
      .def_property_readonly("cubic",
                             [](const StabilityReport& r) {
                               return py::make_tuple(r.cubic.a2, r.cubic.a1, r.cubic.a0);
                             })
      .def_property_readonly("eigenvalues",
                             [](const StabilityReport& r) {
                               py::list out;
                               for (auto& z : r.eigenvalues) out.append(z);
                               return out;
                             })
      .def_property_readonly("classification",
                             [](const StabilityReport& r) { return to_string(r.classification); })
      .def_property_readonly("hopf", [](const StabilityReport& r) -> py::object {
        if (!r.hopf) return py::none();
        return py::make_tuple(r.hopf->first, r.hopf->second);
      });
  m.def("classify_equilibrium",
        [](const MassActionSystem& sys, const Eigen::VectorXd& x) {
          return classify_equilibrium(sys, x);
        });

  py::class_<CanonicalFrame>(m, "CanonicalFrame")
      .def_readonly("T", &CanonicalFrame::T)
      .def_readonly("omega", &CanonicalFrame::omega)
      .def_readonly("rho", &CanonicalFrame::rho)
      .def("conjugation_defect", &CanonicalFrame::conjugation_defect);
  m.def("canonical_transform",
        [](const Eigen::Matrix3d& j) { return canonical_transform(j); });
  m.def("closed_form_frame",
        [](const ModelInstance& mi, double t) -> py::object {
          auto f = closed_form_frame(mi, t);
          if (!f) return py::none();
          return py::cast(*f);
        },
        py::arg("model"), py::arg("t") = 1.0);

  m.def("focal_value_at", [](const ModelInstance& mi, const Eigen::VectorXd& eq) {
    return focal_value_at(mi, eq).L1;
  });
  m.def("focal_value_with_frame",
        [](const MassActionSystem& sys, const Eigen::VectorXd& eq, const CanonicalFrame& f) {
          return focal_value_with_frame(sys, eq, f).L1;
        });
  m.def("center_manifold_quadratic", [](double omega, double rho, double h200, double h110,
                                        double h020) {
    auto c = center_manifold_quadratic(omega, rho, h200, h110, h020);
    return py::make_tuple(c.c20, c.c11, c.c02);
  });
  m.def(
      "hopf_locus_eval",
      [](const std::string& id, const std::map<std::string, double>& params) {
        return hopf_locus_eval(model_id(id), params);
      },
      py::arg("id"), py::arg("params"));
  m.def("whh_locus_roots", &whh_locus_roots, py::arg("p"), py::arg("q"), py::arg("r"),
        py::arg("s"));
  m.def("hopf_root_count", &hopf_root_count, py::arg("p"), py::arg("q"), py::arg("r"),
        py::arg("s"));
  m.def(
      "closed_form_L1",
      [](const std::string& id, const std::map<std::string, double>& params) {
        return closed_form_L1(model_id(id), params);
      },
      py::arg("id"), py::arg("params"));

  m.def(
      "hopf_scan",
      [](const std::string& id, const std::map<std::string, double>& fixed,
         const std::string& name1, double lo1, double hi1, const std::string& name2,
         double lo2, double hi2, int res) {
        HopfScanResult scan = hopf_scan(model_id(id), fixed, {name1, lo1, hi1, res},
                                        {name2, lo2, hi2, res});
        py::list grid, boundary, degenerate;
        for (auto& g : scan.grid)
          grid.append(py::make_tuple(g.p1, g.p2, to_string(g.cls), g.hval));
        for (auto& b : scan.boundary)
          boundary.append(py::make_tuple(b.p1, b.p2, b.hval, b.L1));
        for (auto& [a, b] : scan.degenerate_points) degenerate.append(py::make_tuple(a, b));
        py::dict out;
        out["grid"] = grid;
        out["boundary"] = boundary;
        out["degenerate_points"] = degenerate;
        return out;
      },
      py::arg("id"), py::arg("fixed"), py::arg("name1"), py::arg("lo1"), py::arg("hi1"),
      py::arg("name2"), py::arg("lo2"), py::arg("hi2"), py::arg("res") = 50);

  m.def(
      "integrate",
      [](const MassActionSystem& sys, const Eigen::VectorXd& x0, double t_end,
         double abs_tol, double rel_tol, int samples) {
        IntegratorOptions opts;
        opts.abs_tol = abs_tol;
        opts.rel_tol = rel_tol;
        Trajectory traj = samples > 0 ? integrate_sampled(sys, x0, t_end, samples, opts)
                                      : integrate(sys, x0, t_end, opts);
        Eigen::MatrixXd states(traj.states.size(), sys.dim());
        Eigen::VectorXd times(traj.times.size());
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
          times[static_cast<int>(i)] = traj.times[i];
          states.row(static_cast<int>(i)) = traj.states[i].transpose();
        }
        return py::make_tuple(times, states);
      },
      py::arg("system"), py::arg("x0"), py::arg("t_end"), py::arg("abs_tol") = 1e-9,
      py::arg("rel_tol") = 1e-9, py::arg("samples") = 0);

  py::class_<SectionSpec>(m, "SectionSpec")
      .def_readonly("anchor", &SectionSpec::anchor)
      .def_readonly("normal", &SectionSpec::normal)
      .def_readonly("direction", &SectionSpec::direction);
  m.def("default_section",
        [](const MassActionSystem& sys, const Eigen::VectorXd& eq) {
          return default_section(sys, eq);
        });

  py::class_<LimitCycleReport>(m, "LimitCycleReport")
      .def_property_readonly("outcome",
                             [](const LimitCycleReport& r) {
                               switch (r.outcome) {
                                 case CycleOutcome::Cycle: return "cycle";
                                 case CycleOutcome::EquilibriumCapture: return "equilibrium";
                                 default: return "inconclusive";
                               }
                             })
      .def_readonly("period", &LimitCycleReport::period)
      .def_readonly("section_fixed_point", &LimitCycleReport::section_fixed_point)
      .def_readonly("multipliers", &LimitCycleReport::multipliers)
      .def_readonly("spectral_radius", &LimitCycleReport::spectral_radius)
      .def_property_readonly("stability",
                             [](const LimitCycleReport& r) {
                               switch (r.stability) {
                                 case CycleStability::Stable: return "stable";
                                 case CycleStability::Unstable: return "unstable";
                                 default: return "inconclusive";
                               }
                             })
      .def_readonly("residual", &LimitCycleReport::residual)
      .def_readonly("note", &LimitCycleReport::note)
      .def_property_readonly("cycle_points", [](const LimitCycleReport& r) {
        Eigen::MatrixXd pts(r.cycle_points.size(),
                            r.cycle_points.empty() ? 0 : r.cycle_points.front().size());
        for (std::size_t i = 0; i < r.cycle_points.size(); ++i)
          pts.row(static_cast<int>(i)) = r.cycle_points[i].transpose();
        return pts;
      });
  m.def("find_limit_cycle",
        [](const MassActionSystem& sys, const Eigen::VectorXd& seed, const SectionSpec& sec) {
          return find_limit_cycle(sys, seed, sec);
        });
  m.def("refine_cycle_newton",
        [](const MassActionSystem& sys, const SectionSpec& sec, const Eigen::VectorXd& guess,
           double period_guess) {
          return refine_cycle_newton(sys, sec, guess, period_guess);
        });

  py::class_<BistabilityReport>(m, "BistabilityReport")
      .def_readonly("radii", &BistabilityReport::radii)
      .def_property_readonly("fates",
                             [](const BistabilityReport& r) {
                               std::vector<std::string> out;
                               for (auto f : r.fates) out.push_back(to_string(f));
                               return out;
                             })
      .def_property_readonly("inner_fate",
                             [](const BistabilityReport& r) { return to_string(r.inner_fate); })
      .def_property_readonly("outer_fate",
                             [](const BistabilityReport& r) { return to_string(r.outer_fate); })
      .def_readonly("separatrix_evidence", &BistabilityReport::separatrix_evidence)
      .def_property_readonly("stable_cycle",
                             [](const BistabilityReport& r) -> py::object {
                               if (!r.stable_cycle) return py::none();
                               return py::cast(*r.stable_cycle);
                             })
      .def_property_readonly("unstable_cycle", [](const BistabilityReport& r) -> py::object {
        if (!r.unstable_cycle) return py::none();
        return py::cast(*r.unstable_cycle);
      });
  m.def("bistability_probe",
        [](const MassActionSystem& sys, const Eigen::VectorXd& eq) {
          return bistability_probe(sys, eq);
        });

  m.def(
      "permanence_probe",
      [](const MassActionSystem& sys, const Eigen::VectorXd& anchor, int num_samples,
         double t_transient, double t_window, std::uint64_t seed) {
        auto rep = permanence_probe(sys, anchor, num_samples, t_transient, t_window, seed);
        return py::make_tuple(rep.floor, rep.floors, rep.seed);
      },
      py::arg("system"), py::arg("anchor"), py::arg("num_samples") = 20,
      py::arg("t_transient") = 500.0, py::arg("t_window") = 500.0, py::arg("seed") = 0);
}
