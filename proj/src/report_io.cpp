#include "crnosc/report_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crn {

namespace {

using json = nlohmann::ordered_json;

// Shortest-round-trip formatting keeps CSV output byte-stable.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = std::strtod(buf, nullptr);
  if (back == v) {
    for (int prec = 1; prec < 17; ++prec) {
      char shorter[32];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
      if (std::strtod(shorter, nullptr) == v) return shorter;
    }
  }
  return buf;
}

json complex_json(const std::complex<double>& z) {
  return json::array({z.real(), z.imag()});
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

template <typename Mat>
json matrix_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

json to_json(const StructureReport& rep) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["num_species"] = rep.num_species;
  j["num_reactions"] = rep.num_reactions;
  j["num_complexes"] = rep.num_complexes;
  j["num_linkage_classes"] = rep.num_linkage_classes;
  j["rank"] = rep.rank;
  j["deficiency"] = rep.deficiency;
  j["reversible"] = rep.reversible;
  j["strongly_connected"] = rep.strongly_connected;
  j["bimolecular"] = rep.bimolecular;
  j["mass_conserving"] = rep.mass_conserving;
  if (rep.conservation) {
    json d = json::array();
    for (auto& r : *rep.conservation) d.push_back(r.str());
    j["conservation_vector"] = d;
  } else {
    j["conservation_vector"] = nullptr;
  }
  json flags = json::array();
  for (auto f : rep.flags) flags.push_back(to_string(f));
  j["flags"] = flags;
  j["lint"] = rep.lint;
  return j;
}

json to_json(const StabilityReport& rep) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["reduced_jacobian"] = matrix_json(rep.reduced_jacobian);
  j["cubic"] = {{"a2", rep.cubic.a2}, {"a1", rep.cubic.a1}, {"a0", rep.cubic.a0}};
  json ev = json::array();
  for (auto& z : rep.eigenvalues) ev.push_back(complex_json(z));
  j["eigenvalues"] = ev;
  j["classification"] = to_string(rep.classification);
  if (rep.hopf)
    j["hopf"] = {{"omega", rep.hopf->first}, {"rho", rep.hopf->second}};
  else
    j["hopf"] = nullptr;
  return j;
}

json to_json(const DetailedBalanceResult& rep) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["balanced"] = rep.balanced;
  j["witness"] = vector_json(rep.witness);
  j["residual"] = rep.residual;
  j["notes"] = rep.notes;
  return j;
}

json to_json(const LimitCycleReport& rep) {
  json j;
  j["schema_version"] = kSchemaVersion;
  switch (rep.outcome) {
    case CycleOutcome::Cycle: j["outcome"] = "cycle"; break;
    case CycleOutcome::EquilibriumCapture: j["outcome"] = "equilibrium"; break;
    case CycleOutcome::Inconclusive: j["outcome"] = "inconclusive"; break;
  }
  j["period"] = rep.period;
  j["section_fixed_point"] = rep.section_fixed_point.size()
                                 ? vector_json(rep.section_fixed_point)
                                 : json(nullptr);
  j["return_map_jacobian"] = rep.return_map_jacobian.size()
                                 ? matrix_json(rep.return_map_jacobian)
                                 : json(nullptr);
  json mult = json::array();
  for (auto& z : rep.multipliers) mult.push_back(complex_json(z));
  j["multipliers"] = mult;
  j["spectral_radius"] = rep.spectral_radius;
  switch (rep.stability) {
    case CycleStability::Stable: j["stability"] = "stable"; break;
    case CycleStability::Unstable: j["stability"] = "unstable"; break;
    case CycleStability::Inconclusive: j["stability"] = "inconclusive"; break;
  }
  j["residual"] = rep.residual;
  j["num_cycle_points"] = rep.cycle_points.size();
  if (!rep.note.empty()) j["note"] = rep.note;
  return j;
}

json to_json(const BistabilityReport& rep) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["radii"] = rep.radii;
  json fates = json::array();
  for (auto f : rep.fates) fates.push_back(to_string(f));
  j["fates"] = fates;
  j["inner_fate"] = to_string(rep.inner_fate);
  j["outer_fate"] = to_string(rep.outer_fate);
  j["separatrix_evidence"] = rep.separatrix_evidence;
  j["stable_cycle"] = rep.stable_cycle ? to_json(*rep.stable_cycle) : json(nullptr);
  j["unstable_cycle"] = rep.unstable_cycle ? to_json(*rep.unstable_cycle) : json(nullptr);
  return j;
}

json to_json(const PermanenceReport& rep) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["floor"] = rep.floor;
  j["floors"] = rep.floors;
  j["seed"] = rep.seed;
  return j;
}

std::string to_csv(const Eigen::MatrixXi& m) {
  std::ostringstream os;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j);
    os << '\n';
  }
  return os.str();
}

std::string trajectory_csv(const Trajectory& traj, const std::vector<std::string>& species) {
  std::ostringstream os;
  os << "t";
  for (auto& s : species) os << ',' << s;
  os << '\n';
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    os << fmt(traj.times[i]);
    for (int c = 0; c < traj.states[i].size(); ++c) os << ',' << fmt(traj.states[i][c]);
    os << '\n';
  }
  return os.str();
}

std::string cycle_csv(const LimitCycleReport& rep, const std::vector<std::string>& species) {
  Trajectory t;
  t.times = rep.cycle_times;
  t.states = rep.cycle_points;
  return trajectory_csv(t, species);
}

std::string scan_csv(const HopfScanResult& scan) {
  std::ostringstream os;
  os << "p1,p2,class,hval,L1\n";
  for (auto& p : scan.grid)
    os << fmt(p.p1) << ',' << fmt(p.p2) << ',' << to_string(p.cls) << ','
       << fmt(p.hval) << ",\n";
  return os.str();
}

std::string boundary_csv(const HopfScanResult& scan) {
  std::ostringstream os;
  os << "p1,p2,hval,L1\n";
  for (auto& p : scan.boundary)
    os << fmt(p.p1) << ',' << fmt(p.p2) << ',' << fmt(p.hval) << ',' << fmt(p.L1)
       << '\n';
  return os.str();
}

Trajectory trajectory_from_csv(const std::string& body) {
  Trajectory traj;
  std::istringstream is(body);
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty trajectory csv");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.empty()) continue;
    traj.times.push_back(row[0]);
    Eigen::VectorXd x(static_cast<int>(row.size()) - 1);
    for (std::size_t i = 1; i < row.size(); ++i) x[static_cast<int>(i) - 1] = row[i];
    traj.states.push_back(std::move(x));
  }
  return traj;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace crn
