#include "crnosc/models.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "crnosc/netdsl.hpp"

namespace crn {

std::string to_string(ModelId id) {
  switch (id) {
    case ModelId::FB: return "fb";
    case ModelId::FB_H: return "fb-h";
    case ModelId::WH: return "wh";
    case ModelId::WH_H: return "wh-h";
    case ModelId::W: return "w";
    case ModelId::W_H: return "w-h";
  }
  return "?";
}

std::optional<ModelId> model_from_string(const std::string& s) {
  for (ModelId id : all_models())
    if (to_string(id) == s) return id;
  return std::nullopt;
}

std::vector<ModelId> all_models() {
  return {ModelId::FB, ModelId::FB_H, ModelId::WH, ModelId::WH_H, ModelId::W, ModelId::W_H};
}

std::vector<std::string> model_param_names(ModelId id) {
  switch (id) {
    case ModelId::FB: return {"k6", "k8"};
    case ModelId::FB_H: return {"k1", "k2", "k3", "k4", "k5", "k6", "k7", "k8"};
    case ModelId::WH: return {"k1", "k2", "k3", "k4", "k5"};
    case ModelId::WH_H: return {"p", "q", "r", "s"};
    case ModelId::W: return {"k1", "k2", "k3", "k4"};
    case ModelId::W_H: return {"p", "q", "r"};
  }
  return {};
}

std::map<std::string, double> model_default_params(ModelId id) {
  std::map<std::string, double> m;
  for (auto& name : model_param_names(id)) m[name] = 1.0;
  if (id == ModelId::WH) m["k1"] = 2.0;  // equilibrium needs k1 > k4
  return m;
}

std::string builtin_source(ModelId id) {
  switch (id) {
    case ModelId::FB:
      return "X + Y -> Z ; k1\n"
             "Z -> X + Y ; k2\n"
             "Z -> X ; k3\n"
             "X -> Z ; k4\n"
             "X -> 2X ; k5\n"
             "2X -> X ; k6\n"
             "Z -> Y ; k7\n"
             "Y -> Z ; k8\n";
    case ModelId::FB_H:
      return "X + Y -> Z + W ; k1\n"
             "Z + W -> X + Y ; k2\n"
             "Z -> X ; k3\n"
             "X -> Z ; k4\n"
             "X + W -> 2X ; k5\n"
             "2X -> X + W ; k6\n"
             "Z -> Y ; k7\n"
             "Y -> Z ; k8\n";
    case ModelId::WH:
      return "X -> 2X ; k1\n"
             "X + Y -> Y ; k2\n"
             "Y -> 0 ; k3\n"
             "X -> Z ; k4\n"
             "Z -> Y ; k5\n";
    case ModelId::WH_H:
      return "X + W -> 2X ; k1\n"
             "X + Y -> Y + W ; k2\n"
             "Y -> W ; k3\n"
             "X -> Z ; k4\n"
             "Z -> Y ; k5\n";
    case ModelId::W:
      return "Y -> 2Y ; k1\n"
             "2X -> Z ; k2\n"
             "Y + Z -> X + Z ; k3\n"
             "2Z -> 0 ; k4\n";
    case ModelId::W_H:
      return "Y + W -> 2Y ; k1\n"
             "2X -> Z + W ; k2\n"
             "Y + Z -> X + Z ; k3\n"
             "2Z -> 2W ; k4\n";
  }
  throw std::invalid_argument("unknown model id");
}

ReactionNetwork builtin_network(ModelId id) {
  auto parsed = parse_network({builtin_source(id), to_string(id)});
  if (!parsed.ok()) throw std::logic_error("builtin source failed to parse");
  ReactionNetwork net = *parsed.network;
  net.name = to_string(id);
  if (net.num_species() == 3)
    net.reorder_species({"X", "Y", "Z"});
  else
    net.reorder_species({"X", "Y", "Z", "W"});
  return net;
}

namespace {

double get(const std::map<std::string, double>& m, const std::string& k) {
  auto it = m.find(k);
  if (it == m.end()) throw std::invalid_argument("missing parameter " + k);
  return it->second;
}

RateAssignment bind_rates(ModelId id, const std::map<std::string, double>& p) {
  RateAssignment r;
  switch (id) {
    case ModelId::FB: {
      double k6 = get(p, "k6"), k8 = get(p, "k8");
      r.values = {{"k1", 1.0},        {"k2", 0.2}, {"k3", 0.2},
                  {"k4", 0.2},        {"k5", k6 + 0.8}, {"k6", k6},
                  {"k7", k8 + 0.8},   {"k8", k8}};
      break;
    }
    case ModelId::FB_H:
    case ModelId::WH:
    case ModelId::W:
      for (auto& name : model_param_names(id)) r.values[name] = get(p, name);
      break;
    case ModelId::WH_H:
      r.values = {{"k1", 1.0},
                  {"k2", get(p, "p")},
                  {"k3", get(p, "q")},
                  {"k4", get(p, "r")},
                  {"k5", get(p, "s")}};
      break;
    case ModelId::W_H: {
      auto v = w_params_from_pqr(get(p, "p"), get(p, "q"), get(p, "r"));
      r.values = {v.begin(), v.end()};
      break;
    }
  }
  return r;
}

BranchKind branch_kind_of(ModelId id) {
  switch (id) {
    case ModelId::FB:
    case ModelId::WH:
    case ModelId::W: return BranchKind::Point;
    case ModelId::W_H: return BranchKind::Ray;
    default: return BranchKind::Curve;
  }
}

}  // namespace

std::map<std::string, double> w_params_from_pqr(double p, double q, double r) {
  return {{"k1", p}, {"k2", r}, {"k3", p * r}, {"k4", q * q * r / 2.0}};
}

ModelInstance builtin_model(ModelId id, std::map<std::string, double> params) {
  auto names = model_param_names(id);
  for (auto& [k, v] : params) {
    bool known = false;
    for (auto& n : names) known = known || n == k;
    if (!known)
      throw std::invalid_argument("model " + to_string(id) + " has no parameter " + k);
  }
  auto defaults = model_default_params(id);
  for (auto& [k, v] : defaults)
    if (!params.count(k)) params[k] = v;
  for (auto& [k, v] : params)
    if (!(v > 0.0))
      throw std::domain_error("parameter " + k + " must be positive");
  MassActionSystem sys(builtin_network(id), bind_rates(id, params));
  return ModelInstance{id, std::move(params), std::move(sys), branch_kind_of(id)};
}

Eigen::VectorXd closed_form_equilibrium(const ModelInstance& m, double t) {
  const auto& p = m.params;
  switch (m.id) {
    case ModelId::FB:
      return Eigen::Vector3d(1.0, 1.0, 1.0);
    case ModelId::WH: {
      double k1 = get(p, "k1"), k2 = get(p, "k2"), k3 = get(p, "k3"),
             k4 = get(p, "k4"), k5 = get(p, "k5");
      if (!(k1 > k4))
        throw std::domain_error("the wh equilibrium needs k1 > k4");
      double f = (k1 - k4) / k2;
      return Eigen::Vector3d(f * k3 / k4, f, f * k3 / k5);
    }
    case ModelId::W: {
      double k1 = get(p, "k1"), k2 = get(p, "k2"), k3 = get(p, "k3"), k4 = get(p, "k4");
      return Eigen::Vector3d(std::sqrt(2.0 * k4 / k2) * k1 / k3,
                             4.0 * k1 * k4 / (k3 * k3), k1 / k3);
    }
    case ModelId::FB_H: {
      if (!(t > 0.0)) throw std::domain_error("branch parameter t must be positive");
      double k1 = get(p, "k1"), k2 = get(p, "k2"), k3 = get(p, "k3"), k4 = get(p, "k4"),
             k5 = get(p, "k5"), k6 = get(p, "k6"), k7 = get(p, "k7"), k8 = get(p, "k8");
      double cross = k2 * k4 + k3 * k5;
      double denom = k1 * k3 * k5 * t + k8 * cross;
      double y = (k2 * k3 * k6 * t + k7 * cross) / denom * (k4 / k3) * t;
      double w = (k1 * k3 * k6 * t + (k1 * k4 * k7 + k3 * k6 * k8)) / denom * t;
      return Eigen::Vector4d(t, y, (k4 / k3) * t, w);
    }
    case ModelId::WH_H: {
      if (!(t > 0.0)) throw std::domain_error("branch parameter t must be positive");
      double pp = get(p, "p"), q = get(p, "q"), r = get(p, "r"), s = get(p, "s");
      return Eigen::Vector4d(t, t * r / q, t * r / s, t * pp * r / q + r);
    }
    case ModelId::W_H: {
      if (!(t > 0.0)) throw std::domain_error("branch parameter t must be positive");
      double pp = get(p, "p"), q = get(p, "q"), r = get(p, "r");
      return Eigen::Vector4d(t * q, t * 2.0 * q * q / pp, t, t * r);
    }
  }
  throw std::invalid_argument("unknown model id");
}

double hopf_locus_eval(ModelId id, const std::map<std::string, double>& params) {
  switch (id) {
    case ModelId::FB: {
      double k6 = get(params, "k6"), k8 = get(params, "k8");
      return 50 * k6 * k6 * k8 + 100 * k6 * k8 * k8 + 55 * k6 * k6 + 260 * k6 * k8 +
             50 * k8 * k8 + 128 * k6 + 40 * k8 - 26;
    }
    case ModelId::WH: {
      double k1 = get(params, "k1"), k3 = get(params, "k3"), k4 = get(params, "k4"),
             k5 = get(params, "k5");
      return (k3 + k5) - (k1 - k4);
    }
    case ModelId::WH_H: {
      double p = get(params, "p"), q = get(params, "q"), r = get(params, "r"),
             s = get(params, "s"), t = get(params, "t");
      return (q + r + s) * t * t + ((q + s) * (q + s) - p * r * s) * t +
             q * s * (q + s);
    }
    case ModelId::W: {
      double k2 = get(params, "k2"), k3 = get(params, "k3"), k4 = get(params, "k4");
      return 4.0 * (k4 + std::sqrt(2.0 * k2 * k4)) - k3;
    }
    case ModelId::W_H: {
      double p = get(params, "p"), q = get(params, "q"), r = get(params, "r");
      if (!(r > 1.0) || !(q < r * (r - 1.0)))
        return std::numeric_limits<double>::infinity();  // no bifurcation: stable side
      double pc = 2.0 * q * (q + 2.0) * (r * r + (q + 2.0) * r + q) / (r * (r - 1.0) - q);
      return pc - p;
    }
    case ModelId::FB_H:
      throw std::invalid_argument("fb-h has no closed-form Hopf locus");
  }
  throw std::invalid_argument("unknown model id");
}

std::vector<double> whh_locus_roots(double p, double q, double r, double s) {
  double a = q + r + s;
  double b = (q + s) * (q + s) - p * r * s;
  double c = q * s * (q + s);
  double disc = b * b - 4.0 * a * c;
  double scale = b * b + 4.0 * a * c;
  if (b >= 0.0) return {};  // both roots would be nonpositive
  if (disc < -1e-12 * scale) return {};
  if (std::abs(disc) <= 1e-12 * scale) return {-b / (2.0 * a)};
  double sq = std::sqrt(disc);
  double big = (-b + sq) / 2.0;  // numerically stable split: b < 0
  return {c / big, big / a};     // ascending
}

int hopf_root_count(double p, double q, double r, double s) {
  return static_cast<int>(whh_locus_roots(p, q, r, s).size());
}

double closed_form_L1(ModelId id, const std::map<std::string, double>& params) {
  switch (id) {
    case ModelId::WH_H: {
      double q = get(params, "q"), r = get(params, "r"), s = get(params, "s"),
             t = get(params, "t");
      return (q + r + s) * t * t - (q + s) * (q + r + s) * t - 2.0 * q * s * (q + s);
    }
    case ModelId::W: {
      double q = get(params, "q"), r = get(params, "r");
      double q2 = q * q;
      double num = 3 * q2 * q2 + 11 * q2 * q + 17 * q2 + 12 * q + 4;
      double d1 = q2 + 5 * q + 4;
      double d2 = q2 + 8 * q + 4;
      return -(r * r * num) / (q2 * d1 * d1 * d2);
    }
    default:
      throw std::invalid_argument("no closed-form focal value for model " + to_string(id));
  }
}

std::optional<CanonicalFrame> closed_form_frame(const ModelInstance& m, double t) {
  CanonicalFrame f;
  switch (m.id) {
    case ModelId::W: {
      double k1 = get(m.params, "k1"), k2 = get(m.params, "k2"),
             k3 = get(m.params, "k3");
      double p = k3 / k2;
      double q = std::sqrt(2.0 * get(m.params, "k4") / k2);
      double c = k3 / (k1 * k2);  // the rates are c times the (p,q,r) form
      f.omega = 2.0 * std::pow(q, 1.5) / c;
      f.rho = -p / c;
      f.T << 0.0, p, -2.0 * q * q,
             2.0 * std::pow(q, 1.5), 0.0, 4.0 * std::pow(q, 1.5),
             -1.0, 1.0, q;
      return f;
    }
    case ModelId::WH_H: {
      double q = get(m.params, "q"), r = get(m.params, "r"), s = get(m.params, "s");
      f.rho = -q - s - t;
      f.omega = std::sqrt(s * q + q * t + r * t + s * t);
      f.T << 0.0, s + t, s,
             -r * s / f.omega, q * (s + t) / f.omega, -s * t / f.omega,
             r * s, q * (q + s) + t * (q + r + s), -s * (q + s);
      return f;
    }
    case ModelId::W_H: {
      double p = get(m.params, "p"), q = get(m.params, "q"), r = get(m.params, "r");
      f.rho = -2.0 * q * (q * r + q + 2.0 * r);
      f.omega = q * r * std::sqrt(2.0 * (2.0 * q * q + p * (q + r + 1.0)) /
                                  (q * r + q + 2.0 * r));
      f.T << r, 0.0, q + 2.0 * r,
             -2.0 * q * q * r / f.omega, -p * r * r / f.omega,
             2.0 * q * q * r * (q + r) / f.omega,
             q - r * (r - 1.0), q * (r + 1.0) + r * (r + 2.0), q * (1.0 + r + r * r);
      return f;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace crn
