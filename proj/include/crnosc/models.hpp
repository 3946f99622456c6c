// Registry of the six builtin oscillator models: the three classical
// three-species systems (fb, wh, w) and their mass-conserving four-species
// homogenisations (fb-h, wh-h, w-h). Provides the canonical networks,
// parameter-to-rate bindings, closed-form equilibrium branches, Hopf locus
// functions, closed-form focal values, and closed-form canonical frames
// where available.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crnosc/lincheck.hpp"
#include "crnosc/massaction.hpp"

namespace crn {

enum class ModelId { FB, FB_H, WH, WH_H, W, W_H };

std::string to_string(ModelId id);                 // "fb", "fb-h", ...
std::optional<ModelId> model_from_string(const std::string& s);
std::vector<ModelId> all_models();

// The model's free parameters: raw rate labels, or the reduced
// substitution parameters for the homogenised variants.
std::vector<std::string> model_param_names(ModelId id);
std::map<std::string, double> model_default_params(ModelId id);

// Canonical DSL source and the parsed network with species in
// (x, y, z[, w]) order.
std::string builtin_source(ModelId id);
ReactionNetwork builtin_network(ModelId id);

enum class BranchKind { Point, Ray, Curve };

struct ModelInstance {
  ModelId id;
  std::map<std::string, double> params;
  MassActionSystem system;
  BranchKind branch_kind;
};

// Missing parameters are filled from defaults; unknown names or
// out-of-domain values throw std::invalid_argument / std::domain_error.
ModelInstance builtin_model(ModelId id, std::map<std::string, double> params = {});

// Rate binding for the w / w-h systems written in the (p, q, r) form
// (time-rescaled so that the substitution constant is one).
std::map<std::string, double> w_params_from_pqr(double p, double q, double r);

// Evaluates the model's equilibrium formula; `t` parametrises the branch
// for the homogenised models and is ignored for point branches.
Eigen::VectorXd closed_form_equilibrium(const ModelInstance& m, double t = 1.0);

// Signed closed-form Hopf locus value: zero on the bifurcation set,
// positive on the stable side, negative on the unstable side. Parameter
// map must include the branch parameter "t" for wh-h. Unsupported for
// fb-h (no closed form exists).
double hopf_locus_eval(ModelId id, const std::map<std::string, double>& params);

// Both positive roots in t of the wh-h locus quadratic (may be 0, 1 or 2).
std::vector<double> whh_locus_roots(double p, double q, double r, double s);
// Number of t > 0 with (p,q,r,s,t) on the wh-h Hopf locus.
int hopf_root_count(double p, double q, double r, double s);

// The closed-form first focal value. Supported for wh-h
// (params q, r, s, t; sign contract only) and w (params q, r; exact value
// on the locus).
double closed_form_L1(ModelId id, const std::map<std::string, double>& params);

// Closed-form canonical frame of the reduced Jacobian on the Hopf locus.
// Available for w, wh-h and w-h; empty for fb and fb-h. `t` is the branch
// parameter where applicable.
std::optional<CanonicalFrame> closed_form_frame(const ModelInstance& m, double t = 1.0);

}  // namespace crn
