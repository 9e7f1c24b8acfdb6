#include "usde/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "usde/toml_lite.hpp"

namespace usde {

namespace {

using toml::Document;
using toml::Value;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ScenarioError(path + ": " + msg);
}

std::string fpath(const std::string& sec, const std::string& key) {
  return "[" + sec + "]." + key;
}

const Value& require(const Document& doc, const std::string& sec,
                     const std::string& key) {
  const Value* v = doc.find(sec, key);
  if (v == nullptr) fail(fpath(sec, key), "missing required field");
  return *v;
}

double number(const Document& doc, const std::string& sec,
              const std::string& key) {
  const Value& v = require(doc, sec, key);
  if (!v.is_number()) fail(fpath(sec, key), "expected a number");
  return v.num;
}

double number_or(const Document& doc, const std::string& sec,
                 const std::string& key, double dflt) {
  return doc.has(sec, key) ? number(doc, sec, key) : dflt;
}

bool boolean_or(const Document& doc, const std::string& sec,
                const std::string& key, bool dflt) {
  const Value* v = doc.find(sec, key);
  if (v == nullptr) return dflt;
  if (v->kind != Value::Kind::Bool) fail(fpath(sec, key), "expected a boolean");
  return v->boolean;
}

std::string string_or(const Document& doc, const std::string& sec,
                      const std::string& key, const std::string& dflt) {
  const Value* v = doc.find(sec, key);
  if (v == nullptr) return dflt;
  if (v->kind != Value::Kind::String) fail(fpath(sec, key), "expected a string");
  return v->str;
}

std::vector<double> number_list(const Value& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < v.array.size(); ++i) {
    if (!v.array[i].is_number()) {
      fail(path + "[" + std::to_string(i) + "]", "expected a number");
    }
    out.push_back(v.array[i].num);
  }
  return out;
}

// Scalar broadcast or per-joint array.
JointVec joint_vec(const Document& doc, const std::string& sec,
                   const std::string& key, int dof) {
  const Value& v = require(doc, sec, key);
  if (v.is_number()) return JointVec::Constant(dof, v.num);
  const std::vector<double> xs = number_list(v, fpath(sec, key));
  if (static_cast<int>(xs.size()) != dof) {
    fail(fpath(sec, key), "expected " + std::to_string(dof) + " entries");
  }
  return Eigen::Map<const JointVec>(xs.data(), dof);
}

JointVec joint_vec_or(const Document& doc, const std::string& sec,
                      const std::string& key, int dof, double dflt) {
  if (!doc.has(sec, key)) return JointVec::Constant(dof, dflt);
  return joint_vec(doc, sec, key, dof);
}

Eigen::Vector3d vec3(const Value& v, const std::string& path) {
  const std::vector<double> xs = number_list(v, path);
  if (xs.size() != 3) fail(path, "expected 3 entries");
  return {xs[0], xs[1], xs[2]};
}

// Per-link 3-vectors: either [[..],[..],...] or a scalar list broadcast to
// the x axis (convenient for the planar arm's COM offsets).
std::vector<Eigen::Vector3d> vec3_list(const Document& doc,
                                       const std::string& sec,
                                       const std::string& key, int dof) {
  const Value& v = require(doc, sec, key);
  const std::string path = fpath(sec, key);
  if (!v.is_array() || v.array.empty()) fail(path, "expected an array");
  std::vector<Eigen::Vector3d> out;
  if (v.array.front().is_number()) {
    for (size_t i = 0; i < v.array.size(); ++i) {
      if (!v.array[i].is_number()) fail(path, "mixed scalar/array entries");
      out.emplace_back(v.array[i].num, 0.0, 0.0);
    }
  } else {
    for (size_t i = 0; i < v.array.size(); ++i) {
      out.push_back(vec3(v.array[i], path + "[" + std::to_string(i) + "]"));
    }
  }
  if (static_cast<int>(out.size()) != dof) {
    fail(path, "expected " + std::to_string(dof) + " entries");
  }
  return out;
}

ManipulatorModel load_model(const Document& doc) {
  const std::string sec = "model";
  const int dof = static_cast<int>(number(doc, sec, "dof"));
  if (dof < 1) fail(fpath(sec, "dof"), "must be >= 1");

  const std::string kind = string_or(doc, sec, "kind", "chain");
  Eigen::Vector3d gravity(0.0, 0.0, -9.81);
  if (kind == "planar2r") gravity = Eigen::Vector3d(0.0, -9.81, 0.0);
  if (doc.has(sec, "gravity")) {
    gravity = vec3(require(doc, sec, "gravity"), fpath(sec, "gravity"));
  }

  const JointVec mass = joint_vec(doc, sec, "mass", dof);
  const JointVec length = joint_vec(doc, sec, "length", dof);
  const JointVec inertia = joint_vec(doc, sec, "inertia", dof);
  const std::vector<Eigen::Vector3d> com = vec3_list(doc, sec, "com", dof);

  std::vector<LinkParams> links(dof);
  for (int i = 0; i < dof; ++i) {
    links[i].mass = mass[i];
    links[i].length = length[i];
    links[i].inertia = inertia[i];
    links[i].com = com[i];
    links[i].axis = Eigen::Vector3d::UnitZ();
    links[i].offset =
        i == 0 ? Eigen::Vector3d::Zero()
               : Eigen::Vector3d(length[i - 1], 0.0, 0.0);
  }
  if (doc.has(sec, "axis")) {
    const auto axes = vec3_list(doc, sec, "axis", dof);
    for (int i = 0; i < dof; ++i) links[i].axis = axes[i];
  }
  if (doc.has(sec, "offset")) {
    const auto offs = vec3_list(doc, sec, "offset", dof);
    for (int i = 0; i < dof; ++i) links[i].offset = offs[i];
  }

  try {
    if (kind == "planar2r") {
      return ManipulatorModel::planar_two_link(links, gravity);
    }
    if (kind == "chain") {
      return ManipulatorModel::chain(links, gravity);
    }
  } catch (const std::invalid_argument& e) {
    fail("[model]", e.what());
  }
  fail(fpath(sec, "kind"), "unknown model kind '" + kind + "'");
}

ControllerConfig load_controller(const Document& doc, int dof) {
  const std::string sec = "controller";
  ControllerConfig cfg = ControllerConfig::defaults(dof);
  cfg.filter_k = number_or(doc, sec, "k", cfg.filter_k);
  if (doc.has(sec, "eta")) cfg.eta = joint_vec(doc, sec, "eta", dof);
  if (doc.has(sec, "K")) cfg.K = joint_vec(doc, sec, "K", dof);
  cfg.K_lower = doc.has(sec, "K_lower") ? joint_vec(doc, sec, "K_lower", dof)
                                        : cfg.K;
  if (doc.has(sec, "pi")) cfg.pi = joint_vec(doc, sec, "pi", dof);
  if (doc.has(sec, "sigma")) cfg.sigma = joint_vec(doc, sec, "sigma", dof);
  if (doc.has(sec, "T1")) cfg.T1 = joint_vec(doc, sec, "T1", dof);
  if (doc.has(sec, "T2")) cfg.T2 = joint_vec(doc, sec, "T2", dof);
  if (doc.has(sec, "tau_limit")) {
    cfg.tau_limit = joint_vec(doc, sec, "tau_limit", dof);
  }
  cfg.sigma_max = number_or(doc, sec, "sigma_max", cfg.sigma_max);
  cfg.abs_s = boolean_or(doc, sec, "abs_s", cfg.abs_s);
  try {
    cfg.validate(dof);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  return cfg;
}

JointTrajectory load_trajectory(const Document& doc, int dof) {
  const std::string sec = "trajectory";
  const std::vector<double> times =
      number_list(require(doc, sec, "times"), fpath(sec, "times"));
  const Value& pts = require(doc, sec, "points");
  if (!pts.is_array()) fail(fpath(sec, "points"), "expected an array");
  std::vector<JointVec> points;
  for (size_t i = 0; i < pts.array.size(); ++i) {
    const std::string path = fpath(sec, "points") + "[" + std::to_string(i) + "]";
    const std::vector<double> xs = number_list(pts.array[i], path);
    if (static_cast<int>(xs.size()) != dof) {
      fail(path, "expected " + std::to_string(dof) + " entries");
    }
    points.push_back(Eigen::Map<const JointVec>(xs.data(), dof));
  }
  try {
    return JointTrajectory(times, points);
  } catch (const std::invalid_argument& e) {
    fail("[trajectory]", e.what());
  }
}

}  // namespace

void Scenario::validate() const {
  if (!(control_dt > 0.0)) throw ScenarioError("[sim].control_dt: must be > 0");
  if (physics_substeps < 1) {
    throw ScenarioError("[sim].physics_substeps: must be >= 1");
  }
  if (!(duration > 0.0)) throw ScenarioError("[sim].duration: must be > 0");
  if (payload.mass < 0.0) {
    throw ScenarioError("[disturbance].payload_mass: must be >= 0");
  }
  if (payload.mass > 0.0) {
    if (!(payload.attach_time < payload.detach_time) ||
        !(payload.detach_time <= duration)) {
      throw ScenarioError(
          "[disturbance].payload_attach/payload_detach: need "
          "attach < detach <= duration");
    }
  }
  if (nominal.dof() != plant.dof()) {
    throw ScenarioError("[model]: nominal/plant DoF mismatch");
  }
  if (trajectory.dof() != nominal.dof()) {
    throw ScenarioError("[trajectory].points: DoF mismatch with [model]");
  }
  if (velocity_noise_std < 0.0) {
    throw ScenarioError("[disturbance].velocity_noise_std: must be >= 0");
  }
}

std::vector<double> Scenario::phase_times() const {
  std::vector<double> ts = trajectory.knot_times();
  if (ts.empty() || ts.back() < duration) ts.push_back(duration);
  return ts;
}

ScenarioFile load_scenario_string(const std::string& text,
                                  const std::string& origin) {
  Document doc;
  try {
    doc = toml::parse_string(text, origin);
  } catch (const toml::ParseError& e) {
    throw ScenarioError(e.what());
  }

  ScenarioFile out;
  out.scenario.nominal = load_model(doc);
  const int dof = out.scenario.nominal.dof();

  out.control = load_controller(doc, dof);
  const std::string vname = string_or(doc, "controller", "variant", "fg");
  const auto variant = variant_from_string(vname);
  if (!variant) {
    throw ScenarioError("[controller].variant: unknown controller '" + vname +
                        "' (valid: ctc, fg, ag, st)");
  }
  out.default_variant = *variant;

  out.scenario.trajectory = load_trajectory(doc, dof);

  Scenario& sc = out.scenario;
  sc.control_dt = number_or(doc, "sim", "control_dt", 1e-3);
  sc.physics_substeps =
      static_cast<int>(number_or(doc, "sim", "physics_substeps", 10));
  sc.duration = number_or(doc, "sim", "duration", sc.trajectory.horizon());
  sc.seed = static_cast<std::uint64_t>(number_or(doc, "sim", "seed", 0));

  if (sc.duration > sc.trajectory.horizon()) {
    sc.trajectory.set_horizon(sc.duration);
  }
  sc.q0 = sc.trajectory.sample(0.0).q_des;
  sc.qd0 = JointVec::Zero(dof);

  const std::string dsec = "disturbance";
  sc.friction.viscous = joint_vec_or(doc, dsec, "viscous", dof, 0.0);
  sc.friction.coulomb = joint_vec_or(doc, dsec, "coulomb", dof, 0.0);
  sc.friction.steepness = number_or(doc, dsec, "coulomb_steepness", 100.0);
  sc.external.constant = joint_vec_or(doc, dsec, "external_tau", dof, 0.0);
  sc.external.sin_amp = joint_vec_or(doc, dsec, "external_tau_sin_amp", dof, 0.0);
  sc.external.sin_freq = number_or(doc, dsec, "external_tau_sin_freq", 0.0);
  sc.external.sin_phase = number_or(doc, dsec, "external_tau_sin_phase", 0.0);
  sc.velocity_noise_std = number_or(doc, dsec, "velocity_noise_std", 0.0);

  sc.payload.mass = number_or(doc, dsec, "payload_mass", 0.0);
  if (sc.payload.mass > 0.0) {
    sc.payload.attach_time = number(doc, dsec, "payload_attach");
    sc.payload.detach_time = number_or(doc, dsec, "payload_detach", sc.duration);
    if (doc.has(dsec, "payload_offset")) {
      sc.payload.offset = vec3(require(doc, dsec, "payload_offset"),
                               fpath(dsec, "payload_offset"));
    } else {
      sc.payload.offset =
          Eigen::Vector3d(sc.nominal.links().back().length, 0.0, 0.0);
    }
    // Snap grasp events to the control grid so the plant switches exactly
    // at integration segment boundaries.
    auto snap = [&](double t) { return std::round(t / sc.control_dt) * sc.control_dt; };
    sc.payload.attach_time = snap(sc.payload.attach_time);
    sc.payload.detach_time = snap(sc.payload.detach_time);
  }

  const double mass_scale = number_or(doc, dsec, "mass_scale", 1.0);
  const double inertia_scale = number_or(doc, dsec, "inertia_scale", 1.0);
  try {
    sc.plant = sc.nominal.scaled(mass_scale, inertia_scale);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("[disturbance].mass_scale: ") + e.what());
  }

  sc.validate();
  return out;
}

ScenarioFile load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("cannot open scenario file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_scenario_string(ss.str(), path);
}

}  // namespace usde
