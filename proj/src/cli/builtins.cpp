/*
   Copyright 2026 The absvie-lab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "absvie/cli/builtins.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace absvie::cli {

namespace {

std::vector<BuiltinSpec> build_catalog() {
  std::vector<BuiltinSpec> c;
  c.push_back({"generator", "constant", "g = c", {{"c", 0.5, "constant value"}}});
  c.push_back({"generator", "anticipated-y", "g = k Y(s+delta)",
               {{"k", 1.0, "coupling"}, {"delta", 0.25, "advance (time units)"}}});
  c.push_back({"generator", "average-y", "g = k int_s^{s+delta} e^{lambda(s-r)} Y(r) dr",
               {{"k", 1.0, "coupling"}, {"delta", 0.25, "window (time units)"}, {"lambda", 1.0, "decay rate"}}});
  c.push_back({"generator", "z-reading", "g = k Z(t,s)", {{"k", 1.0, "coupling"}}});
  c.push_back({"generator", "affine",
               "g = c + k_y Y(s) + k_z Z(t,s) + k_alpha Y(s+delta) + k_mu int e^{lambda(s-r)} Y(r) dr",
               {{"c", 0.0, "constant"},
                {"k_y", 0.0, "weight of Y(s)"},
                {"k_z", 0.0, "weight of Z(t,s)"},
                {"k_alpha", 0.0, "weight of Y(s+delta)"},
                {"k_mu", 0.0, "weight of the average term"},
                {"delta", 0.0, "advance (time units)"},
                {"lambda", 0.0, "decay rate"}}});
  c.push_back({"free-term", "constant", "phi(t) = value", {{"value", 1.0, "constant value"}}});
  c.push_back({"free-term", "brownian-terminal", "phi(t) = x0 + b W(max(t, T))",
               {{"x0", 1.0, "offset"}, {"b", 0.5, "loading"}}});
  c.push_back({"free-term", "brownian-running", "phi(t) = x0 + b W(t)",
               {{"x0", 1.0, "offset"}, {"b", 0.5, "loading"}}});
  c.push_back({"free-term", "linear-time", "phi(t) = x0 + slope t",
               {{"x0", 1.0, "offset"}, {"slope", 0.5, "slope"}}});
  c.push_back({"kernels", "constant-kernels", "A1, A2, A3 constant on t > s",
               {{"a1", 0.3, "drift kernel"}, {"a2", 0.2, "delayed drift kernel"}, {"a3", 0.4, "diffusion kernel"}}});
  c.push_back({"game", "lq-constant",
               "two-player linear-quadratic game with constant kernels, weights and delays",
               {{"a1", 0.2, "state drift kernel"},
                {"a2", 0.1, "delayed state drift kernel"},
                {"at1", 0.2, "state diffusion kernel"},
                {"delta", 0.25, "state delay (time units)"},
                {"phi", 1.0, "free term and state history"},
                {"p1_b", 1.0, "player 1 control drift kernel"},
                {"p1_c", 0.3, "player 1 delayed control drift kernel"},
                {"p1_bt", 0.2, "player 1 control diffusion kernel"},
                {"p1_q", 1.0, "player 1 state weight"},
                {"p1_qt", 0.5, "player 1 delayed state weight"},
                {"p1_r", 1.0, "player 1 control weight"},
                {"p1_rt", 0.5, "player 1 delayed control weight"},
                {"p1_delay", 0.25, "player 1 control delay (time units)"},
                {"p2_b", -0.8, "player 2 control drift kernel"},
                {"p2_c", 0.2, "player 2 delayed control drift kernel"},
                {"p2_bt", 0.1, "player 2 control diffusion kernel"},
                {"p2_q", 0.5, "player 2 state weight"},
                {"p2_qt", 0.5, "player 2 delayed state weight"},
                {"p2_r", 1.5, "player 2 control weight"},
                {"p2_rt", 0.5, "player 2 delayed control weight"},
                {"p2_delay", 0.25, "player 2 control delay (time units)"}}});
  c.push_back({"regularity-case", "linear-constant",
               "g = k_y Y(s) + k_alpha Y(s+delta) + k_z Z(t,s) + k_xi Z(s,t), phi = x0 + int (f0 + f1 s) dW",
               {{"k_y", 0.5, "weight of Y(s)"},
                {"k_alpha", 0.0, "weight of Y(s+delta)"},
                {"k_z", 0.0, "weight of Z(t,s)"},
                {"k_xi", 0.0, "weight of Z(s,t)"},
                {"delta", 0.0, "advance (time units)"},
                {"x0", 1.0, "offset"},
                {"f0", 1.0, "integrand at s = 0"},
                {"f1", 1.0, "integrand slope"}}});
  return c;
}

Kernel constant_kernel(double v) {
  return [v](double, double) { return v; };
}

TimeFn constant_fn(double v) {
  return [v](double) { return v; };
}

std::string selection_name(const Json& selection, const std::string& kind) {
  if (!selection.is_object()) throw ConfigError(kind + " selection must be an object");
  if (!selection.contains("name") || !selection.at("name").is_string()) {
    throw ConfigError(kind + " selection needs a string 'name'");
  }
  return selection.at("name").get<std::string>();
}

}  // namespace

const std::vector<BuiltinSpec>& catalog() {
  static const std::vector<BuiltinSpec> c = build_catalog();
  return c;
}

const BuiltinSpec& find_builtin(const std::string& kind, const std::string& name) {
  for (const auto& b : catalog()) {
    if (b.kind == kind && b.name == name) return b;
  }
  throw ConfigError("unknown " + kind + " '" + name + "' (see list-builtins)");
}

std::map<std::string, double> resolve_params(const std::string& kind, const Json& selection) {
  const BuiltinSpec& spec = find_builtin(kind, selection_name(selection, kind));
  std::map<std::string, double> out;
  for (const auto& p : spec.params) out[p.name] = p.default_value;
  for (const auto& [key, value] : selection.items()) {
    if (key == "name") continue;
    if (!out.count(key)) {
      throw ConfigError("unknown parameter '" + key + "' for " + kind + " '" + spec.name + "'");
    }
    if (!value.is_number() || !std::isfinite(value.get<double>())) {
      throw ConfigError("parameter '" + key + "' of " + kind + " '" + spec.name + "' must be a finite number");
    }
    out[key] = value.get<double>();
  }
  return out;
}

std::string describe_catalog() {
  std::ostringstream os;
  for (const auto& b : catalog()) {
    os << b.kind << " " << b.name << ": " << b.description << "\n";
    for (const auto& p : b.params) {
      os << "    " << p.name << " = " << p.default_value << "  (" << p.description << ")\n";
    }
  }
  return os.str();
}

GeneratorSpec make_generator(const Json& selection, const TimeGrid& grid) {
  const std::string name = selection_name(selection, "generator");
  auto p = resolve_params("generator", selection);
  GeneratorSpec s;
  s.name = name;
  if (name == "constant") {
    const double c = p["c"];
    s.g = [c](const GeneratorArgs&) { return c; };
  } else if (name == "anticipated-y") {
    const double k = p["k"];
    s.uses.alpha = true;
    s.delays.delta = delay_steps(grid, p["delta"]);
    s.lipschitz_hint = std::abs(k);
    s.g = [k](const GeneratorArgs& a) { return k * a.alpha; };
  } else if (name == "average-y") {
    const double k = p["k"];
    s.uses.mu = true;
    s.lambda = p["lambda"];
    s.delays.delta = delay_steps(grid, p["delta"]);
    s.lipschitz_hint = std::abs(k);
    s.g = [k](const GeneratorArgs& a) { return k * a.mu; };
  } else if (name == "z-reading") {
    const double k = p["k"];
    s.uses.z = true;
    s.lipschitz_hint = std::abs(k);
    s.g = [k](const GeneratorArgs& a) { return k * a.z[0]; };
  } else {
    const double c = p["c"], ky = p["k_y"], kz = p["k_z"], ka = p["k_alpha"], km = p["k_mu"];
    s.uses.y = ky != 0.0;
    s.uses.z = kz != 0.0;
    s.uses.alpha = ka != 0.0;
    s.uses.mu = km != 0.0;
    s.lambda = p["lambda"];
    s.delays.delta = delay_steps(grid, p["delta"]);
    s.lipschitz_hint = std::abs(ky) + std::abs(kz) + std::abs(ka) + std::abs(km);
    s.g = [=](const GeneratorArgs& a) {
      double v = c;
      if (ky != 0.0) v += ky * a.y;
      if (kz != 0.0) v += kz * a.z[0];
      if (ka != 0.0) v += ka * a.alpha;
      if (km != 0.0) v += km * a.mu;
      return v;
    };
  }
  s.delays.validate(grid);
  return s;
}

FreeTermBuiltin make_free_term(const Json& selection, const PathEnsemble& ens) {
  const std::string name = selection_name(selection, "free-term");
  auto p = resolve_params("free-term", selection);
  const TimeGrid& g = ens.grid();
  FreeTermBuiltin f;
  if (name == "constant") {
    const double v = p["value"];
    f.phi = [v](std::size_t, std::size_t) { return v; };
  } else if (name == "brownian-terminal") {
    const double x0 = p["x0"], b = p["b"];
    const std::size_t n = g.steps;
    f.phi = [&ens, x0, b, n](std::size_t path, std::size_t node) {
      return x0 + b * ens.brownian(path, std::max(node, n), 0);
    };
    f.adapted = b == 0.0;
  } else if (name == "brownian-running") {
    const double x0 = p["x0"], b = p["b"];
    f.phi = [&ens, x0, b](std::size_t path, std::size_t node) {
      return x0 + b * ens.brownian(path, node, 0);
    };
  } else {
    const double x0 = p["x0"], slope = p["slope"], h = g.step;
    f.phi = [x0, slope, h](std::size_t, std::size_t node) {
      return x0 + slope * h * static_cast<double>(node);
    };
  }
  return f;
}

LinearKernels make_kernels(const Json& selection) {
  auto p = resolve_params("kernels", selection);
  LinearKernels k;
  k.a1 = constant_kernel(p["a1"]);
  k.a2 = constant_kernel(p["a2"]);
  k.a3 = constant_kernel(p["a3"]);
  return k;
}

LQGameSpec make_game(const Json& selection) {
  auto p = resolve_params("game", selection);
  LQGameSpec s;
  s.a1 = constant_kernel(p["a1"]);
  s.a2 = constant_kernel(p["a2"]);
  s.at1 = constant_kernel(p["at1"]);
  s.delta = p["delta"];
  const double phi = p["phi"];
  s.phi = [phi](std::size_t, std::ptrdiff_t) { return phi; };
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string pre = "p" + std::to_string(i + 1) + "_";
    PlayerSpec& pl = s.players[i];
    pl.b = constant_kernel(p[pre + "b"]);
    pl.c = constant_kernel(p[pre + "c"]);
    pl.bt = constant_kernel(p[pre + "bt"]);
    pl.q = constant_fn(p[pre + "q"]);
    pl.qt = constant_fn(p[pre + "qt"]);
    pl.r = constant_fn(p[pre + "r"]);
    pl.rt = constant_fn(p[pre + "rt"]);
    pl.delay = p[pre + "delay"];
  }
  return s;
}

LinearRegularityCase make_regularity_case(const Json& selection) {
  auto p = resolve_params("regularity-case", selection);
  LinearRegularityCase c;
  auto kernel_or_null = [](double v) { return v != 0.0 ? constant_kernel(v) : Kernel{}; };
  c.k_y = kernel_or_null(p["k_y"]);
  c.k_alpha = kernel_or_null(p["k_alpha"]);
  c.k_z = kernel_or_null(p["k_z"]);
  c.k_xi = kernel_or_null(p["k_xi"]);
  c.delta = p["delta"];
  c.x0 = p["x0"];
  const double f0 = p["f0"], f1 = p["f1"];
  c.f = [f0, f1](double t) { return f0 + f1 * t; };
  return c;
}

}  // namespace absvie::cli
