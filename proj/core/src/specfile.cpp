#include "hbm/specfile.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace hbm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& value, const std::string& where) {
  std::vector<double> out;
  std::istringstream is(value);
  std::string tok;
  while (is >> tok) {
    try {
      size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw input_error(where + ": '" + tok + "' is not a number");
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

BodySpec parse_body_spec(const std::string& text, const std::string& filename) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  std::map<std::string, std::pair<std::string, int>> kv;
  std::vector<std::pair<std::string, int>> modes;

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw input_error(filename + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw input_error(filename + ":" + std::to_string(lineno) + ": empty key or value");
    if (key == "mode") {
      modes.emplace_back(value, lineno);
    } else {
      if (kv.count(key))
        throw input_error(filename + ":" + std::to_string(lineno) + ": duplicate key '" +
                          key + "'");
      kv[key] = {value, lineno};
    }
  }

  auto where = [&](const std::string& key, int ln) {
    return filename + ":" + std::to_string(ln) + ": " + key;
  };
  auto require = [&](const std::string& key) -> std::pair<std::string, int> {
    auto it = kv.find(key);
    if (it == kv.end())
      throw input_error(filename + ": missing required field '" + key + "'");
    return it->second;
  };

  const auto [dim_str, dim_ln] = require("dim");
  const auto dim_vals = parse_numbers(dim_str, where("dim", dim_ln));
  if (dim_vals.size() != 1 || (dim_vals[0] != 2.0 && dim_vals[0] != 3.0))
    throw input_error(where("dim", dim_ln) + ": must be 2 or 3");
  const int dim = static_cast<int>(dim_vals[0]);

  const auto [family, fam_ln] = require("family");

  std::map<std::string, bool> used{{"dim", true}, {"family", true}, {"ell", true}};
  BodySpec spec;
  try {
    if (family == "ball") {
      const auto [v, ln] = require("radius");
      const auto nums = parse_numbers(v, where("radius", ln));
      if (nums.size() != 1) throw input_error(where("radius", ln) + ": expected one number");
      spec = BodySpec::make_ball(dim, nums[0]);
      used["radius"] = true;
    } else if (family == "ellipsoid") {
      const auto [v, ln] = require("axes");
      const auto nums = parse_numbers(v, where("axes", ln));
      if (static_cast<int>(nums.size()) != dim)
        throw input_error(where("axes", ln) + ": expected " + std::to_string(dim) +
                          " semi-axes");
      Eigen::VectorXd axes(dim);
      for (int i = 0; i < dim; ++i) axes[i] = nums[i];
      spec = BodySpec::make_ellipsoid(axes);
      used["axes"] = true;
    } else if (family == "lp-ball") {
      const auto [v, ln] = require("exponent");
      const auto nums = parse_numbers(v, where("exponent", ln));
      if (nums.size() != 1) throw input_error(where("exponent", ln) + ": expected one number");
      double scale = 1.0;
      if (kv.count("scale")) {
        const auto [sv, sl] = kv["scale"];
        const auto sn = parse_numbers(sv, where("scale", sl));
        if (sn.size() != 1) throw input_error(where("scale", sl) + ": expected one number");
        scale = sn[0];
        used["scale"] = true;
      }
      spec = BodySpec::make_lp_ball(dim, nums[0], scale);
      used["exponent"] = true;
    } else if (family == "harmonic") {
      const auto [v, ln] = require("radius");
      const auto nums = parse_numbers(v, where("radius", ln));
      if (nums.size() != 1) throw input_error(where("radius", ln) + ": expected one number");
      std::vector<std::pair<int, double>> mode_list;
      for (const auto& [mv, ml] : modes) {
        const auto mn = parse_numbers(mv, where("mode", ml));
        if (mn.size() != 2 || mn[0] != std::floor(mn[0]))
          throw input_error(where("mode", ml) + ": expected 'degree coefficient'");
        mode_list.emplace_back(static_cast<int>(mn[0]), mn[1]);
      }
      spec = BodySpec::make_harmonic(dim, nums[0], std::move(mode_list));
      used["radius"] = true;
    } else {
      throw input_error(where("family", fam_ln) +
                        ": unknown family '" + family +
                        "' (expected ball | ellipsoid | lp-ball | harmonic)");
    }
  } catch (const input_error&) {
    throw;
  } catch (const std::exception& e) {
    throw input_error(filename + ": " + e.what());
  }

  for (const auto& [key, v] : kv)
    if (!used.count(key))
      throw input_error(where(key, v.second) + ": field not valid for family '" + family +
                        "'");

  if (kv.count("ell")) {
    const auto [v, ln] = kv["ell"];
    const auto nums = parse_numbers(v, where("ell", ln));
    if (static_cast<int>(nums.size()) != dim * dim)
      throw input_error(where("ell", ln) + ": expected " + std::to_string(dim * dim) +
                        " entries (row-major)");
    Eigen::MatrixXd m(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) m(r, c) = nums[r * dim + c];
    try {
      spec = spec.with_ell(m);
    } catch (const input_error& e) {
      throw input_error(where("ell", ln) + ": " + e.what());
    }
  }
  return spec;
}

BodySpec load_body_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open body spec file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_body_spec(ss.str(), path);
}

std::string serialize_body_spec(const BodySpec& spec) {
  std::ostringstream out;
  out << "dim = " << spec.dim << "\n";
  std::visit(
      [&](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Ball>) {
          out << "family = ball\nradius = " << fmt(fam.radius) << "\n";
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          out << "family = ellipsoid\naxes =";
          for (int i = 0; i < fam.semi_axes.size(); ++i) out << " " << fmt(fam.semi_axes[i]);
          out << "\n";
        } else if constexpr (std::is_same_v<T, LpBall>) {
          out << "family = lp-ball\nexponent = " << fmt(fam.exponent)
              << "\nscale = " << fmt(fam.scale) << "\n";
        } else {
          out << "family = harmonic\nradius = " << fmt(fam.base_radius) << "\n";
          for (const auto& [k, c] : fam.modes) out << "mode = " << k << " " << fmt(c) << "\n";
        }
      },
      spec.family);
  if (spec.ell) {
    out << "ell =";
    for (int r = 0; r < spec.dim; ++r)
      for (int c = 0; c < spec.dim; ++c) out << " " << fmt((*spec.ell)(r, c));
    out << "\n";
  }
  return out.str();
}

}  // namespace hbm
