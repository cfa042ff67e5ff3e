#include "srvol/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "srvol/connection.hpp"
#include "srvol/errors.hpp"
#include "srvol/heisenberg.hpp"
#include "srvol/polyexpr.hpp"

namespace srvol {
namespace {

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

[[noreturn]] void fail_at(const std::string& name, int line,
                          const std::string& msg) {
  throw ConfigError(name + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops everything from the first '#' that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool in_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quote = !in_quote;
    else if (line[i] == '#' && !in_quote) return line.substr(0, i);
  }
  return line;
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(key[0])) && key[0] != '_')
    return false;
  for (char ch : key)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_')
      return false;
  return true;
}

// A raw right-hand side: either one scalar token or a bracketed list of
// scalar tokens.  Tokens keep no quotes; `quoted` records whether they had
// them (so numbers can reject quoted input and strings can contain commas).
struct RawValue {
  bool is_list = false;
  std::vector<std::string> items;
  std::vector<bool> quoted;
};

// Parses one scalar token starting at s[i]; advances i past it.
std::string scan_token(const std::string& s, std::size_t& i, bool& quoted,
                       const std::string& name, int line,
                       bool stop_at_comma) {
  quoted = false;
  if (i < s.size() && s[i] == '"') {
    quoted = true;
    std::size_t close = s.find('"', i + 1);
    if (close == std::string::npos)
      fail_at(name, line, "unterminated quoted string");
    std::string tok = s.substr(i + 1, close - i - 1);
    i = close + 1;
    return tok;
  }
  std::size_t end = i;
  while (end < s.size() && s[end] != ']' && (!stop_at_comma || s[end] != ','))
    ++end;
  std::string tok = trim(s.substr(i, end - i));
  i = end;
  return tok;
}

RawValue parse_raw_value(const std::string& rhs, const std::string& name,
                         int line) {
  RawValue v;
  std::string s = trim(rhs);
  if (s.empty()) fail_at(name, line, "missing value after '='");
  if (s.front() != '[') {
    std::size_t i = 0;
    bool quoted = false;
    std::string tok = scan_token(s, i, quoted, name, line, false);
    if (trim(s.substr(i)) != "")
      fail_at(name, line, "unexpected text after value: '" + trim(s.substr(i)) + "'");
    v.items.push_back(tok);
    v.quoted.push_back(quoted);
    return v;
  }
  v.is_list = true;
  if (s.back() != ']') fail_at(name, line, "unterminated list (missing ']')");
  std::string body = s.substr(1, s.size() - 2);
  if (trim(body).empty()) return v;  // empty list
  std::size_t i = 0;
  for (;;) {
    while (i < body.size() &&
           std::isspace(static_cast<unsigned char>(body[i])))
      ++i;
    bool quoted = false;
    std::string tok = scan_token(body, i, quoted, name, line, true);
    if (!quoted && tok.empty())
      fail_at(name, line, "empty list element");
    v.items.push_back(tok);
    v.quoted.push_back(quoted);
    while (i < body.size() &&
           std::isspace(static_cast<unsigned char>(body[i])))
      ++i;
    if (i == body.size()) break;
    if (body[i] != ',')
      fail_at(name, line, std::string("expected ',' in list, found '") +
                              body[i] + "'");
    ++i;
    if (trim(body.substr(i)).empty())
      fail_at(name, line, "trailing ',' in list");
  }
  return v;
}

double parse_number(const std::string& tok, const std::string& name,
                    int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    if (!std::isfinite(v))
      fail_at(name, line, "non-finite number '" + tok + "'");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail_at(name, line, "expected a number, found '" + tok + "'");
  }
}

int parse_count(const std::string& tok, const std::string& name, int line) {
  double v = parse_number(tok, name, line);
  if (v != std::nearbyint(v) || v < 0 || v > 1e9)
    fail_at(name, line, "expected a small non-negative integer, found '" +
                            tok + "'");
  return static_cast<int>(v);
}

void expect_scalar(const RawValue& v, const std::string& key,
                   const std::string& name, int line) {
  if (v.is_list)
    fail_at(name, line, "key '" + key + "' takes a single value, not a list");
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& name) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      fail_at(name, line, "expected 'key = value', found '" + s + "'");
    std::string key = trim(s.substr(0, eq));
    if (!valid_key(key)) fail_at(name, line, "invalid key '" + key + "'");
    if (!seen.insert(key).second)
      fail_at(name, line, "duplicate key '" + key + "'");
    RawValue v = parse_raw_value(s.substr(eq + 1), name, line);

    if (key == "command" || key == "family" || key == "beta" ||
        key == "gamma" || key == "out" || key == "format") {
      expect_scalar(v, key, name, line);
      const std::string& tok = v.items[0];
      if (key == "command") cfg.command = tok;
      else if (key == "family") cfg.family = tok;
      else if (key == "beta") cfg.beta = tok;
      else if (key == "gamma") cfg.gamma = tok;
      else if (key == "out") cfg.out = tok;
      else cfg.format = tok;
    } else if (key == "x1" || key == "x2") {
      if (!v.is_list || v.items.size() != 3)
        fail_at(name, line,
                "key '" + key + "' takes a list of exactly 3 components");
      auto& dst = (key == "x1") ? cfg.x1 : cfg.x2;
      for (int i = 0; i < 3; ++i) dst[i] = v.items[i];
    } else if (key == "eps") {
      if (!v.is_list)
        fail_at(name, line, "key 'eps' takes a list of radii");
      cfg.eps_list.clear();
      for (const auto& tok : v.items)
        cfg.eps_list.push_back(parse_number(tok, name, line));
    } else if (key == "quad") {
      if (!v.is_list || v.items.size() != 3)
        fail_at(name, line,
                "key 'quad' takes a list [n_rho, n_theta, n_w] of 3 counts");
      cfg.quad.n_rho = parse_count(v.items[0], name, line);
      cfg.quad.n_theta = parse_count(v.items[1], name, line);
      cfg.quad.n_w = parse_count(v.items[2], name, line);
    } else if (key == "tol") {
      expect_scalar(v, key, name, line);
      cfg.quad.tol_ode = parse_number(v.items[0], name, line);
    } else if (key == "seed") {
      expect_scalar(v, key, name, line);
      double v0 = parse_number(v.items[0], name, line);
      if (v0 != std::nearbyint(v0) || v0 < 0 || v0 > 4294967295.0)
        fail_at(name, line, "seed must be an integer in [0, 2^32)");
      cfg.seed = static_cast<unsigned>(v0);
    } else {
      fail_at(name, line, "unknown key '" + key + "'");
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void validate(const RunConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (cfg.family != "heisenberg" && cfg.family != "normal_form" &&
      cfg.family != "frame")
    fail("unknown family '" + cfg.family +
         "' (expected heisenberg, normal_form, or frame)");
  if (cfg.family == "frame") {
    for (const auto* triple : {&cfg.x1, &cfg.x2})
      for (const auto& comp : *triple)
        if (trim(comp).empty())
          fail("family 'frame' needs all 3 components of both x1 and x2");
  }
  if (cfg.eps_list.empty()) fail("eps ladder must not be empty");
  for (double e : cfg.eps_list)
    if (!(e > 0.0) || e > 0.3)
      fail("eps values must lie in (0, 0.3], got " + fmt12(e));
  for (std::size_t i = 1; i < cfg.eps_list.size(); ++i)
    if (!(cfg.eps_list[i] < cfg.eps_list[i - 1]))
      fail("eps ladder must be strictly decreasing");
  if (cfg.quad.n_rho < 4 || cfg.quad.n_theta < 4 || cfg.quad.n_w < 4)
    fail("quadrature counts must all be at least 4");
  if (cfg.quad.n_theta % 2 != 0) fail("n_theta must be even");
  if (!(cfg.quad.tol_ode >= 1e-13) || !(cfg.quad.tol_ode <= 1e-6))
    fail("tol must lie in [1e-13, 1e-6], got " + fmt12(cfg.quad.tol_ode));
  if (cfg.format != "csv" && cfg.format != "json")
    fail("unknown format '" + cfg.format + "' (expected csv or json)");
  if (!cfg.command.empty() && cfg.command != "invariants" &&
      cfg.command != "ball-volume" && cfg.command != "fit" &&
      cfg.command != "verify")
    fail("unknown command '" + cfg.command +
         "' (expected invariants, ball-volume, fit, or verify)");
}

ContactStructure build_structure(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.family == "heisenberg") return derive(heisenberg_frame());
  if (cfg.family == "normal_form") {
    NormalFormSpec spec{parse_poly(cfg.beta), parse_poly(cfg.gamma)};
    return derive(build_normal_frame(spec));
  }
  auto field = [](const std::array<std::string, 3>& comp) {
    return RationalField3(RationalFn(parse_poly(comp[0])),
                          RationalFn(parse_poly(comp[1])),
                          RationalFn(parse_poly(comp[2])));
  };
  return derive(FrameField(field(cfg.x1), field(cfg.x2)));
}

std::string cmd_invariants(const RunConfig& cfg) {
  const ContactStructure s = build_structure(cfg);
  const Point3 origin{0.0, 0.0, 0.0};
  const double chi = chi_at(s, origin);
  const double kappa = kappa_at(s, origin);
  const double psi = popp_density(s, origin);
  const double resid = verify_sec_identity(s, origin);
  if (cfg.format == "json") {
    nlohmann::json j;
    j["chi"] = chi;
    j["kappa"] = kappa;
    j["popp_density"] = psi;
    j["sec_residual"] = resid;
    return j.dump(2) + "\n";
  }
  std::string out;
  out += "chi = " + fmt12(chi) + "\n";
  out += "kappa = " + fmt12(kappa) + "\n";
  out += "popp_density = " + fmt12(psi) + "\n";
  out += "sec_residual = " + fmt12(resid) + "\n";
  return out;
}

namespace {

// Commas and newlines inside an error message would break the CSV shape.
std::string sanitize_status(std::string msg) {
  for (char& ch : msg)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return msg;
}

}  // namespace

std::string cmd_ball_volume(const RunConfig& cfg) {
  const ContactStructure s = build_structure(cfg);
  const double kappa0 = kappa_at(s, {0.0, 0.0, 0.0});
  struct Row {
    double eps = 0.0;
    double volume = 0.0;
    double prediction = 0.0;
    bool ok = false;
    std::string status;
  };
  std::vector<Row> rows;
  for (double eps : cfg.eps_list) {
    Row row;
    row.eps = eps;
    row.prediction = c0() * (1.0 - c1() * kappa0 * eps * eps);
    try {
      row.volume = ball_volume(s, eps, cfg.quad);
      row.ok = true;
      row.status = "ok";
    } catch (const Error& e) {
      row.status = "error: " + sanitize_status(e.what());
    }
    rows.push_back(row);
  }
  if (cfg.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const Row& row : rows) {
      nlohmann::json j;
      j["eps"] = row.eps;
      j["status"] = row.status;
      j["prediction"] = row.prediction;
      if (row.ok) {
        const double e4 = row.eps * row.eps * row.eps * row.eps;
        j["volume"] = row.volume;
        j["volume_over_eps4"] = row.volume / e4;
        j["rel_deviation"] = row.volume / e4 / row.prediction - 1.0;
      } else {
        j["volume"] = nullptr;
        j["volume_over_eps4"] = nullptr;
        j["rel_deviation"] = nullptr;
      }
      arr.push_back(j);
    }
    return arr.dump(2) + "\n";
  }
  std::string out = "eps,volume,volume_over_eps4,prediction,rel_deviation,status\n";
  for (const Row& row : rows) {
    out += fmt12(row.eps) + ",";
    if (row.ok) {
      const double e4 = row.eps * row.eps * row.eps * row.eps;
      out += fmt12(row.volume) + "," + fmt12(row.volume / e4) + "," +
             fmt12(row.prediction) + "," +
             fmt12(row.volume / e4 / row.prediction - 1.0) + ",";
    } else {
      out += ",," + fmt12(row.prediction) + ",,";
    }
    out += row.status + "\n";
  }
  return out;
}

std::string cmd_fit(const RunConfig& cfg) {
  const ContactStructure s = build_structure(cfg);
  ExpansionReport report = fit_expansion(s, cfg.eps_list, cfg.quad);
  if (cfg.format == "json") return expansion_to_json(report) + "\n";
  return expansion_to_csv(report);
}

}  // namespace srvol
