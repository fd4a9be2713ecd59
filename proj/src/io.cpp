#include "citefit/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace citefit {

namespace {

using nlohmann::json;

[[noreturn]] void fail_line(const std::string& name, std::size_t line_no, const std::string& what) {
  throw ParseError(name + ":" + std::to_string(line_no) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::int64_t parse_int(std::string_view tok, const std::string& name, std::size_t line_no) {
  tok = trim(tok);
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || end != tok.data() + tok.size() || tok.empty()) {
    fail_line(name, line_no, "expected an integer, got \"" + std::string(tok) + "\"");
  }
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json model_to_json_obj(const ModelSpec& m) {
  json j;
  j["family"] = family_name(family_of(m));
  j["M"] = n_components(m);
  json params = json::array();
  if (const auto* we = std::get_if<WEMixtureParams>(&m)) {
    for (const auto& c : we->components) {
      params.push_back({{"c", c.c}, {"mu", c.wald.mu}, {"lambda", c.wald.lambda}});
    }
  } else if (const auto* lo = std::get_if<LomaxMixtureParams>(&m)) {
    for (const auto& c : lo->components) {
      params.push_back({{"c", c.c}, {"b", c.b}, {"v", c.v}});
    }
  } else {
    const auto& pl = std::get<PowerLawParams>(m);
    for (const auto& c : pl.components) params.push_back({{"c", c.c}, {"gamma", c.gamma}});
    j["kmax"] = pl.kmax;
  }
  j["params"] = params;
  return j;
}

ModelSpec model_from_json_obj(const json& j) {
  const ModelFamily fam = family_from_name(j.at("family").get<std::string>());
  const auto& params = j.at("params");
  if (!params.is_array() || params.empty()) throw ParseError("model json: params must be a list");
  ModelSpec m;
  if (fam == ModelFamily::we) {
    WEMixtureParams p;
    for (const auto& e : params) {
      p.components.push_back(
          {e.at("c").get<double>(), {e.at("mu").get<double>(), e.at("lambda").get<double>()}});
    }
    m = p;
  } else if (fam == ModelFamily::lomax) {
    LomaxMixtureParams p;
    for (const auto& e : params) {
      p.components.push_back({e.at("c").get<double>(), e.at("b").get<double>(),
                              e.at("v").get<double>()});
    }
    m = p;
  } else {
    PowerLawParams p;
    p.kmax = j.value("kmax", std::int64_t{0});
    for (const auto& e : params) {
      p.components.push_back({e.at("c").get<double>(), e.at("gamma").get<double>()});
    }
    m = p;
  }
  if (j.contains("M") && j.at("M").get<int>() != n_components(m)) {
    throw ParseError("model json: M does not match the params list");
  }
  validate_model(m);
  return m;
}

double json_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<double>();
}

}  // namespace

const char* family_name(ModelFamily f) {
  switch (f) {
    case ModelFamily::we: return "we";
    case ModelFamily::lomax: return "lomax";
    case ModelFamily::powerlaw: return "powerlaw";
  }
  return "unknown";
}

ModelFamily family_from_name(const std::string& name) {
  if (name == "we") return ModelFamily::we;
  if (name == "lomax") return ModelFamily::lomax;
  if (name == "powerlaw") return ModelFamily::powerlaw;
  throw ParseError("unknown model family \"" + name + "\" (expected we, lomax, or powerlaw)");
}

Histogram ingest_stream(std::istream& in, CountsFormat format, int k_shift,
                        const std::string& name) {
  Histogram h;
  h.k_shift = k_shift;
  std::set<std::int64_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;

    if (format == CountsFormat::raw) {
      const std::int64_t c = parse_int(body, name, line_no);
      if (c < 0) fail_line(name, line_no, "negative count");
      const std::int64_t k = c + k_shift;
      if (k < 1) fail_line(name, line_no, "count maps below 1 after shift; raise k_shift");
      h.n_raw_zeros += c == 0;
      h.add(k);
      continue;
    }

    const auto comma = body.find(',');
    if (comma == std::string_view::npos) {
      fail_line(name, line_no, "expected \"count,frequency\"");
    }
    const std::int64_t c = parse_int(body.substr(0, comma), name, line_no);
    const std::int64_t freq = parse_int(body.substr(comma + 1), name, line_no);
    if (c < 0) fail_line(name, line_no, "negative count");
    if (freq < 0) fail_line(name, line_no, "negative frequency");
    if (!seen.insert(c).second) {
      fail_line(name, line_no, "duplicate histogram key " + std::to_string(c));
    }
    const std::int64_t k = c + k_shift;
    if (k < 1) fail_line(name, line_no, "count maps below 1 after shift; raise k_shift");
    if (c == 0) h.n_raw_zeros += freq;
    h.add(k, freq);
  }
  return h;
}

Histogram ingest_file(const std::string& path, CountsFormat format, int k_shift) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return ingest_stream(in, format, k_shift, path);
}

void write_samples(const std::string& path, std::span<const std::int64_t> ks, int k_shift) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  for (std::int64_t k : ks) out << (k - k_shift) << '\n';
  if (!out) throw ParseError("failed writing " + path);
}

std::string fit_result_to_json(const FitResult& r) {
  json j = model_to_json_obj(r.model);
  j["schema_version"] = 1;
  j["loglik"] = r.loglik;
  j["aic"] = r.aic;
  j["n_free_params"] = r.n_free_params;
  j["converged"] = r.converged;
  j["n_restarts_used"] = r.n_restarts_used;
  j["best_restart_seed"] = r.best_restart_seed;
  j["seed"] = r.seed;
  j["n_obs"] = r.n_obs;
  j["k_shift"] = r.k_shift;
  j["chi2"] = r.chi2;  // non-finite values serialize as null
  j["dof"] = r.dof;
  j["p_value"] = r.p_value;
  return j.dump(2) + "\n";
}

FitResult fit_result_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    FitResult r;
    r.model = model_from_json_obj(j);
    r.loglik = json_number(j, "loglik", -std::numeric_limits<double>::infinity());
    r.aic = json_number(j, "aic", std::numeric_limits<double>::infinity());
    r.n_free_params = j.at("n_free_params").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.n_restarts_used = j.value("n_restarts_used", 0);
    r.best_restart_seed = j.value("best_restart_seed", std::uint64_t{0});
    r.seed = j.value("seed", std::uint64_t{0});
    r.n_obs = j.value("n_obs", std::int64_t{0});
    r.k_shift = j.value("k_shift", 1);
    r.chi2 = json_number(j, "chi2", std::numeric_limits<double>::quiet_NaN());
    r.dof = j.value("dof", -1);
    r.p_value = json_number(j, "p_value", std::numeric_limits<double>::quiet_NaN());
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("fit json: ") + e.what());
  }
}

ModelSpec model_from_json(const std::string& text) {
  try {
    return model_from_json_obj(json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(std::string("model json: ") + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw ParseError("failed writing " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_curve_csv(const std::string& path, const CurveSeries& s, const std::string& x_name,
                     const std::string& y_name) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << x_name << ',' << y_name << '\n';
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    out << format_double(s.x[i]) << ',' << format_double(s.y[i]) << '\n';
  }
  if (!out) throw ParseError("failed writing " + path);
}

void write_table_csv(const std::string& path, const std::string& x_name,
                     std::span<const double> x, std::span<const std::string> names,
                     std::span<const CurveSeries> series) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << x_name;
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << format_double(x[i]);
    for (const auto& s : series) out << ',' << format_double(s.y[i]);
    out << '\n';
  }
  if (!out) throw ParseError("failed writing " + path);
}

std::string comparison_to_csv(std::span<const ComparisonRow> rows) {
  std::string s = "family,m,n_params,loglik,aic,delta_aic,p_value\n";
  for (const auto& r : rows) {
    s += family_name(r.family);
    s += ',' + std::to_string(r.m) + ',' + std::to_string(r.n_params) + ',';
    s += format_double(r.loglik) + ',' + format_double(r.aic) + ',';
    s += format_double(r.delta_aic) + ',' + format_double(r.p_value) + '\n';
  }
  return s;
}

std::string comparison_to_json(std::span<const ComparisonRow> rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"family", family_name(r.family)},
                   {"m", r.m},
                   {"n_params", r.n_params},
                   {"loglik", r.loglik},
                   {"aic", r.aic},
                   {"delta_aic", r.delta_aic},
                   {"p_value", r.p_value}});
  }
  const json j{{"schema_version", 1}, {"rows", arr}};
  return j.dump(2) + "\n";
}

}  // namespace citefit
