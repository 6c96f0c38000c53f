#include "jminv/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace jminv {

void RunConfig::validate() const {
  cs.validate();
  if (!(k0 * k0 > cs.delta)) throw InputError("config: k0 must exceed sqrt(delta)");
  if (iter.max_iter < 0) throw InputError("config: max_iter must be >= 0");
  if (!(iter.tol > 0)) throw InputError("config: tol must be > 0");
  if (iter.quad.nodes < 2 || iter.quad.panels < 1) throw InputError("config: bad quadrature size");
  if (iter.scan.points < 10) throw InputError("config: scan_points must be >= 10");
  if (!(k_min > 0) || !(k_max > k_min) || k_points < 2) throw InputError("config: bad k grid");
  if (output_dir.empty()) throw InputError("config: output_dir must not be empty");
}

const std::vector<std::pair<std::string, KeyKind>>& config_keys() {
  static const std::vector<std::pair<std::string, KeyKind>> keys = {
      {"ell1", KeyKind::Int},          {"ell2", KeyKind::Int},
      {"delta", KeyKind::Double},      {"rho", KeyKind::Double},
      {"N", KeyKind::Int},             {"k0", KeyKind::Double},
      {"a", KeyKind::Double},          {"b", KeyKind::Double},
      {"x", KeyKind::Double},          {"data_file", KeyKind::String},
      {"max_iter", KeyKind::Int},      {"tol", KeyKind::Double},
      {"quad_nodes", KeyKind::Int},    {"quad_panels", KeyKind::Int},
      {"scan_points", KeyKind::Int},   {"check_quadrature", KeyKind::Bool},
      {"kappa_max", KeyKind::Double},  {"k_min", KeyKind::Double},
      {"k_max", KeyKind::Double},      {"k_points", KeyKind::Int},
      {"output_dir", KeyKind::String},
  };
  return keys;
}

namespace {

KeyKind kind_of(const std::string& key) {
  for (const auto& [k, kind] : config_keys())
    if (k == key) return kind;
  throw InputError("config: unknown key '" + key + "'");
}

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw InputError("config: key '" + key + "' has the wrong type");
  }
}

}  // namespace

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InputError("config: top level must be an object");
  RunConfig c;
  for (const auto& [key, v] : j.items()) {
    const KeyKind kind = kind_of(key);
    if ((kind == KeyKind::Int && !v.is_number_integer()) ||
        (kind == KeyKind::Double && !v.is_number()) || (kind == KeyKind::String && !v.is_string()) ||
        (kind == KeyKind::Bool && !v.is_boolean()))
      throw InputError("config: key '" + key + "' has the wrong type");
    if (key == "ell1") c.cs.ell1 = get_as<int>(v, key);
    else if (key == "ell2") c.cs.ell2 = get_as<int>(v, key);
    else if (key == "delta") c.cs.delta = get_as<double>(v, key);
    else if (key == "rho") c.cs.rho = get_as<double>(v, key);
    else if (key == "N") c.cs.N = get_as<int>(v, key);
    else if (key == "k0") c.k0 = get_as<double>(v, key);
    else if (key == "a") c.model.a = get_as<double>(v, key);
    else if (key == "b") c.model.b = get_as<double>(v, key);
    else if (key == "x") c.model.x = get_as<double>(v, key);
    else if (key == "data_file") c.data_file = get_as<std::string>(v, key);
    else if (key == "max_iter") c.iter.max_iter = get_as<int>(v, key);
    else if (key == "tol") c.iter.tol = get_as<double>(v, key);
    else if (key == "quad_nodes") c.iter.quad.nodes = get_as<int>(v, key);
    else if (key == "quad_panels") c.iter.quad.panels = get_as<int>(v, key);
    else if (key == "scan_points") c.iter.scan.points = get_as<int>(v, key);
    else if (key == "check_quadrature") c.iter.check_quadrature = get_as<bool>(v, key);
    else if (key == "kappa_max") c.kappa_max = get_as<double>(v, key);
    else if (key == "k_min") c.k_min = get_as<double>(v, key);
    else if (key == "k_max") c.k_max = get_as<double>(v, key);
    else if (key == "k_points") c.k_points = get_as<int>(v, key);
    else if (key == "output_dir") c.output_dir = get_as<std::string>(v, key);
  }
  c.model.delta = c.cs.delta;
  return c;
}

json config_to_json(const RunConfig& c) {
  json j = {{"ell1", c.cs.ell1},       {"ell2", c.cs.ell2},
            {"delta", c.cs.delta},     {"rho", c.cs.rho},
            {"N", c.cs.N},             {"k0", c.k0},
            {"a", c.model.a},          {"b", c.model.b},
            {"x", c.model.x},          {"max_iter", c.iter.max_iter},
            {"tol", c.iter.tol},       {"quad_nodes", c.iter.quad.nodes},
            {"quad_panels", c.iter.quad.panels}, {"scan_points", c.iter.scan.points},
            {"check_quadrature", c.iter.check_quadrature}, {"kappa_max", c.kappa_max},
            {"k_min", c.k_min},        {"k_max", c.k_max},
            {"k_points", c.k_points},  {"output_dir", c.output_dir}};
  if (!c.data_file.empty()) j["data_file"] = c.data_file;
  return j;
}

json parse_flag_value(const std::string& key, const std::string& text) {
  const KeyKind kind = kind_of(key);
  try {
    std::size_t pos = 0;
    switch (kind) {
      case KeyKind::Int: {
        const long v = std::stol(text, &pos);
        if (pos != text.size()) break;
        return static_cast<int>(v);
      }
      case KeyKind::Double: {
        const double v = std::stod(text, &pos);
        if (pos != text.size()) break;
        return v;
      }
      case KeyKind::Bool:
        if (text == "true" || text == "1") return true;
        if (text == "false" || text == "0") return false;
        break;
      case KeyKind::String:
        return text;
    }
  } catch (const std::exception&) {
  }
  throw InputError("flag --" + key + ": cannot parse '" + text + "'");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("cannot parse '" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("write failed for '" + path + "'");
}

std::unique_ptr<SMatrixProvider> make_provider(const RunConfig& c) {
  if (!c.data_file.empty()) return read_tabulated(c.data_file, c.cs);
  AnalyticModelParams p = c.model;
  p.delta = c.cs.delta;
  return std::make_unique<AnalyticModel>(p, c.cs);
}

namespace {

double num(const json& rec, const char* key, bool required = true) {
  auto it = rec.find(key);
  if (it == rec.end()) {
    if (required) throw InputError(std::string("data file: missing field '") + key + "'");
    return std::nan("");
  }
  if (!it->is_number()) throw InputError(std::string("data file: field '") + key + "' is not a number");
  return it->get<double>();
}

}  // namespace

std::unique_ptr<TabulatedProvider> read_tabulated(const std::string& path, const ChannelSet& cs) {
  const json j = read_json_file(path);
  if (!j.contains("samples") || !j["samples"].is_array())
    throw InputError("data file: missing 'samples' array");
  std::vector<SMatrixSample> samples;
  for (const auto& r : j["samples"]) {
    SMatrixSample s;
    s.k = num(r, "k");
    s.s(0, 0) = {num(r, "s11_re"), num(r, "s11_im")};
    s.s(0, 1) = {num(r, "s12_re"), num(r, "s12_im")};
    s.s(1, 1) = {num(r, "s22_re"), num(r, "s22_im")};
    const double r21 = num(r, "s21_re", false), i21 = num(r, "s21_im", false);
    s.s(1, 0) = std::isnan(r21) ? s.s(0, 1) : cplx(r21, std::isnan(i21) ? 0.0 : i21);
    samples.push_back(s);
  }
  std::vector<BoundStateData> bound;
  if (j.contains("bound_states")) {
    for (const auto& b : j["bound_states"]) {
      const double kap = num(b, "kappa");
      bound.push_back(make_bound_state(cs, kap, cplx(0, num(b, "res11_im")), cplx(0, num(b, "res12_im"))));
    }
  }
  return std::make_unique<TabulatedProvider>(std::move(samples), std::move(bound));
}

json tabulated_to_json(const std::vector<SMatrixSample>& samples,
                       const std::vector<BoundStateData>& bound) {
  json j;
  j["samples"] = json::array();
  for (const auto& s : samples)
    j["samples"].push_back({{"k", s.k},
                            {"s11_re", s.s(0, 0).real()}, {"s11_im", s.s(0, 0).imag()},
                            {"s12_re", s.s(0, 1).real()}, {"s12_im", s.s(0, 1).imag()},
                            {"s21_re", s.s(1, 0).real()}, {"s21_im", s.s(1, 0).imag()},
                            {"s22_re", s.s(1, 1).real()}, {"s22_im", s.s(1, 1).imag()}});
  j["bound_states"] = json::array();
  for (const auto& b : bound)
    j["bound_states"].push_back(
        {{"kappa", b.kappa}, {"res11_im", b.res11.imag()}, {"res12_im", b.res12.imag()}});
  return j;
}

namespace {

json vec_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vec_from(const json& j, const char* key, int n) {
  if (!j.contains(key) || !j[key].is_array()) throw InputError(std::string("hamiltonian: missing '") + key + "'");
  std::vector<double> v;
  try {
    v = j[key].get<std::vector<double>>();
  } catch (const json::exception&) {
    throw InputError(std::string("hamiltonian: '") + key + "' must be numbers");
  }
  if (static_cast<int>(v.size()) != n) throw InputError(std::string("hamiltonian: '") + key + "' must have N entries");
  return Eigen::Map<Eigen::VectorXd>(v.data(), n);
}

}  // namespace

json hamiltonian_to_json(const QuasiTridiagonalHamiltonian& h) {
  return {{"ell1", h.cs.ell1}, {"ell2", h.cs.ell2}, {"delta", h.cs.delta}, {"rho", h.cs.rho},
          {"N", h.cs.N},       {"a1", vec_json(h.a1)}, {"b1", vec_json(h.b1)},
          {"a2", vec_json(h.a2)}, {"b2", vec_json(h.b2)}, {"u", vec_json(h.u)},
          {"v", vec_json(h.v)}};
}

QuasiTridiagonalHamiltonian hamiltonian_from_json(const json& j) {
  if (!j.is_object()) throw InputError("hamiltonian: top level must be an object");
  ChannelSet cs;
  try {
    cs.ell1 = j.value("ell1", 0);
    cs.ell2 = j.value("ell2", 0);
    cs.delta = j.at("delta").get<double>();
    cs.rho = j.at("rho").get<double>();
    cs.N = j.at("N").get<int>();
  } catch (const json::exception& e) {
    throw InputError(std::string("hamiltonian: ") + e.what());
  }
  cs.validate();
  QuasiTridiagonalHamiltonian h;
  h.cs = cs;
  h.a1 = vec_from(j, "a1", cs.N);
  h.b1 = vec_from(j, "b1", cs.N);
  h.a2 = vec_from(j, "a2", cs.N);
  h.b2 = vec_from(j, "b2", cs.N);
  h.u = vec_from(j, "u", cs.N);
  h.v = vec_from(j, "v", cs.N);
  h.validate();
  return h;
}

json triplets_to_json(const std::vector<SpectralTriplet>& tr, const std::vector<std::string>& region) {
  std::vector<double> l, a, b;
  for (const auto& t : tr) {
    l.push_back(t.lambda);
    a.push_back(t.zN);
    b.push_back(t.zNN);
  }
  json j = {{"lambda", l}, {"zN", a}, {"zNN", b}};
  if (!region.empty()) j["region"] = region;
  return j;
}

std::string fmt(double v) {
  if (v == 0) return "0";  // avoid "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << (std::isnan(r[i]) ? "" : fmt(r[i]));
    os << "\n";
  }
  return os.str();
}

}  // namespace jminv
