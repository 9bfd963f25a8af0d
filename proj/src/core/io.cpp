#include "obsdict/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "obsdict/dynamics.hpp"
#include "obsdict/errors.hpp"
#include "obsdict/format.hpp"

namespace obsdict {

using nlohmann::json;

namespace {

std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

const json& member(const json& obj, const std::string& ptr, const std::string& key) {
  if (!obj.is_object()) throw SchemaError(ptr, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(child(ptr, key), "missing required field");
  return *it;
}

const json* optional_member(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double number(const json& v, const std::string& ptr) {
  if (!v.is_number()) throw SchemaError(ptr, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError(ptr, "number is not finite");
  return x;
}

long integer(const json& v, const std::string& ptr) {
  if (!v.is_number_integer()) throw SchemaError(ptr, "expected an integer");
  return v.get<long>();
}

Complex complex_value(const json& v, const std::string& ptr) {
  if (v.is_number()) return {number(v, ptr), 0.0};
  if (v.is_array() && v.size() == 2)
    return {number(v[0], child(ptr, 0)), number(v[1], child(ptr, 1))};
  throw SchemaError(ptr, "expected a complex number [re, im]");
}

const json& array_of(const json& v, const std::string& ptr, std::optional<std::size_t> len) {
  if (!v.is_array()) throw SchemaError(ptr, "expected an array");
  if (len && v.size() != *len)
    throw SchemaError(ptr, "expected length " + std::to_string(*len) + ", got " +
                               std::to_string(v.size()));
  return v;
}

Vector complex_vector(const json& v, const std::string& ptr, std::size_t len) {
  array_of(v, ptr, len);
  Vector out(static_cast<Eigen::Index>(len));
  for (std::size_t i = 0; i < len; ++i) out(static_cast<Eigen::Index>(i)) = complex_value(v[i], child(ptr, i));
  return out;
}

Matrix complex_matrix(const json& v, const std::string& ptr, std::size_t rows,
                      std::optional<std::size_t> cols) {
  array_of(v, ptr, rows);
  if (!cols) {
    if (rows == 0 || !v[0].is_array()) throw SchemaError(child(ptr, 0), "expected a row array");
    cols = v[0].size();
    if (*cols == 0) throw SchemaError(child(ptr, 0), "rows must be non-empty");
  }
  Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(*cols));
  for (std::size_t i = 0; i < rows; ++i)
    out.row(static_cast<Eigen::Index>(i)) = complex_vector(v[i], child(ptr, i), *cols).transpose();
  return out;
}

std::vector<double> real_list(const json& v, const std::string& ptr, std::optional<std::size_t> len) {
  array_of(v, ptr, len);
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], child(ptr, i)));
  return out;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

// Re-raises type-construction failures as InvariantError at `ptr`.
template <typename F>
auto at_location(const std::string& ptr, F&& make) {
  try {
    return make();
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw InvariantError((ptr.empty() ? std::string("/") : ptr) + ": " + e.what());
  }
}

Dynamics load_dynamics(const json& op, std::size_t dim) {
  const std::string ptr = "/operator";
  const json& kind_v = member(op, ptr, "kind");
  if (!kind_v.is_string()) throw SchemaError(child(ptr, "kind"), "expected a string");
  const std::string kind = kind_v.get<std::string>();
  if (kind == "dense") {
    const Matrix entries = complex_matrix(member(op, ptr, "entries"), child(ptr, "entries"), dim, dim);
    return at_location(ptr, [&] { return Dynamics(Operator(entries)); });
  }
  if (kind == "diagonal") {
    const std::vector<double> re = real_list(member(op, ptr, "mu_re"), child(ptr, "mu_re"), dim);
    std::vector<double> im(dim, 0.0);
    if (const json* v = optional_member(op, "mu_im")) im = real_list(*v, child(ptr, "mu_im"), dim);
    std::vector<Complex> mu(dim);
    for (std::size_t i = 0; i < dim; ++i) mu[i] = {re[i], im[i]};
    std::optional<Matrix> basis;
    if (const json* v = optional_member(op, "basis"))
      basis = complex_matrix(*v, child(ptr, "basis"), dim, dim);
    return at_location(ptr, [&] { return Dynamics(DiagonalizableSystem(Spectrum(mu), basis)); });
  }
  throw SchemaError(child(ptr, "kind"), "expected \"dense\" or \"diagonal\"");
}

TimeDomain load_time(const json& t) {
  const std::string ptr = "/time";
  const json& kind_v = member(t, ptr, "kind");
  if (!kind_v.is_string()) throw SchemaError(child(ptr, "kind"), "expected a string");
  const std::string kind = kind_v.get<std::string>();
  auto opt_int = [&](const char* key, long fallback) {
    const json* v = optional_member(t, key);
    return v ? integer(*v, child(ptr, key)) : fallback;
  };
  auto opt_num = [&](const char* key, double fallback) {
    const json* v = optional_member(t, key);
    return v ? number(*v, child(ptr, key)) : fallback;
  };
  TimeDomain time;
  if (kind == "discrete_finite") {
    time = DiscreteFinite{integer(member(t, ptr, "gamma"), child(ptr, "gamma"))};
  } else if (kind == "discrete_infinite") {
    time = DiscreteInfinite{integer(member(t, ptr, "truncation"), child(ptr, "truncation")),
                            opt_num("tail_tol", 1e-12)};
  } else if (kind == "continuous_finite") {
    time = ContinuousFinite{number(member(t, ptr, "tau"), child(ptr, "tau")),
                            static_cast<int>(opt_int("panels", 8)),
                            static_cast<int>(opt_int("nodes_per_panel", 8))};
  } else if (kind == "continuous_infinite") {
    time = ContinuousInfinite{number(member(t, ptr, "horizon"), child(ptr, "horizon")),
                              static_cast<int>(opt_int("panels", 8)),
                              static_cast<int>(opt_int("nodes_per_panel", 8)),
                              opt_num("tail_tol", 1e-12)};
  } else {
    throw SchemaError(child(ptr, "kind"),
                      "expected discrete_finite, discrete_infinite, continuous_finite or "
                      "continuous_infinite");
  }
  at_location(ptr, [&] {
    validate_time_domain(time);
    return 0;
  });
  return time;
}

SystemSpec load_system_doc(const json& doc) {
  if (!doc.is_object()) throw SchemaError("", "system document must be an object");
  const long dim_l = integer(member(doc, "", "dim"), "/dim");
  if (dim_l < 1) throw SchemaError("/dim", "dimension must be positive");
  const auto dim = static_cast<std::size_t>(dim_l);

  Dynamics dynamics = load_dynamics(member(doc, "", "operator"), dim);

  const json& sampling = member(doc, "", "sampling");
  const json& vectors_v = array_of(member(sampling, "/sampling", "vectors"), "/sampling/vectors", std::nullopt);
  if (vectors_v.empty()) throw SchemaError("/sampling/vectors", "at least one sampling vector is required");
  std::vector<Vector> vectors;
  for (std::size_t i = 0; i < vectors_v.size(); ++i)
    vectors.push_back(complex_vector(vectors_v[i], child("/sampling/vectors", i), dim));
  std::vector<std::string> labels;
  if (const json* v = optional_member(sampling, "labels")) {
    array_of(*v, "/sampling/labels", vectors.size());
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) throw SchemaError(child("/sampling/labels", i), "expected a string");
      labels.push_back((*v)[i].get<std::string>());
    }
  } else {
    for (std::size_t i = 0; i < vectors.size(); ++i) labels.push_back("g" + std::to_string(i));
  }
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i].empty() || labels[i].find_first_of(",\n\r\"") != std::string::npos)
      throw SchemaError(child("/sampling/labels", i), "labels must be non-empty without commas, quotes or newlines");

  const TimeDomain time = load_time(member(doc, "", "time"));

  std::optional<Matrix> control;
  if (const json* v = optional_member(doc, "control"))
    control = complex_matrix(*v, "/control", dim, std::nullopt);

  SystemSpec sys = at_location("", [&] {
    return SystemSpec(dynamics, SamplingFamily(vectors, labels), time, control);
  });

  if (is_infinite(sys.time())) {
    try {
      const TailCertificate cert = certify_tail(sys);
      if (!cert.ok) {
        std::ostringstream msg;
        msg << "/time: certify_tail failed: tail bound " << format_double(cert.tail_bound)
            << " exceeds tail_tol (suggested truncation " << format_double(cert.suggested_truncation)
            << ")";
        throw InvariantError(msg.str());
      }
    } catch (const TailNotCertifiableError& e) {
      throw InvariantError(std::string("/time: certify_tail failed: ") + e.what());
    }
  }
  return sys;
}

EigenSamplePair load_pair_doc(const json& doc) {
  if (!doc.is_object()) throw SchemaError("", "pair document must be an object");
  const std::vector<double> lre = real_list(member(doc, "", "lambda_re"), "/lambda_re", std::nullopt);
  const std::size_t n = lre.size();
  if (n == 0) throw SchemaError("/lambda_re", "at least one eigenvalue is required");
  auto list_or = [&](const char* key, double fallback) {
    if (const json* v = optional_member(doc, key)) return real_list(*v, std::string("/") + key, n);
    return std::vector<double>(n, fallback);
  };
  const std::vector<double> lim = list_or("lambda_im", 0.0);
  const std::vector<double> cre = real_list(member(doc, "", "coeff_re"), "/coeff_re", n);
  const std::vector<double> cim = list_or("coeff_im", 0.0);
  const std::vector<double> norms = list_or("phi_norms", 1.0);
  std::vector<Complex> lambdas(n), coeffs(n);
  for (std::size_t i = 0; i < n; ++i) {
    lambdas[i] = {lre[i], lim[i]};
    coeffs[i] = {cre[i], cim[i]};
  }
  return at_location("", [&] { return EigenSamplePair(lambdas, coeffs, norms); });
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, const std::string& where) {
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    throw ParseError(where + ": invalid number '" + s + "'");
  return value;
}

}  // namespace

std::string format_double(double value) {
  if (value == 0.0) return std::signbit(value) ? "-0" : "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

SystemSpec load_system_string(const std::string& text) { return load_system_doc(parse_json(text)); }
SystemSpec load_system_file(const std::string& path) { return load_system_string(read_text_file(path)); }

EigenSamplePair load_pair_string(const std::string& text) { return load_pair_doc(parse_json(text)); }
EigenSamplePair load_pair_file(const std::string& path) { return load_pair_string(read_text_file(path)); }

std::string observations_to_csv(const ObservabilityMatrix& psi, const SamplingFamily& family,
                                const Vector& y) {
  if (y.size() != static_cast<Eigen::Index>(psi.index_map.size()))
    throw DimensionMismatchError("observation vector does not match the index map");
  std::ostringstream out;
  out << "time_or_step,sample_label,re,im\n";
  for (std::size_t r = 0; r < psi.index_map.size(); ++r) {
    const RowIndex& idx = psi.index_map[r];
    out << (idx.continuous ? format_double(idx.time) : std::to_string(idx.step)) << ','
        << family.labels()[idx.sample] << ',' << format_double(y(static_cast<Eigen::Index>(r)).real())
        << ',' << format_double(y(static_cast<Eigen::Index>(r)).imag()) << '\n';
  }
  return out.str();
}

Vector observations_from_csv(const std::string& text, const ObservabilityMatrix& psi,
                             const SamplingFamily& family) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("observation file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time_or_step,sample_label,re,im")
    throw SchemaError("line 1", "expected header time_or_step,sample_label,re,im");
  Vector y(static_cast<Eigen::Index>(psi.index_map.size()));
  std::size_t row = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 4) throw SchemaError(where, "expected 4 columns");
    if (row >= psi.index_map.size()) throw SchemaError(where, "more rows than the index map");
    const RowIndex& idx = psi.index_map[row];
    const double t = parse_double(f[0], where);
    const bool time_ok = idx.continuous ? t == idx.time : t == static_cast<double>(idx.step);
    if (!time_ok || f[1] != family.labels()[idx.sample])
      throw SchemaError(where, "row does not follow the index map (expected " +
                                   (idx.continuous ? format_double(idx.time) : std::to_string(idx.step)) +
                                   "," + family.labels()[idx.sample] + ")");
    y(static_cast<Eigen::Index>(row)) = {parse_double(f[2], where), parse_double(f[3], where)};
    ++row;
  }
  if (row != psi.index_map.size())
    throw SchemaError("line " + std::to_string(line_no), "fewer rows than the index map");
  return y;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp + "'");
    out << contents;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot move report into '" + path + "'");
  }
}

}  // namespace obsdict
