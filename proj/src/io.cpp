#include "asymlab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "asymlab/error.hpp"

namespace asymlab::io {

namespace {

bool is_scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

void dump_into(const Json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), is_scalar);
      out += '[';
      bool first = true;
      for (const Json& e : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) out += '\n' + pad;
        dump_into(e, out, depth + 1);
      }
      if (!flat) out += '\n' + close_pad;
      out += ']';
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += '\n' + pad + Json(it.key()).dump() + ": ";
        dump_into(it.value(), out, depth + 1);
      }
      out += '\n' + close_pad + '}';
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

Json optional_json(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<double> optional_number(const Json& j, const std::string& key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v))
    throw Error(ErrorKind::Numerical, "cannot serialize non-finite number");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string dump_json(const Json& j) {
  std::string out;
  dump_into(j, out, 0);
  out += '\n';
  return out;
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Schema,
                "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out)
    throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

void save_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, dump_json(j));
}

void check_writable(const std::filesystem::path& path) {
  const bool existed = std::filesystem::exists(path);
  {
    std::ofstream probe(path, std::ios::app);
    if (!probe)
      throw Error(ErrorKind::Io, "output path '" + path.string() +
                                     "' is not writable");
  }
  if (!existed) std::filesystem::remove(path);
}

// ---------------------------------------------------------------- Reader

std::string Reader::where(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

bool Reader::has(const std::string& key) const {
  return j_.is_object() && j_.contains(key) && !j_.at(key).is_null();
}

const Json& Reader::raw(const std::string& key) const {
  if (!j_.is_object())
    throw Error(ErrorKind::Schema,
                "'" + (path_.empty() ? std::string("<root>") : path_) +
                    "' must be an object");
  if (!j_.contains(key))
    throw Error(ErrorKind::Schema,
                "missing required field '" + where(key) + "'");
  return j_.at(key);
}

Reader Reader::child(const std::string& key) const {
  const Json& c = raw(key);
  if (!c.is_object())
    throw Error(ErrorKind::Schema, "field '" + where(key) + "' must be an object");
  return Reader(c, where(key));
}

double Reader::number(const std::string& key) const {
  const Json& v = raw(key);
  if (!v.is_number())
    throw Error(ErrorKind::Schema, "field '" + where(key) + "' must be a number");
  return v.get<double>();
}

double Reader::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long Reader::integer(const std::string& key) const {
  const Json& v = raw(key);
  if (!v.is_number_integer())
    throw Error(ErrorKind::Schema,
                "field '" + where(key) + "' must be an integer");
  return v.get<long>();
}

long Reader::integer_or(const std::string& key, long fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::uint64_t Reader::seed(const std::string& key) const {
  const Json& v = raw(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0)
    return static_cast<std::uint64_t>(v.get<long long>());
  throw Error(ErrorKind::Schema,
              "field '" + where(key) + "' must be a non-negative integer");
}

bool Reader::boolean(const std::string& key) const {
  const Json& v = raw(key);
  if (!v.is_boolean())
    throw Error(ErrorKind::Schema, "field '" + where(key) + "' must be a boolean");
  return v.get<bool>();
}

bool Reader::boolean_or(const std::string& key, bool fallback) const {
  return has(key) ? boolean(key) : fallback;
}

std::string Reader::string(const std::string& key) const {
  const Json& v = raw(key);
  if (!v.is_string())
    throw Error(ErrorKind::Schema, "field '" + where(key) + "' must be a string");
  return v.get<std::string>();
}

std::string Reader::string_or(const std::string& key,
                              const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

Eigen::VectorXd Reader::vector(const std::string& key) const {
  const Json& v = raw(key);
  if (!v.is_array())
    throw Error(ErrorKind::Schema, "field '" + where(key) + "' must be an array");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      throw Error(ErrorKind::Schema, "field '" + where(key) + "[" +
                                         std::to_string(i) + "]' must be a number");
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  return out;
}

Eigen::MatrixXd Reader::matrix(const std::string& key) const {
  const Json& v = raw(key);
  if (!v.is_array())
    throw Error(ErrorKind::Schema, "field '" + where(key) + "' must be an array");
  const auto rows = static_cast<Eigen::Index>(v.size());
  const auto cols = rows > 0 && v[0].is_array() ? static_cast<Eigen::Index>(v[0].size()) : 0;
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw Error(ErrorKind::Schema, "field '" + where(key) + "' row " +
                                         std::to_string(i) + " has the wrong length");
    for (Eigen::Index c = 0; c < cols; ++c)
      out(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return out;
}

// ---------------------------------------------------------------- types

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vector_json(m.row(i).transpose()));
  return a;
}

Json to_json(const FeatureBank& bank) {
  Json j;
  j["d"] = bank.d;
  j["N"] = bank.N;
  j["gamma"] = bank.gamma;
  j["mode"] = to_string(bank.mode);
  j["seed"] = bank.seed;
  Json feats = Json::array();
  for (const auto& f : bank.features) feats.push_back(vector_json(f));
  j["features"] = feats;
  j["background_coeffs"] = vector_json(bank.background_coeffs);
  return j;
}

FeatureBank bank_from_json(const Json& j) {
  const Reader r(j, "");
  FeatureBank b;
  b.d = static_cast<int>(r.integer("d"));
  b.N = static_cast<int>(r.integer("N"));
  b.gamma = r.number("gamma");
  b.mode = bank_mode_from_string(r.string("mode"));
  b.seed = r.seed("seed");
  const Json& feats = r.raw("features");
  if (!feats.is_array() || static_cast<int>(feats.size()) != b.d + 1)
    throw Error(ErrorKind::Schema, "field 'features' must hold d + 1 vectors");
  for (std::size_t k = 0; k < feats.size(); ++k) {
    Json wrap;
    wrap["v"] = feats[k];
    b.features.push_back(Reader(wrap, "features[" + std::to_string(k) + "]").vector("v"));
  }
  if (r.has("background_coeffs")) b.background_coeffs = r.vector("background_coeffs");
  return b;
}

Json to_json(const Dataset& data) {
  Json j;
  j["kind"] = to_string(data.kind);
  j["d"] = data.d;
  j["N"] = data.N;
  j["sigma"] = data.sigma;
  j["seed"] = data.seed;
  j["gamma"] = data.gamma;
  if (data.acceptance_rate) j["acceptance_rate"] = *data.acceptance_rate;
  if (data.attempts) j["attempts"] = *data.attempts;
  Json samples = Json::array();
  for (const Sample& s : data.samples) {
    Json o;
    o["x"] = vector_json(s.x);
    o["y"] = s.y;
    if (s.has_latents()) {
      o["u"] = vector_json(s.u);
      o["h1"] = vector_json(s.h1);
      o["xi"] = vector_json(s.xi);
    }
    samples.push_back(o);
  }
  j["samples"] = samples;
  return j;
}

Dataset dataset_from_json(const Json& j) {
  const Reader r(j, "");
  Dataset data;
  data.kind = dataset_kind_from_string(r.string("kind"));
  data.d = static_cast<int>(r.integer("d"));
  data.N = static_cast<int>(r.integer("N"));
  data.sigma = r.number("sigma");
  data.seed = r.seed("seed");
  data.gamma = r.number("gamma");
  if (r.has("acceptance_rate")) data.acceptance_rate = r.number("acceptance_rate");
  if (r.has("attempts")) data.attempts = r.integer("attempts");
  const Json& samples = r.raw("samples");
  if (!samples.is_array())
    throw Error(ErrorKind::Schema, "field 'samples' must be an array");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Reader sr(samples[i], "samples[" + std::to_string(i) + "]");
    Sample s;
    s.x = sr.vector("x");
    s.y = sr.number("y");
    if (sr.has("u")) s.u = sr.vector("u");
    if (sr.has("h1")) s.h1 = sr.vector("h1");
    if (sr.has("xi")) s.xi = sr.vector("xi");
    data.samples.push_back(std::move(s));
  }
  validate_dataset(data);
  return data;
}

std::string dataset_csv(const Dataset& data) {
  std::string out;
  for (int k = 1; k <= data.d; ++k) out += "x_" + std::to_string(k) + ",";
  out += "y\n";
  for (const Sample& s : data.samples) {
    for (Eigen::Index k = 0; k < s.x.size(); ++k) out += format_double(s.x(k)) + ",";
    out += format_double(s.y) + "\n";
  }
  return out;
}

Json to_json(const AttentionParams& p) {
  Json j;
  j["m"] = p.m();
  j["w"] = vector_json(p.w);
  j["a"] = vector_json(p.a);
  j["zero_init"] = p.zero_init;
  j["seed"] = p.seed;
  return j;
}

AttentionParams params_from_json(const Json& j) {
  const Reader r(j, "");
  AttentionParams p;
  p.w = r.vector("w");
  p.a = r.vector("a");
  p.zero_init = r.boolean("zero_init");
  p.seed = r.seed("seed");
  if (r.integer("m") != p.m())
    throw Error(ErrorKind::Schema, "field 'm' disagrees with length of 'w'");
  p.validate();
  return p;
}

Json to_json(const LinearParams& p) {
  Json j;
  j["d"] = p.d();
  j["w_lin"] = vector_json(p.w_lin);
  j["source"] = to_string(p.source);
  j["residual"] = p.residual;
  return j;
}

LinearParams linear_from_json(const Json& j) {
  const Reader r(j, "");
  LinearParams p;
  p.w_lin = r.vector("w_lin");
  p.source = linear_source_from_string(r.string("source"));
  p.residual = r.number("residual");
  if (r.integer("d") != p.d())
    throw Error(ErrorKind::Schema, "field 'd' disagrees with length of 'w_lin'");
  return p;
}

Json to_json(const KernelMatrix& k, double lambda_min) {
  Json j;
  j["n"] = k.n();
  j["lambda_min"] = lambda_min;
  j["H"] = matrix_json(k.H);
  j["psi"] = matrix_json(k.psi);
  return j;
}

KernelMatrix kernel_from_json(const Json& j) {
  const Reader r(j, "");
  KernelMatrix k;
  k.H = r.matrix("H");
  if (r.has("psi")) k.psi = r.matrix("psi");
  if (r.integer("n") != k.n() || k.H.rows() != k.H.cols())
    throw Error(ErrorKind::Schema, "field 'H' must be n x n");
  return k;
}

Json to_json(const TraceRecord& rec) {
  Json j;
  j["step"] = rec.step;
  j["loss"] = rec.loss;
  j["weight_drift"] = rec.weight_drift;
  j["sign_agree_pos"] = rec.sign_agree_pos;
  j["sign_agree_neg"] = rec.sign_agree_neg;
  j["kernel_drift"] = optional_json(rec.kernel_drift);
  j["lambda_min"] = optional_json(rec.lambda_min);
  return j;
}

Json to_json(const TrainTrace& t) {
  Json j;
  j["steps_taken"] = t.steps_taken;
  j["loss_increases"] = t.loss_increases;
  j["early_stopped"] = t.early_stopped;
  j["initial_loss"] = t.initial_loss;
  j["final_loss"] = t.final_loss;
  j["initial_lambda_min"] = optional_json(t.initial_lambda_min);
  Json recs = Json::array();
  for (const TraceRecord& rec : t.records) recs.push_back(to_json(rec));
  j["records"] = recs;
  return j;
}

TrainTrace trace_from_json(const Json& j) {
  const Reader r(j, "");
  TrainTrace t;
  t.steps_taken = r.integer("steps_taken");
  t.loss_increases = r.integer("loss_increases");
  t.early_stopped = r.boolean("early_stopped");
  t.initial_loss = r.number("initial_loss");
  t.final_loss = r.number("final_loss");
  t.initial_lambda_min = optional_number(j, "initial_lambda_min");
  const Json& recs = r.raw("records");
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const Reader rr(recs[i], "records[" + std::to_string(i) + "]");
    TraceRecord rec;
    rec.step = rr.integer("step");
    rec.loss = rr.number("loss");
    rec.weight_drift = rr.number("weight_drift");
    rec.sign_agree_pos = rr.number("sign_agree_pos");
    rec.sign_agree_neg = rr.number("sign_agree_neg");
    rec.kernel_drift = optional_number(recs[i], "kernel_drift");
    rec.lambda_min = optional_number(recs[i], "lambda_min");
    t.records.push_back(rec);
  }
  return t;
}

std::string trace_csv(const TrainTrace& t) {
  std::ostringstream out;
  out << kTraceCsvHeader << '\n';
  for (const TraceRecord& rec : t.records) {
    out << rec.step << ',' << format_double(rec.loss) << ','
        << format_double(rec.weight_drift) << ','
        << format_double(rec.sign_agree_pos) << ','
        << format_double(rec.sign_agree_neg) << ','
        << (rec.kernel_drift ? format_double(*rec.kernel_drift) : "") << ','
        << (rec.lambda_min ? format_double(*rec.lambda_min) : "") << '\n';
  }
  return out.str();
}

Json to_json(const verify::GradCheckResult& r) {
  Json j;
  j["max_abs_err"] = r.max_abs_err;
  j["max_rel_err"] = r.max_rel_err;
  j["argmax"] = r.argmax;
  j["h"] = r.h;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  return j;
}

}  // namespace asymlab::io
