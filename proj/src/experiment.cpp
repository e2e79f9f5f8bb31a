// Copyright 2026 The MVPS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mvps/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "mvps/diagnostics.hpp"
#include "mvps/error.hpp"
#include "mvps/exactlaw.hpp"
#include "mvps/prior.hpp"
#include "mvps/urn.hpp"

namespace mvps {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void Invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kConfigInvalid,
              "config " + (path.empty() ? std::string("/") : path) + ": " + what);
}

std::string Join(const std::string& path, const std::string& key) {
  return path + "/" + key;
}
std::string Join(const std::string& path, std::size_t i) {
  return path + "/" + std::to_string(i);
}

void AllowKeys(const json& j, const std::string& path,
               std::initializer_list<const char*> keys) {
  if (!j.is_object()) Invalid(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(),
                     [&](const char* k) { return key == k; })) {
      Invalid(Join(path, key), "unknown key");
    }
  }
}

const json& Required(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) Invalid(Join(path, key), "required key is missing");
  return j.at(key);
}

// Decimal string (preferred) or JSON number.
double Real(const json& j, const std::string& path) {
  double v = 0.0;
  if (j.is_number()) {
    v = j.get<double>();
  } else if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (s.empty() || ec != std::errc() || ptr != last) {
      Invalid(path, "'" + s + "' is not a decimal number");
    }
  } else {
    Invalid(path, "expected a decimal string or number");
  }
  if (!std::isfinite(v)) Invalid(path, "number must be finite");
  return v;
}

std::uint64_t Unsigned(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    if (j.get<std::int64_t>() < 0) Invalid(path, "must be non-negative");
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      Invalid(path, "'" + s + "' is not a non-negative integer");
    }
    return v;
  }
  Invalid(path, "expected a non-negative integer");
}

std::string String(const json& j, const std::string& path) {
  if (!j.is_string()) Invalid(path, "expected a string");
  return j.get<std::string>();
}

const json& Array(const json& j, const std::string& path) {
  if (!j.is_array()) Invalid(path, "expected an array");
  return j;
}

std::vector<double> Reals(const json& j, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < Array(j, path).size(); ++i) {
    out.push_back(Real(j[i], Join(path, i)));
  }
  return out;
}

std::size_t StateIndex(const FiniteSpace& space, const json& j,
                       const std::string& path) {
  const std::string label = String(j, path);
  if (!space.contains(label)) Invalid(path, "unknown label '" + label + "'");
  return space.index_of(label);
}

std::vector<std::size_t> States(const FiniteSpace& space, const json& j,
                                const std::string& path) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < Array(j, path).size(); ++i) {
    out.push_back(StateIndex(space, j[i], Join(path, i)));
  }
  return out;
}

BaseMeasure ParseBase(const json& j, const std::string& path) {
  AllowKeys(j, path, {"family", "mean", "sd", "lo", "hi"});
  const std::string family = String(Required(j, path, "family"), Join(path, "family"));
  if (family == "normal") {
    const double mean = j.contains("mean") ? Real(j["mean"], Join(path, "mean")) : 0.0;
    const double sd = j.contains("sd") ? Real(j["sd"], Join(path, "sd")) : 1.0;
    if (!(sd > 0.0)) Invalid(Join(path, "sd"), "must be positive");
    return BaseMeasure::Normal(mean, sd);
  }
  if (family == "uniform") {
    const double lo = j.contains("lo") ? Real(j["lo"], Join(path, "lo")) : 0.0;
    const double hi = j.contains("hi") ? Real(j["hi"], Join(path, "hi")) : 1.0;
    if (!(hi > lo)) Invalid(Join(path, "hi"), "must exceed lo");
    return BaseMeasure::Uniform(lo, hi);
  }
  Invalid(Join(path, "family"), "expected 'normal' or 'uniform'");
}

GeneralKernelConfig ParseGeneral(const json& j, const std::string& path) {
  AllowKeys(j, path, {"name", "base", "center", "edges", "shift"});
  GeneralKernelConfig g;
  g.name = String(Required(j, path, "name"), Join(path, "name"));
  static const std::set<std::string> kNames = {"delta", "symmetrized",
                                               "histogram", "shifted"};
  if (!kNames.count(g.name)) {
    Invalid(Join(path, "name"),
            "expected one of delta, symmetrized, histogram, shifted");
  }
  if (j.contains("base")) g.base = ParseBase(j["base"], Join(path, "base"));
  if (j.contains("center")) g.center = Real(j["center"], Join(path, "center"));
  if (j.contains("shift")) g.shift = Real(j["shift"], Join(path, "shift"));
  if (j.contains("edges")) {
    g.edges = Reals(j["edges"], Join(path, "edges"));
    if (!std::is_sorted(g.edges.begin(), g.edges.end()) ||
        std::adjacent_find(g.edges.begin(), g.edges.end()) != g.edges.end()) {
      Invalid(Join(path, "edges"), "edges must be strictly increasing");
    }
  }
  if (g.name == "histogram" && g.edges.empty()) {
    Invalid(Join(path, "edges"), "histogram kernel needs at least one edge");
  }
  return g;
}

ModelConfig ParseModel(const json& j, const std::string& path) {
  AllowKeys(j, path, {"theta", "labels", "nu", "kernel", "partition", "null_set"});
  ModelConfig m;
  m.theta = Real(Required(j, path, "theta"), Join(path, "theta"));
  if (!(m.theta > 0.0)) Invalid(Join(path, "theta"), "must be positive");

  const std::string kpath = Join(path, "kernel");
  const json& kernel = Required(j, path, "kernel");
  AllowKeys(kernel, kpath, {"matrix", "builtin", "general"});
  if (kernel.size() != 1) {
    Invalid(kpath, "exactly one of matrix, builtin, general is required");
  }
  if (kernel.contains("general")) {
    m.kind = ModelConfig::KernelKind::kGeneral;
    m.general = ParseGeneral(kernel["general"], Join(kpath, "general"));
    for (const char* key : {"labels", "nu", "partition", "null_set"}) {
      if (j.contains(key)) Invalid(Join(path, key), "not used by general kernels");
    }
    return m;
  }

  const json& nu_json = Required(j, path, "nu");
  std::vector<double> nu = Reals(nu_json, Join(path, "nu"));
  if (nu.empty()) Invalid(Join(path, "nu"), "must not be empty");
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    const std::string lpath = Join(path, "labels");
    for (std::size_t i = 0; i < Array(j["labels"], lpath).size(); ++i) {
      labels.push_back(String(j["labels"][i], Join(lpath, i)));
    }
    if (labels.size() != nu.size()) {
      Invalid(lpath, "has " + std::to_string(labels.size()) +
                         " labels but nu has " + std::to_string(nu.size()) +
                         " entries");
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i].empty() || !seen.insert(labels[i]).second) {
        Invalid(Join(lpath, i), "labels must be distinct and non-empty");
      }
    }
  } else {
    for (std::size_t i = 1; i <= nu.size(); ++i) labels.push_back(std::to_string(i));
  }
  m.space.emplace(labels);
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (nu[i] < 0.0) Invalid(Join(Join(path, "nu"), i), "must be non-negative");
  }
  try {
    m.nu.emplace(*m.space, nu);
  } catch (const Error& e) {
    Invalid(Join(path, "nu"), e.what());
  }
  const std::size_t k = nu.size();

  if (j.contains("partition")) {
    const std::string ppath = Join(path, "partition");
    std::vector<std::vector<std::size_t>> blocks;
    for (std::size_t b = 0; b < Array(j["partition"], ppath).size(); ++b) {
      blocks.push_back(States(*m.space, j["partition"][b], Join(ppath, b)));
    }
    try {
      m.partition.emplace(*m.space, blocks);
    } catch (const Error& e) {
      Invalid(ppath, e.what());
    }
  }
  if (j.contains("null_set")) {
    m.null_set = States(*m.space, j["null_set"], Join(path, "null_set"));
  }

  if (kernel.contains("matrix")) {
    m.kind = ModelConfig::KernelKind::kMatrix;
    const std::string mpath = Join(kpath, "matrix");
    const json& rows = Array(kernel["matrix"], mpath);
    if (rows.size() != k) {
      Invalid(mpath, "expected " + std::to_string(k) + " rows");
    }
    for (std::size_t x = 0; x < k; ++x) {
      const std::vector<double> row = Reals(rows[x], Join(mpath, x));
      if (row.size() != k) {
        Invalid(Join(mpath, x), "expected " + std::to_string(k) + " entries");
      }
      for (double v : row) m.has_negative_entries |= v < -kTol;
      m.matrix.insert(m.matrix.end(), row.begin(), row.end());
    }
  } else {
    const std::string bpath = Join(kpath, "builtin");
    const std::string name = String(kernel["builtin"], bpath);
    if (name == "identity") {
      m.kind = ModelConfig::KernelKind::kIdentity;
    } else if (name == "constant") {
      m.kind = ModelConfig::KernelKind::kConstant;
    } else if (name == "partition") {
      m.kind = ModelConfig::KernelKind::kPartition;
      if (!m.partition) {
        Invalid(Join(path, "partition"), "required by the partition kernel");
      }
    } else {
      Invalid(bpath, "expected 'identity', 'constant' or 'partition'");
    }
    try {
      const FiniteKernel built = m.kernel();
      m.matrix.assign(built.entries().begin(), built.entries().end());
    } catch (const Error& e) {
      Invalid(kpath, e.what());
    }
  }
  return m;
}

TaskConfig ParseTask(const json& j, const std::string& path) {
  AllowKeys(j, path, {"n", "depth", "replicates", "seed", "checkpoints", "tol",
                      "checks", "data", "levels", "epsilon", "recursion",
                      "test_sets", "samples", "inner"});
  TaskConfig t;
  auto size = [&](const char* key, std::size_t& target) {
    if (j.contains(key)) target = Unsigned(j[key], Join(path, key));
  };
  size("n", t.n);
  size("depth", t.depth);
  size("replicates", t.replicates);
  size("samples", t.samples);
  size("inner", t.inner);
  if (j.contains("seed")) t.seed = Unsigned(j["seed"], Join(path, "seed"));
  if (j.contains("levels")) {
    t.levels = Unsigned(j["levels"], Join(path, "levels"));
    if (*t.levels == 0) Invalid(Join(path, "levels"), "must be at least 1");
  }
  if (t.replicates == 0) Invalid(Join(path, "replicates"), "must be at least 1");
  if (j.contains("checkpoints")) {
    const std::string cpath = Join(path, "checkpoints");
    for (std::size_t i = 0; i < Array(j["checkpoints"], cpath).size(); ++i) {
      t.checkpoints.push_back(Unsigned(j["checkpoints"][i], Join(cpath, i)));
      if (i > 0 && t.checkpoints[i] <= t.checkpoints[i - 1]) {
        Invalid(Join(cpath, i), "checkpoints must be strictly increasing");
      }
    }
  }
  if (j.contains("tol")) {
    t.tol = Real(j["tol"], Join(path, "tol"));
    if (t.tol < 0.0) Invalid(Join(path, "tol"), "must be non-negative");
  }
  if (j.contains("epsilon")) {
    t.epsilon = Real(j["epsilon"], Join(path, "epsilon"));
    if (!(t.epsilon > 0.0 && t.epsilon < 1.0)) {
      Invalid(Join(path, "epsilon"), "must lie in (0, 1)");
    }
  }
  if (j.contains("checks")) {
    static const std::set<std::string> kChecks = {
        "balanced", "stationary", "stationary-on-atoms", "self-averaging",
        "proper", "non-negative"};
    const std::string cpath = Join(path, "checks");
    for (std::size_t i = 0; i < Array(j["checks"], cpath).size(); ++i) {
      const std::string c = String(j["checks"][i], Join(cpath, i));
      if (!kChecks.count(c)) Invalid(Join(cpath, i), "unknown check '" + c + "'");
      t.checks.push_back(c);
    }
  }
  if (j.contains("recursion")) {
    const std::string rpath = Join(path, "recursion");
    const json& r = j["recursion"];
    if (r.is_string() && r.get<std::string>() == "balanced") {
      t.recursion = "balanced";
    } else {
      const double q = Real(r, rpath);
      if (q < 0.0 || q > 1.0) Invalid(rpath, "q must lie in [0, 1]");
      t.recursion = r.is_string() ? r.get<std::string>() : r.dump();
    }
  }
  if (j.contains("test_sets")) {
    t.test_sets = Reals(j["test_sets"], Join(path, "test_sets"));
    if (t.test_sets.empty()) Invalid(Join(path, "test_sets"), "must not be empty");
  }
  return t;
}

OutputConfig ParseOutput(const json& j, const std::string& path) {
  AllowKeys(j, path, {"directory", "formats"});
  OutputConfig o;
  if (j.contains("directory")) {
    o.directory = String(j["directory"], Join(path, "directory"));
  }
  if (j.contains("formats")) {
    const std::string fpath = Join(path, "formats");
    o.json = o.csv = false;
    for (std::size_t i = 0; i < Array(j["formats"], fpath).size(); ++i) {
      const std::string f = String(j["formats"][i], Join(fpath, i));
      if (f == "json") {
        o.json = true;
      } else if (f == "csv") {
        o.csv = true;
      } else {
        Invalid(Join(fpath, i), "expected 'json' or 'csv'");
      }
    }
  }
  return o;
}

}  // namespace

GeneralKernel GeneralKernelConfig::build() const {
  if (name == "delta") return builtin::Delta(base);
  if (name == "symmetrized") return builtin::Symmetrized(base, center);
  if (name == "histogram") return builtin::Histogram(base, edges);
  if (name == "shifted") return builtin::Shifted(base, shift);
  throw Error(ErrorCode::kInvalidArgument, "unknown general kernel '" + name + "'");
}

FiniteKernel ModelConfig::kernel() const {
  if (!is_finite()) {
    throw Error(ErrorCode::kFiniteOnly, "the model has a general-space kernel");
  }
  switch (kind) {
    case KernelKind::kIdentity:
      return FiniteKernel::Identity(*space);
    case KernelKind::kConstant:
      return FiniteKernel::Constant(*nu);
    case KernelKind::kPartition:
      return exchangeable_kernel_from_partition(*nu, *partition, null_set);
    default:
      if (has_negative_entries) {
        throw Error(ErrorCode::kNegativeEntries,
                    "kernel matrix has negative entries");
      }
      return FiniteKernel(*space, matrix);
  }
}

ExperimentConfig parse_config(const json& doc) {
  AllowKeys(doc, "", {"schema_version", "model", "task", "output"});
  ExperimentConfig c;
  c.schema_version = String(Required(doc, "", "schema_version"), "/schema_version");
  if (c.schema_version != kConfigSchemaVersion) {
    Invalid("/schema_version", "unsupported version '" + c.schema_version + "'");
  }
  c.model = ParseModel(Required(doc, "", "model"), "/model");
  if (doc.contains("task")) c.task = ParseTask(doc["task"], "/task");
  if (doc.contains("output")) c.output = ParseOutput(doc["output"], "/output");
  if (c.model.is_finite()) {
    const std::string dpath = "/task/data";
    if (doc.contains("task") && doc["task"].contains("data")) {
      c.task.data = States(*c.model.space, doc["task"]["data"], dpath);
    }
  } else if (doc.contains("task") && doc["task"].contains("data")) {
    Invalid("/task/data", "not used by general kernels");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfigInvalid,
                "config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc);
}

namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Outcome {
  bool passed = true;
  std::string message;
};

class Context {
 public:
  Context(std::string subcommand, ExperimentConfig config, fs::path dir)
      : subcommand_(std::move(subcommand)),
        config_(std::move(config)),
        dir_(std::move(dir)) {}

  const ExperimentConfig& config() const { return config_; }
  const ModelConfig& model() const { return config_.model; }
  const TaskConfig& task() const { return config_.task; }
  const std::vector<std::string>& files() const { return files_; }

  const FiniteSpace& space() const { return *model().space; }
  const ProbabilityVector& nu() const { return *model().nu; }

  void RequireFinite() const {
    if (!model().is_finite()) {
      throw Error(ErrorCode::kFiniteOnly,
                  subcommand_ + " needs a finite model (matrix or builtin kernel)");
    }
  }
  const Partition& RequirePartition() const {
    RequireFinite();
    if (!model().partition) {
      throw Error(ErrorCode::kBadPartition, subcommand_ + " needs model.partition");
    }
    return *model().partition;
  }
  UrnSpec Spec() const {
    RequireFinite();
    return UrnSpec(model().theta, nu(), model().kernel());
  }
  GeneralUrnSpec GeneralSpec() const {
    return GeneralUrnSpec{model().theta, model().general->build()};
  }
  std::size_t Levels(double theta) const {
    if (task().levels) return *task().levels;
    return truncation_level(theta, task().epsilon).levels;
  }

  // The report file; "generated_at" is the only run-dependent field.
  void WriteReport(json body) {
    if (!config_.output.json) return;
    body["subcommand"] = subcommand_;
    body["schema_version"] = kConfigSchemaVersion;
    body["generated_at"] = Timestamp();
    Write(subcommand_ + ".json",
          [&](std::ostream& os) { os << body.dump(2) << "\n"; });
  }
  void WriteCsv(const std::string& name,
                const std::function<void(std::ostream&)>& body) {
    if (config_.output.csv) Write(name, body);
  }
  void Write(const std::string& name,
             const std::function<void(std::ostream&)>& body) {
    fs::create_directories(dir_);
    const fs::path path = dir_ / name;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
    body(os);
    os.flush();
    if (!os) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
    files_.push_back(path.string());
  }

  std::string Label(std::size_t x) const { return space().label(x); }

 private:
  std::string subcommand_;
  ExperimentConfig config_;
  fs::path dir_;
  std::vector<std::string> files_;
};

// Re-applies a tolerance override to residual-type reports only.
void Retolerate(CheckReport& r, double tol) {
  if (r.passed == (r.max_residual <= r.tolerance)) {
    r.tolerance = tol;
    r.finalize();
  }
}

void SummaryCsv(std::ostream& os, const std::vector<CheckReport>& reports) {
  os << "check,passed,max_residual,tolerance\n";
  for (const CheckReport& r : reports) {
    os << r.name << "," << (r.passed ? "true" : "false") << ","
       << Num(r.max_residual) << "," << Num(r.tolerance) << "\n";
  }
}

json Measure(const FiniteSpace& space, std::span<const double> w) {
  json out = json::object();
  for (std::size_t i = 0; i < w.size(); ++i) out[space.label(i)] = w[i];
  return out;
}

std::vector<TestSet> HalfLines(const std::vector<double>& ts) {
  std::vector<TestSet> out;
  for (double t : ts) out.push_back(HalfLine(t));
  return out;
}

std::optional<QSequence> Recursion(const Context& ctx) {
  const auto& r = ctx.task().recursion;
  if (!r) return std::nullopt;
  if (*r == "balanced") return BalancedQ(ctx.model().theta);
  return ConstantQ(std::strtod(r->c_str(), nullptr));
}

Trajectory FiniteTrajectory(const Context& ctx, std::size_t n, std::uint64_t r,
                            bool snapshots) {
  if (auto q = Recursion(ctx)) {
    return cid_recursion_simulate(ctx.nu(), ctx.model().kernel(), *q, n,
                                  ctx.task().seed, r);
  }
  return simulate(ctx.Spec(), n, ctx.task().seed, r, snapshots);
}

// --- subcommands ---------------------------------------------------------

Outcome Simulate(Context& ctx) {
  const TaskConfig& t = ctx.task();
  json reps = json::array();
  if (!ctx.model().is_finite()) {
    const GeneralUrnSpec spec = ctx.GeneralSpec();
    std::vector<GeneralTrajectory> trajs;
    for (std::size_t r = 0; r < t.replicates; ++r) {
      trajs.push_back(general_simulate(spec, t.n, t.seed, r));
      const auto& tr = trajs.back();
      const double base_draws = static_cast<double>(
          std::count(tr.parents.begin(), tr.parents.end(), -1L));
      reps.push_back({{"replicate", r},
                      {"base_draws", base_draws},
                      {"total_mass", std::accumulate(tr.masses.begin(),
                                                     tr.masses.end(), 0.0)}});
      ctx.Write("trajectory_" + std::to_string(r) + ".txt",
                [&](std::ostream& os) { write_general_trajectory(os, tr, spec); });
    }
    ctx.WriteCsv("simulate.csv", [&](std::ostream& os) {
      os << "replicate,step,point,parent,mass\n";
      for (const auto& tr : trajs) {
        for (std::size_t i = 0; i < tr.points.size(); ++i) {
          os << tr.replicate << "," << i + 1 << "," << Num(tr.points[i]) << ","
             << tr.parents[i] << "," << Num(tr.masses[i]) << "\n";
        }
      }
    });
    ctx.WriteReport({{"kernel", spec.kernel.name},
                     {"spec_hash", spec_hash(spec)},
                     {"theta", spec.theta},
                     {"n", t.n},
                     {"seed", t.seed},
                     {"replicates", std::move(reps)}});
    return {};
  }

  std::vector<Trajectory> trajs;
  for (std::size_t r = 0; r < t.replicates; ++r) {
    trajs.push_back(FiniteTrajectory(ctx, t.n, r, false));
    const Trajectory& tr = trajs.back();
    std::vector<double> counts(ctx.space().size(), 0.0);
    for (std::size_t x : tr.draws) counts[x] += 1.0;
    json rep = {{"replicate", r}, {"counts", Measure(ctx.space(), counts)}};
    if (tr.spec) {
      const UrnState s = replay(*tr.spec, tr.draws);
      rep["final_predictive"] = Measure(ctx.space(), predictive(s).weights());
    } else {
      const auto p = cid_recursion_predictives(ctx.nu(), ctx.model().kernel(),
                                               *Recursion(ctx), tr.draws);
      rep["final_predictive"] = Measure(ctx.space(), p.back());
    }
    reps.push_back(std::move(rep));
    ctx.Write("trajectory_" + std::to_string(r) + ".txt",
              [&](std::ostream& os) { write_trajectory(os, tr, ctx.space()); });
  }
  ctx.WriteCsv("simulate.csv", [&](std::ostream& os) {
    os << "replicate,step,draw\n";
    for (const Trajectory& tr : trajs) {
      for (std::size_t i = 0; i < tr.draws.size(); ++i) {
        os << tr.replicate << "," << i + 1 << "," << ctx.Label(tr.draws[i]) << "\n";
      }
    }
  });
  json body = {{"n", t.n}, {"seed", t.seed}, {"replicates", std::move(reps)},
               {"theta", ctx.model().theta}};
  if (t.recursion) {
    body["recursion"] = *t.recursion;
  } else {
    body["spec_hash"] = spec_hash(ctx.Spec());
  }
  ctx.WriteReport(std::move(body));
  return {};
}

Outcome CheckExchangeable(Context& ctx) {
  const UrnSpec spec = ctx.Spec();
  CheckReport r = check_exchangeable(spec, ctx.task().depth, ctx.task().tol);
  const JointLaw law = joint_law(spec, ctx.task().depth);
  ctx.WriteCsv("joint_law.csv", [&](std::ostream& os) { law.write_csv(os); });
  ctx.WriteCsv("check-exchangeable.csv", [&](std::ostream& os) { SummaryCsv(os, {r}); });
  ctx.WriteReport({{"depth", ctx.task().depth}, {"report", r.to_json()}});
  return {r.passed, r.passed ? "" : "not exchangeable"};
}

Outcome CheckCid(Context& ctx) {
  CheckReport r = check_cid(ctx.Spec(), ctx.task().depth, ctx.task().tol);
  ctx.WriteCsv("check-cid.csv", [&](std::ostream& os) { SummaryCsv(os, {r}); });
  ctx.WriteReport({{"depth", ctx.task().depth}, {"report", r.to_json()}});
  return {r.passed, r.passed ? "" : "not c.i.d."};
}

Outcome CheckKernel(Context& ctx) {
  const TaskConfig& t = ctx.task();
  if (!ctx.model().is_finite()) {
    CheckReport r = mc_kernel_check(ctx.model().general->build(),
                                    HalfLines(t.test_sets), t.samples, t.seed);
    ctx.WriteCsv("check-kernel.csv", [&](std::ostream& os) {
      os << "test_set,condition,estimate,standard_error,z\n";
      for (const json& s : r.data["test_sets"]) {
        for (const char* c : {"stationarity", "self_averaging", "self_averaging_mean"}) {
          const json& e = s[c];
          os << s["name"].get<std::string>() << "," << c << ","
             << Num(e["estimate"].get<double>()) << ","
             << Num(e["standard_error"].get<double>()) << ","
             << Num(e["z"].get<double>()) << "\n";
        }
      }
    });
    ctx.WriteReport({{"samples", t.samples}, {"report", r.to_json()}});
    return {r.passed, r.passed ? "" : "Monte Carlo kernel check failed"};
  }

  std::vector<std::string> checks = t.checks;
  if (checks.empty()) {
    checks = {"balanced", "stationary", "self-averaging", "proper", "non-negative"};
  }
  const bool wants_nonneg =
      std::find(checks.begin(), checks.end(), "non-negative") != checks.end();
  std::vector<CheckReport> reports;
  json skipped = json::array();
  if (ctx.model().has_negative_entries) {
    if (!wants_nonneg) {
      throw Error(ErrorCode::kNegativeEntries,
                  "kernel matrix has negative entries; only the non-negative "
                  "check can run on it");
    }
    for (const std::string& c : checks) {
      if (c == "non-negative") {
        reports.push_back(detect_negative(ctx.space(), ctx.model().matrix));
      } else {
        skipped.push_back(c);
      }
    }
  } else {
    const FiniteKernel kernel = ctx.model().kernel();
    const ProbabilityVector& nu = ctx.nu();
    const Partition partition =
        ctx.model().partition ? *ctx.model().partition : atoms_of_kernel(kernel);
    for (const std::string& c : checks) {
      CheckReport r;
      if (c == "balanced") {
        r = check_balanced(kernel, nu);
      } else if (c == "stationary") {
        r = check_scaled_stationarity(kernel, nu);
      } else if (c == "stationary-on-atoms") {
        r = check_scaled_stationarity_on_blocks(kernel, nu, partition);
      } else if (c == "self-averaging") {
        r = check_self_averaging(kernel, nu);
      } else if (c == "proper") {
        r = check_proper(kernel, nu, partition);
        r.data["partition"] = partition.block_labels();
      } else {
        r = detect_negative(ctx.space(), ctx.model().matrix);
      }
      Retolerate(r, t.tol);
      reports.push_back(std::move(r));
    }
  }
  bool passed = true;
  json body = json::object();
  json list = json::array();
  for (const CheckReport& r : reports) {
    passed = passed && r.passed;
    list.push_back(r.to_json());
  }
  body["reports"] = std::move(list);
  body["skipped"] = std::move(skipped);
  body["passed"] = passed;
  ctx.WriteCsv("check-kernel.csv", [&](std::ostream& os) { SummaryCsv(os, reports); });
  ctx.WriteReport(std::move(body));
  return {passed, passed ? "" : "a kernel check failed"};
}

Outcome Decompose(Context& ctx) {
  const Decomposition d = decompose_blocks(ctx.model().kernel(), ctx.nu());
  json body = {{"report", d.report.to_json()}};
  json blocks = json::array();
  json null_set = json::array();
  if (d.partition) {
    for (std::size_t j = 0; j < d.partition->num_blocks(); ++j) {
      json labels = json::array();
      for (std::size_t x : d.partition->block(j)) labels.push_back(ctx.Label(x));
      if (d.null_block && *d.null_block == j) {
        null_set = std::move(labels);
      } else {
        blocks.push_back(std::move(labels));
      }
    }
  }
  body["blocks"] = std::move(blocks);
  body["null_set"] = std::move(null_set);
  ctx.WriteCsv("decompose.csv", [&](std::ostream& os) {
    os << "state,block\n";
    if (!d.partition) return;
    for (std::size_t x = 0; x < ctx.space().size(); ++x) {
      const std::size_t j = d.partition->block_of(x);
      os << ctx.Label(x) << ","
         << (d.null_block && *d.null_block == j ? std::string("null")
                                                : d.partition->block_label(j))
         << "\n";
    }
  });
  ctx.WriteReport(std::move(body));
  return {d.report.passed, d.report.passed ? "" : "no block decomposition"};
}

Outcome StructureCid(Context& ctx) {
  CheckReport r = check_cid_structure(ctx.model().kernel(), ctx.nu());
  ctx.WriteCsv("structure-cid.csv", [&](std::ostream& os) { SummaryCsv(os, {r}); });
  ctx.WriteCsv("mass_table.csv", [&](std::ostream& os) {
    os << "mass,nu_mass,block,nu_mass_given_block\n";
    const json& table = r.data["mass_table"];
    if (!table.is_array()) return;
    for (const json& row : table) {
      for (const auto& [block, cond] : row["by_block"].items()) {
        os << Num(row["mass"].get<double>()) << "," << Num(row["nu"].get<double>())
           << "," << block << "," << Num(cond.get<double>()) << "\n";
      }
    }
  });
  json body = {{"report", r.to_json()}};
  if (r.data.contains("blocks")) body["blocks"] = r.data["blocks"];
  ctx.WriteReport(std::move(body));
  return {r.passed, r.passed ? "" : "c.i.d. structure conditions fail"};
}

Outcome ProjectAtoms(Context& ctx) {
  const UrnSpec spec = ctx.Spec();
  const Partition& partition = ctx.RequirePartition();
  const std::size_t n = ctx.task().depth;
  const auto& z = ctx.model().null_set;
  Projection p = z.empty()
                     ? project_atoms_law(spec, partition, n)
                     : project_atoms_law(spec, partition, n,
                                         null_projection_spec(spec.theta, spec.nu,
                                                              partition, z));
  Retolerate(p.report, ctx.task().tol);
  ctx.WriteCsv("label_law.csv", [&](std::ostream& os) { p.label_law.write_csv(os); });
  ctx.WriteCsv("project-atoms.csv", [&](std::ostream& os) { SummaryCsv(os, {p.report}); });
  ctx.WriteReport({{"depth", n},
                   {"nu_pi", Measure(partition.block_space(),
                                     partition.push_forward(spec.nu).weights())},
                   {"report", p.report.to_json()}});
  return {p.report.passed, p.report.passed ? "" : "projected law differs"};
}

void SticksCsv(std::ostream& os, std::size_t r, const FiniteStickBreaking& d,
               const FiniteSpace& atoms) {
  for (std::size_t j = 0; j < d.sticks.size(); ++j) {
    os << r << "," << j + 1 << "," << Num(d.sticks[j]) << "," << Num(d.weights[j])
       << "," << atoms.label(d.atoms[j]) << "\n";
  }
}

void MeasureDrawOutputs(Context& ctx, const std::vector<RandomMeasureDraw>& draws,
                        json& body) {
  const FiniteSpace& space = ctx.space();
  std::vector<double> mean(space.size(), 0.0);
  json list = json::array();
  for (const auto& d : draws) {
    for (std::size_t x = 0; x < space.size(); ++x) {
      mean[x] += d.measure[x] / static_cast<double>(draws.size());
    }
    list.push_back({{"measure", Measure(space, d.measure.weights())},
                    {"residual", d.residual},
                    {"residual_reassigned", d.residual_reassigned},
                    {"sticks", to_json(d.sticks, space)}});
  }
  body["draws"] = std::move(list);
  body["mean"] = Measure(space, mean);
  ctx.WriteCsv("measures.csv", [&](std::ostream& os) {
    os << "replicate,label,probability\n";
    for (std::size_t r = 0; r < draws.size(); ++r) {
      for (std::size_t x = 0; x < space.size(); ++x) {
        os << r << "," << space.label(x) << "," << Num(draws[r].measure[x]) << "\n";
      }
    }
  });
  ctx.WriteCsv("sticks.csv", [&](std::ostream& os) {
    os << "replicate,level,stick,weight,atom\n";
    for (std::size_t r = 0; r < draws.size(); ++r) {
      SticksCsv(os, r, draws[r].sticks, space);
    }
  });
}

Outcome SamplePrior(Context& ctx) {
  const TaskConfig& t = ctx.task();
  const double theta = ctx.model().theta;
  const std::size_t levels = ctx.Levels(theta);
  json body = {{"theta", theta}, {"levels", levels}, {"seed", t.seed},
               {"expected_residual",
                std::pow(theta / (theta + 1.0), static_cast<double>(levels))}};
  if (!ctx.model().is_finite()) {
    const GeneralKernel kernel = ctx.model().general->build();
    json list = json::array();
    std::vector<KernelParticleDraw> draws;
    for (std::size_t r = 0; r < t.replicates; ++r) {
      draws.push_back(sample_kernel_sb(theta, kernel, levels, t.seed, r));
      list.push_back(to_json(draws.back().sticks));
    }
    ctx.WriteCsv("sticks.csv", [&](std::ostream& os) {
      os << "replicate,level,stick,weight,atom\n";
      for (std::size_t r = 0; r < draws.size(); ++r) {
        const auto& d = draws[r].sticks;
        for (std::size_t j = 0; j < d.sticks.size(); ++j) {
          os << r << "," << j + 1 << "," << Num(d.sticks[j]) << ","
             << Num(d.weights[j]) << "," << Num(d.atoms[j]) << "\n";
        }
      }
    });
    body["kernel"] = kernel.name;
    body["draws"] = std::move(list);
    ctx.WriteReport(std::move(body));
    return {};
  }
  const FiniteKernel kernel = ctx.model().kernel();
  std::vector<RandomMeasureDraw> draws;
  for (std::size_t r = 0; r < t.replicates; ++r) {
    draws.push_back(sample_kernel_sb(theta, ctx.nu(), kernel, levels, t.seed, r));
  }
  MeasureDrawOutputs(ctx, draws, body);
  ctx.WriteReport(std::move(body));
  return {};
}

Outcome SamplePosterior(Context& ctx) {
  const TaskConfig& t = ctx.task();
  const UrnSpec spec = ctx.Spec();
  const double theta_n = spec.theta + static_cast<double>(t.data.size());
  const std::size_t levels = ctx.Levels(theta_n);
  std::vector<RandomMeasureDraw> draws;
  for (std::size_t r = 0; r < t.replicates; ++r) {
    draws.push_back(sample_posterior(spec.theta, spec.nu, spec.kernel, t.data,
                                     levels, t.seed, r));
  }
  json data = json::array();
  for (std::size_t x : t.data) data.push_back(ctx.Label(x));
  json body = {
      {"theta", spec.theta},
      {"posterior_theta", theta_n},
      {"levels", levels},
      {"seed", t.seed},
      {"data", std::move(data)},
      {"posterior_base",
       Measure(ctx.space(),
               posterior_base(spec.theta, spec.nu, spec.kernel, t.data).weights())},
      {"predictive",
       Measure(ctx.space(), predictive(replay(spec, t.data)).weights())}};
  MeasureDrawOutputs(ctx, draws, body);
  ctx.WriteReport(std::move(body));
  return {};
}

Outcome SampleHierarchical(Context& ctx) {
  const TaskConfig& t = ctx.task();
  const HierarchicalSampler sampler(ctx.model().theta, ctx.nu(), ctx.RequirePartition());
  const Partition& p = sampler.partition();
  const FiniteSpace blocks = p.block_space();
  const std::size_t levels = ctx.Levels(ctx.model().theta);
  std::vector<HierarchicalSample> draws;
  json list = json::array();
  for (std::size_t r = 0; r < t.replicates; ++r) {
    draws.push_back(sampler.draw(t.n, levels, t.seed, r));
    list.push_back({{"q", Measure(blocks, draws.back().q)},
                    {"sticks", to_json(draws.back().q_sticks, blocks)}});
  }
  ctx.WriteCsv("samples.csv", [&](std::ostream& os) {
    os << "replicate,index,block,draw\n";
    for (std::size_t r = 0; r < draws.size(); ++r) {
      for (std::size_t i = 0; i < draws[r].samples.size(); ++i) {
        os << r << "," << i + 1 << "," << p.block_label(draws[r].labels[i]) << ","
           << ctx.Label(draws[r].samples[i]) << "\n";
      }
    }
  });
  ctx.WriteCsv("sticks.csv", [&](std::ostream& os) {
    os << "replicate,level,stick,weight,atom\n";
    for (std::size_t r = 0; r < draws.size(); ++r) {
      SticksCsv(os, r, draws[r].q_sticks, blocks);
    }
  });
  ctx.WriteReport({{"theta", ctx.model().theta},
                   {"levels", levels},
                   {"n", t.n},
                   {"seed", t.seed},
                   {"nu_pi", Measure(blocks, sampler.nu_pi().weights())},
                   {"draws", std::move(list)}});
  return {};
}

Outcome SampleNull(Context& ctx) {
  const TaskConfig& t = ctx.task();
  const Partition& p = ctx.RequirePartition();
  const NullMixtureSampler sampler(ctx.model().theta, ctx.nu(), p,
                                   ctx.model().null_set);
  const std::size_t levels = ctx.Levels(ctx.model().theta);
  const FiniteSpace blocks = p.block_space();
  std::vector<NullMixtureSample> draws;
  json list = json::array();
  for (std::size_t r = 0; r < t.replicates; ++r) {
    draws.push_back(sampler.draw(t.n, levels, t.seed, r));
    const auto& d = draws.back();
    json q = json::object();
    for (std::size_t j = 0; j < d.live_blocks.size(); ++j) {
      q[p.block_label(d.live_blocks[j])] = d.q[j];
    }
    list.push_back({{"q", std::move(q)}});
  }
  ctx.WriteCsv("samples.csv", [&](std::ostream& os) {
    os << "replicate,index,xi,block,draw\n";
    for (std::size_t r = 0; r < draws.size(); ++r) {
      const auto& d = draws[r];
      for (std::size_t i = 0; i < d.samples.size(); ++i) {
        os << r << "," << i + 1 << "," << (d.xi[i] ? 1 : 0) << ","
           << (d.labels[i] == kNoBlock ? std::string("null") : p.block_label(d.labels[i]))
           << "," << ctx.Label(d.samples[i]) << "\n";
      }
    }
  });
  json z = json::array();
  for (std::size_t x : ctx.model().null_set) z.push_back(ctx.Label(x));
  ctx.WriteReport({{"theta", ctx.model().theta},
                   {"levels", levels},
                   {"n", t.n},
                   {"seed", t.seed},
                   {"null_set", std::move(z)},
                   {"live_mass", sampler.live_mass()},
                   {"draws", std::move(list)}});
  return {};
}

std::vector<std::size_t> Checkpoints(const TaskConfig& t) {
  if (!t.checkpoints.empty()) {
    if (t.checkpoints.back() > t.n) {
      throw Error(ErrorCode::kInvalidArgument,
                  "checkpoints exceed task.n = " + std::to_string(t.n));
    }
    return t.checkpoints;
  }
  std::vector<std::size_t> out;
  for (std::size_t c = 1; c < t.n; c *= 10) out.push_back(c);
  if (t.n > 0) out.push_back(t.n);
  return out;
}

void TraceCsv(std::ostream& os, const std::vector<TraceSeries>& traces,
              const std::string& name) {
  os << "replicate,step,value\n";
  for (std::size_t r = 0; r < traces.size(); ++r) {
    const auto& v = traces[r].at(name);
    for (std::size_t i = 0; i < v.size(); ++i) {
      os << r << "," << traces[r].steps()[i] << "," << Num(v[i]) << "\n";
    }
  }
}

Outcome Diagnose(Context& ctx) {
  const TaskConfig& t = ctx.task();
  if (!ctx.model().is_finite()) {
    CheckReport r = martingale_increment_check(ctx.GeneralSpec(), HalfLines(t.test_sets),
                                               t.depth, t.replicates, t.inner, t.seed);
    ctx.WriteCsv("increments.csv", [&](std::ostream& os) {
      os << "set,step,mean,standard_error,z\n";
      for (const json& row : r.data["increments"]) {
        os << row["set"].get<std::string>() << "," << row["step"].get<std::size_t>()
           << "," << Num(row["mean"].get<double>()) << ","
           << Num(row["standard_error"].get<double>()) << ","
           << Num(row["z"].get<double>()) << "\n";
      }
    });
    ctx.WriteReport({{"report", r.to_json()}});
    return {r.passed, r.passed ? "" : "martingale increments are not centred"};
  }

  const std::vector<std::size_t> cps = Checkpoints(t);
  CheckReport r;
  if (t.recursion) {
    // The recursion is c.i.d. by construction; no urn to enumerate.
    r = CheckReport("martingale_increment", t.tol);
    r.data["skipped"] = "q_n recursion";
    r.finalize();
  } else {
    r = martingale_increment_check(ctx.Spec(), t.depth, t.tol);
  }
  std::vector<TraceSeries> tv, emp, block;
  for (std::size_t rep = 0; rep < t.replicates; ++rep) {
    const Trajectory tr = FiniteTrajectory(ctx, t.n, rep, t.recursion.has_value());
    tv.push_back(tv_predictive_trace(tr, cps));
    if (tr.spec) emp.push_back(empirical_vs_predictive(tr, cps));
    if (ctx.model().partition) {
      block.push_back(tv_predictive_trace(tr, cps, *ctx.model().partition));
    }
  }
  auto first_values = [](const std::vector<TraceSeries>& traces) {
    json out = json::array();
    for (const auto& s : traces) {
      const auto& v = s.at("tv");
      out.push_back(v.empty() ? json(nullptr) : json(v.front()));
    }
    return out;
  };
  json body = {{"report", r.to_json()},
               {"checkpoints", cps},
               {"n", t.n},
               {"seed", t.seed},
               {"replicates", t.replicates},
               {"tv_first_checkpoint", first_values(tv)}};
  ctx.WriteCsv("tv.csv", [&](std::ostream& os) { TraceCsv(os, tv, "tv"); });
  if (!emp.empty()) {
    ctx.WriteCsv("empirical.csv", [&](std::ostream& os) { TraceCsv(os, emp, "tv"); });
  }
  if (!block.empty()) {
    ctx.WriteCsv("block_tv.csv", [&](std::ostream& os) { TraceCsv(os, block, "tv"); });
    body["block_tv_first_checkpoint"] = first_values(block);
  }
  ctx.WriteReport(std::move(body));
  return {r.passed, r.passed ? "" : "predictives are not martingales"};
}

using Handler = Outcome (*)(Context&);

const std::vector<std::pair<std::string, Handler>>& Handlers() {
  static const std::vector<std::pair<std::string, Handler>> kHandlers = {
      {"simulate", Simulate},
      {"check-exchangeable", CheckExchangeable},
      {"check-cid", CheckCid},
      {"check-kernel", CheckKernel},
      {"decompose", Decompose},
      {"structure-cid", StructureCid},
      {"project-atoms", ProjectAtoms},
      {"sample-prior", SamplePrior},
      {"sample-posterior", SamplePosterior},
      {"sample-hierarchical", SampleHierarchical},
      {"sample-null", SampleNull},
      {"diagnose", Diagnose},
  };
  return kHandlers;
}

fs::path OutputDirectory(const ExperimentConfig& c, const RunOverrides& o) {
  if (o.out) return *o.out;
  if (c.output.directory) return *c.output.directory;
  if (const char* env = std::getenv(kOutputEnvVar); env && *env) return env;
  return kDefaultOutputDirectory;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> out;
    for (const auto& [name, handler] : Handlers()) out.push_back(name);
    return out;
  }();
  return kNames;
}

RunResult run(const std::string& subcommand, const std::string& config_path,
              const RunOverrides& overrides, std::ostream& log) {
  RunResult result;
  const auto& handlers = Handlers();
  const auto it = std::find_if(handlers.begin(), handlers.end(),
                               [&](const auto& h) { return h.first == subcommand; });
  if (it == handlers.end()) {
    result.error = ErrorCode::kInvalidArgument;
    result.message = "unknown subcommand '" + subcommand + "'";
    log << "error: " << result.message << "\n";
    return result;
  }
  try {
    ExperimentConfig config = load_config(config_path);
    TaskConfig& t = config.task;
    if (overrides.seed) t.seed = *overrides.seed;
    if (overrides.tol) {
      if (!(*overrides.tol >= 0.0)) {
        throw Error(ErrorCode::kConfigInvalid, "--tol must be non-negative");
      }
      t.tol = *overrides.tol;
    }
    if (overrides.replicates) {
      if (*overrides.replicates == 0) {
        throw Error(ErrorCode::kConfigInvalid, "--replicates must be at least 1");
      }
      t.replicates = *overrides.replicates;
    }
    if (overrides.depth) t.depth = *overrides.depth;
    const fs::path dir = OutputDirectory(config, overrides);
    result.output_directory = dir.string();
    Context ctx(subcommand, std::move(config), dir);
    Outcome outcome;
    try {
      outcome = it->second(ctx);
    } catch (...) {
      result.files = ctx.files();
      throw;
    }
    result.files = ctx.files();
    result.exit_code = outcome.passed ? kExitPassed : kExitFailed;
    result.message = outcome.passed ? "passed" : outcome.message;
    log << subcommand << ": " << (outcome.passed ? "passed" : "FAILED")
        << (outcome.passed ? "" : " (" + outcome.message + ")") << "\n";
  } catch (const Error& e) {
    result.exit_code = kExitInvalid;
    result.error = e.code();
    result.message = std::string(ErrorCodeName(e.code())) + ": " + e.what();
    log << "error: " << result.message << "\n";
  } catch (const std::exception& e) {
    result.exit_code = kExitInvalid;
    result.message = std::string("internal error: ") + e.what();
    log << "error: " << result.message << "\n";
  }
  return result;
}

}  // namespace mvps
