// Copyright 2026 The gmrf-graphlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gmrf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "gmrf/attributes.hpp"
#include "gmrf/csv.hpp"
#include "gmrf/error.hpp"
#include "gmrf/linbp.hpp"
#include "gmrf/metrics.hpp"
#include "gmrf/parallel.hpp"
#include "gmrf/random.hpp"

namespace gmrf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::pair<Command, std::string>>& command_table() {
  static const std::vector<std::pair<Command, std::string>> table = {
      {Command::kSample, "sample"},     {Command::kFit, "fit"},
      {Command::kPredict, "predict"},   {Command::kEvaluate, "evaluate"},
      {Command::kEstimateR2, "estimate-r2"}, {Command::kSpectra, "spectra"}};
  return table;
}

// One JSON object of the config. Every key read is recorded; finish() rejects
// the rest.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(label() + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  Section section(const std::string& key) { return Section(at(key), key_path(key)); }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  long long integer(const std::string& key, long long fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<long long>();
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    fail(key, "expected a non-negative integer");
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  void require(bool ok, const std::string& key, const std::string& what) const {
    if (!ok) fail(key, what);
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(key_path(key) + ": " + what);
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError("unknown config key: " + key_path(item.key()));
    }
  }

 private:
  std::string label() const { return path_.empty() ? "config" : path_; }
  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string resolve_path(const std::string& p, const std::string& base_dir) {
  if (p.empty()) return p;
  const fs::path path(p);
  if (path.is_absolute()) return path.lexically_normal().string();
  return (fs::path(base_dir) / path).lexically_normal().string();
}

bool input_empty(const InputSpec& in) { return !in.synthetic && in.edges.empty(); }

InputSpec parse_input(Section s, const std::string& base_dir) {
  InputSpec in;
  const bool synthetic = s.has("synthetic");
  const bool edges = s.has("edges");
  if (synthetic == edges) s.fail("synthetic", "set exactly one of synthetic or edges");
  if (synthetic) {
    s.require(!s.has("attributes"), "attributes", "not allowed with a synthetic input");
    Section t = s.section("synthetic");
    SyntheticInput si;
    si.n = static_cast<int>(t.integer("n", si.n));
    si.avg_degree = static_cast<int>(t.integer("avg_degree", si.avg_degree));
    si.rewire_prob = t.number("rewire_prob", si.rewire_prob);
    si.p = static_cast<int>(t.integer("p", si.p));
    si.h0 = t.number("h0", si.h0);
    t.require(si.n >= 3, "n", "must be at least 3");
    t.require(si.avg_degree >= 2 && si.avg_degree % 2 == 0 && si.avg_degree < si.n, "avg_degree",
              "must be even, at least 2 and below n");
    t.require(si.rewire_prob >= 0.0 && si.rewire_prob <= 1.0, "rewire_prob", "must lie in [0, 1]");
    t.require(si.p >= 0, "p", "must be non-negative");
    t.require(si.h0 > 0.0 && std::isfinite(si.h0), "h0", "must be positive");
    t.finish();
    in.synthetic = si;
  } else {
    in.edges = resolve_path(s.string("edges", ""), base_dir);
    in.attributes = resolve_path(s.string("attributes", ""), base_dir);
    s.require(!in.edges.empty(), "edges", "must not be empty");
  }
  s.finish();
  return in;
}

std::vector<double> parse_omega_grid(Section& parent, const std::string& key) {
  const json& v = parent.at(key);
  std::vector<double> grid;
  if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) parent.fail(key, "expected numbers");
      grid.push_back(e.get<double>());
    }
  } else if (v.is_object()) {
    Section r = parent.section(key);
    const double lo = r.number("lo", 0.1);
    const double hi = r.number("hi", 100.0);
    const long long count = r.integer("count", 13);
    r.require(lo > 0.0 && hi >= lo && std::isfinite(hi), "lo", "need 0 < lo <= hi");
    r.require(count >= 1 && count <= 10000, "count", "must lie in [1, 10000]");
    r.finish();
    grid = log_grid(lo, hi, static_cast<int>(count));
  } else {
    parent.fail(key, "expected an array or {lo, hi, count}");
  }
  for (double w : grid) parent.require(w >= 0.0 && std::isfinite(w), key, "entries must be >= 0");
  return grid;
}

std::string executor_name(Executor e) {
  return e == Executor::kFixedPoint ? "fixed_point" : "cg";
}

std::string method_name(SolveMethod m) {
  switch (m) {
    case SolveMethod::kAuto: return "auto";
    case SolveMethod::kDense: return "dense";
    case SolveMethod::kSpectral: return "spectral";
    case SolveMethod::kStochastic: return "stochastic";
  }
  return "auto";
}

std::string filter_kind_name(FilterSpec::Kind k) { return k == FilterSpec::Kind::kLGC ? "LGC" : "SGC"; }

std::vector<FilterSpec> default_filters() {
  std::vector<FilterSpec> out;
  for (double w : {0.1, 1.0, 10.0, 100.0}) {
    FilterSpec f;
    f.kind = FilterSpec::Kind::kLGC;
    f.omega = w;
    out.push_back(f);
  }
  for (int K : {1, 2, 4}) {
    FilterSpec f;
    f.kind = FilterSpec::Kind::kSGC;
    f.K = K;
    f.degree = 6.0;
    out.push_back(f);
  }
  return out;
}

ojson input_json(const InputSpec& in) {
  ojson j = ojson::object();
  if (in.synthetic) {
    const SyntheticInput& s = *in.synthetic;
    j["synthetic"] = {{"n", s.n}, {"avg_degree", s.avg_degree}, {"rewire_prob", s.rewire_prob},
                      {"p", s.p}, {"h0", s.h0}};
  } else {
    j["edges"] = in.edges;
    if (!in.attributes.empty()) j["attributes"] = in.attributes;
  }
  return j;
}

ojson hyperparameters_json(Algorithm alg, const Hyperparameters& hp) {
  ojson j = ojson::object();
  if (algorithm_uses_omega(alg)) j["omega"] = hp.omega;
  if (algorithm_uses_k(alg)) j["K"] = hp.K;
  if (alg == Algorithm::kLGCRP || alg == Algorithm::kSGCRP) {
    j["rp_omega"] = std::isnan(hp.rp_omega) ? hp.omega : hp.rp_omega;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Data preparation.

struct Dataset {
  Graph graph;
  std::optional<AttributeMatrix> attrs;
  std::optional<GmrfParams> params;
};

Graph build_graph(const ExperimentConfig& cfg, const InputSpec& in, std::uint64_t index) {
  if (input_empty(in)) throw ConfigError("this command needs an input section");
  if (in.synthetic) {
    const SyntheticInput& s = *in.synthetic;
    return watts_strogatz(s.n, s.avg_degree, s.rewire_prob,
                          derive_seed(cfg.seed, streams::kGraph, index));
  }
  return load_edge_list(in.edges);
}

std::optional<GmrfParams> model_params(const ExperimentConfig& cfg, const InputSpec& in) {
  std::optional<GmrfParams> params;
  if (!cfg.params_path.empty()) params = load_params(cfg.params_path);
  if (in.synthetic) {
    const SyntheticInput& s = *in.synthetic;
    if (!params) {
      params = synthetic_params(s.p, s.h0, derive_seed(cfg.seed, streams::kParams));
    } else if (params->num_attributes() != s.p + 1) {
      throw ConfigError("params: dimension does not match input.synthetic.p");
    }
  }
  return params;
}

ModelOptions sampling_options(const ExperimentConfig& cfg) {
  ModelOptions opts = cfg.model;
  if (opts.method == SolveMethod::kStochastic) opts.method = SolveMethod::kAuto;
  return opts;
}

Dataset load_dataset(const ExperimentConfig& cfg, const InputSpec& in, std::uint64_t index,
                     bool need_attributes) {
  Dataset d;
  d.graph = build_graph(cfg, in, index);
  d.params = model_params(cfg, in);
  if (in.synthetic) {
    if (need_attributes) {
      d.attrs = sample(*d.params, d.graph, derive_seed(cfg.seed, streams::kSample, index),
                       sampling_options(cfg));
    }
  } else if (!in.attributes.empty()) {
    d.attrs = load_attributes(in.attributes, d.graph);
    if (d.params && d.params->num_attributes() != d.attrs->values.cols()) {
      throw DataError("params: dimension does not match the attribute file");
    }
  } else if (need_attributes) {
    throw ConfigError("input.attributes is required for this command");
  }
  return d;
}

std::vector<std::string> outcome_names(const ExperimentConfig& cfg, const AttributeMatrix& a) {
  if (cfg.outcome == "*") return a.names;
  if (cfg.outcome.empty()) return {a.names.back()};
  for (const auto& name : a.names) {
    if (name == cfg.outcome) return {name};
  }
  throw ConfigError("outcome: no attribute column named '" + cfg.outcome + "'");
}

int column_index(const AttributeMatrix& a, const std::string& name) {
  for (std::size_t j = 0; j < a.names.size(); ++j) {
    if (a.names[j] == name) return static_cast<int>(j);
  }
  throw ConfigError("no attribute column named '" + name + "'");
}

// Parameters with column `col` moved to the outcome position, the others kept
// in order (the same permutation as AttributeMatrix::with_outcome).
GmrfParams params_with_outcome(const GmrfParams& params, int col) {
  const Index k = params.num_attributes();
  std::vector<Index> order;
  for (Index j = 0; j < k; ++j) {
    if (j != col) order.push_back(j);
  }
  order.push_back(col);
  MatrixXd H(k, k);
  VectorXd h(k);
  for (Index r = 0; r < k; ++r) {
    h(r) = params.h()(order[r]);
    for (Index c = 0; c < k; ++c) H(r, c) = params.H()(order[r], order[c]);
  }
  return GmrfParams(H, h);
}

struct OutcomeData {
  std::string name;
  MatrixXd X;
  VectorXd y;
  double offset = 0.0;
};

OutcomeData outcome_data(const ExperimentConfig& cfg, const AttributeMatrix& a,
                         const std::string& name) {
  const AttributeMatrix moved = a.with_outcome(name);
  OutcomeData out;
  out.name = name;
  out.X = moved.features();
  if (cfg.cv.metric == Metric::kF1) {
    out.y = moved.raw_outcome();
  } else {
    out.y = moved.outcome();
    if (moved.offsets.size() == moved.values.cols()) out.offset = moved.offsets(moved.values.cols() - 1);
  }
  return out;
}

std::vector<int> binary_labels(const VectorXd& y) {
  std::vector<int> out(static_cast<std::size_t>(y.size()));
  for (Index i = 0; i < y.size(); ++i) out[static_cast<std::size_t>(i)] = y(i) >= 0.5 ? 1 : 0;
  return out;
}

NodeIndexSet repeat_split(const ExperimentConfig& cfg, int n, int repeat) {
  return random_split(n, cfg.train_fraction,
                      derive_seed(cfg.seed, streams::kRepeat, static_cast<std::uint64_t>(repeat)));
}

NodeIndexSet training_split(const ExperimentConfig& cfg, int n, int repeat) {
  return random_split(n, cfg.train_fraction,
                      derive_seed(cfg.seed, streams::kSplit, static_cast<std::uint64_t>(repeat)));
}

std::uint64_t cv_seed(const ExperimentConfig& cfg, int repeat) {
  return derive_seed(cfg.seed, streams::kFold, static_cast<std::uint64_t>(repeat));
}

// ---------------------------------------------------------------------------
// Running one predictor.

struct Selection {
  Hyperparameters hp;
  double cv_score = kNaN;
  double threshold = kNaN;
};

Selection select_hyperparameters(Algorithm alg, const ExperimentConfig& cfg, const Graph& g,
                                 const MatrixXd& X, const SplitSpec& split, std::uint64_t seed) {
  Selection sel;
  if (cfg.fixed && cfg.cv.metric == Metric::kR2) {
    sel.hp = *cfg.fixed;
    return sel;
  }
  CvPlan plan = cfg.cv;
  plan.seed = seed;
  if (cfg.fixed) {
    plan.omega_grid = {cfg.fixed->omega};
    plan.k_grid = {cfg.fixed->K};
    plan.rp_omega_grid.clear();
    if (!std::isnan(cfg.fixed->rp_omega)) plan.rp_omega_grid = {cfg.fixed->rp_omega};
  }
  const CvResult cv = cross_validate(g, X, split, alg, plan);
  sel.hp = cv.best;
  sel.cv_score = cv.best_score;
  if (cfg.cv.metric == Metric::kF1) sel.threshold = cv.threshold;
  return sel;
}

double score_predictions(const ExperimentConfig& cfg, const VectorXd& pred, const VectorXd& truth,
                         double threshold) {
  if (cfg.cv.metric == Metric::kR2) return r_squared(pred, truth);
  return f1_score(classify_by_threshold(pred, threshold), binary_labels(truth));
}

LinBpConfig linbp_config(const ExperimentConfig& cfg, const Graph& g) {
  const double rho = adjacency_spectral_radius(g);
  if (!(rho > 0.0)) throw DataError("LinBP needs a graph with at least one edge");
  return LinBpConfig::create(g, 2, *cfg.linbp_eps_fraction * 2.0 / rho, cfg.cv.budget);
}

// A predictor entry in a run table: one of the configured algorithms, or
// LinBP (no value).
struct Entry {
  std::optional<Algorithm> alg;
  std::string name() const { return alg ? algorithm_name(*alg) : "LinBP"; }
};

std::vector<Entry> entries(const ExperimentConfig& cfg) {
  std::vector<Entry> out;
  for (Algorithm a : cfg.algorithms) out.push_back({a});
  if (cfg.linbp_eps_fraction) out.push_back({std::nullopt});
  return out;
}

std::string file_stem(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    if (c == '/') c = '-';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output.

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : root_(dir) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw DataError("cannot create output directory " + dir + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = root_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
    if (!out) throw DataError("write failed: " + path.string());
    written_.push_back(path.string());
  }

  void write_json(const std::string& name, const ojson& j) { write(name, j.dump(2) + "\n"); }

  void note(const std::string& path) { written_.push_back(path); }
  fs::path path(const std::string& name) const { return root_ / name; }
  const std::vector<std::string>& written() const { return written_; }

 private:
  fs::path root_;
  std::vector<std::string> written_;
};

ojson summary_header(Command c, const ExperimentConfig& cfg) {
  ojson j;
  j["spec_version"] = kSchemaVersion;
  j["command"] = command_name(c);
  j["config"] = cfg.resolved;
  return j;
}

std::string fmt(double x) { return std::isnan(x) ? "" : csv::format_double(x); }

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// ---------------------------------------------------------------------------
// Commands.

std::vector<std::string> cmd_sample(const ExperimentConfig& cfg) {
  const Dataset d = load_dataset(cfg, cfg.input, 0, cfg.input.synthetic.has_value());
  if (!d.params) throw ConfigError("sample needs model parameters: set params or use a synthetic input");
  AttributeMatrix out;
  std::vector<int> observed;
  if (cfg.conditional_on.empty()) {
    if (d.attrs) {
      out = cfg.input.synthetic ? *d.attrs
                                : sample(*d.params, d.graph, derive_seed(cfg.seed, streams::kSample),
                                         sampling_options(cfg));
      if (!cfg.input.synthetic) out.names = d.attrs->names;
    } else {
      out = sample(*d.params, d.graph, derive_seed(cfg.seed, streams::kSample), sampling_options(cfg));
    }
  } else {
    if (!d.attrs) throw ConfigError("sample.conditional_on needs input attributes");
    for (const auto& name : cfg.conditional_on) observed.push_back(column_index(*d.attrs, name));
    out = sample_conditional(*d.params, d.graph, *d.attrs, observed,
                             derive_seed(cfg.seed, streams::kSample, 2), sampling_options(cfg));
    out.names = d.attrs->names;
    if (d.attrs->offsets.size() == out.values.cols()) {
      out.values.rowwise() += d.attrs->offsets.transpose();
    }
  }

  OutputDir dir(cfg.output_dir);
  write_edge_list(d.graph, dir.path("graph.csv").string());
  dir.note(dir.path("graph.csv").string());
  write_attributes(out, d.graph, dir.path("attributes.csv").string());
  dir.note(dir.path("attributes.csv").string());
  dir.write("params.json", params_to_json(*d.params));

  ojson j = summary_header(Command::kSample, cfg);
  ojson res;
  res["nodes"] = d.graph.num_nodes();
  res["edges"] = d.graph.num_edges();
  res["attributes"] = out.names;
  ojson omega = ojson::array();
  for (Index i = 0; i < d.params->num_attributes(); ++i) omega.push_back(d.params->omega(i));
  res["omega"] = omega;
  ojson sd = ojson::array();
  for (Index c = 0; c < out.values.cols(); ++c) {
    const VectorXd col = out.values.col(c);
    const double m = col.mean();
    sd.push_back(std::sqrt((col.array() - m).square().sum() / std::max<Index>(1, col.size() - 1)));
  }
  res["column_std"] = sd;
  res["conditional_on"] = cfg.conditional_on;
  res["files"] = {"graph.csv", "attributes.csv", "params.json"};
  j["result"] = res;
  dir.write_json("sample.json", j);
  return dir.written();
}

FitResult fit_dataset(const ExperimentConfig& cfg, const Dataset& d) {
  FitConfig fc = cfg.fit;
  fc.model = cfg.model;
  fc.model.slq.seed = derive_seed(cfg.seed, streams::kProbe);
  fc.seed = derive_seed(cfg.seed, streams::kRestart);
  return fit(d.graph, *d.attrs, fc);
}

std::vector<std::string> cmd_fit(const ExperimentConfig& cfg) {
  const Dataset d = load_dataset(cfg, cfg.input, 0, true);
  const FitResult fr = fit_dataset(cfg, d);

  OutputDir dir(cfg.output_dir);
  dir.write("fitted_params.json", params_to_json(fr.params));
  std::ostringstream trace;
  trace << "restart,step,nll\n";
  for (const auto& t : fr.trace) trace << t.restart << ',' << t.step << ',' << fmt(t.nll) << '\n';
  dir.write("nll_trace.csv", trace.str());

  ojson j = summary_header(Command::kFit, cfg);
  ojson res;
  res["nll"] = fr.nll;
  res["best_restart"] = fr.best_restart;
  res["restart_nll"] = fr.restart_nll;
  res["attributes"] = d.attrs->names;
  res["params"] = ojson::parse(params_to_json(fr.params));
  if (d.params) {
    const GmrfParams& truth = *d.params;
    const Index k = truth.num_attributes();
    double h_err = 0.0;
    for (Index i = 0; i < k; ++i) h_err += std::abs(fr.params.h()(i) - truth.h()(i)) / truth.h()(i);
    int matches = 0;
    int pairs = 0;
    for (Index r = 0; r < k; ++r) {
      for (Index c = r + 1; c < k; ++c) {
        ++pairs;
        const auto sign = [](double x) { return (x > 0.0) - (x < 0.0); };
        if (sign(fr.params.H()(r, c)) == sign(truth.H()(r, c))) ++matches;
      }
    }
    ojson cmp;
    cmp["h_mean_relative_error"] = h_err / static_cast<double>(k);
    cmp["H_relative_frobenius_error"] = (fr.params.H() - truth.H()).norm() / truth.H().norm();
    cmp["offdiagonal_sign_agreement"] =
        pairs == 0 ? 1.0 : static_cast<double>(matches) / static_cast<double>(pairs);
    ModelOptions opts = cfg.model;
    opts.slq.seed = derive_seed(cfg.seed, streams::kProbe);
    cmp["true_params_nll"] = nll(truth, d.graph, *d.attrs, opts);
    cmp["true_params"] = ojson::parse(params_to_json(truth));
    res["ground_truth"] = cmp;
  }
  j["result"] = res;
  dir.write_json("fit.json", j);
  return dir.written();
}

std::vector<std::string> cmd_predict(const ExperimentConfig& cfg) {
  if (cfg.outcome == "*") throw ConfigError("predict needs a single outcome column");
  const Dataset d = load_dataset(cfg, cfg.input, 0, true);
  const OutcomeData od = outcome_data(cfg, *d.attrs, outcome_names(cfg, *d.attrs).front());

  // Training graph: the input itself, or the second graph for inductive runs.
  std::optional<Dataset> d2;
  std::optional<OutcomeData> od2;
  if (cfg.inductive) {
    d2 = load_dataset(cfg, cfg.inductive_input, 1, true);
    od2 = outcome_data(cfg, *d2->attrs, od.name);
  }
  const Graph& g_train = d2 ? d2->graph : d.graph;
  const OutcomeData& train = od2 ? *od2 : od;

  NodeIndexSet labeled;
  if (!cfg.labeled_nodes.empty()) {
    std::ifstream in(cfg.labeled_nodes);
    if (!in) throw DataError("cannot open labeled node file: " + cfg.labeled_nodes);
    std::vector<int> idx;
    const auto& ids = g_train.node_ids();
    std::string line;
    while (std::getline(in, line)) {
      const auto fields = csv::split_line(line);
      if (fields.empty()) continue;
      const auto it = std::find(ids.begin(), ids.end(), fields.front());
      if (it == ids.end()) throw DataError("labeled node file: unknown node '" + fields.front() + "'");
      idx.push_back(static_cast<int>(it - ids.begin()));
    }
    try {
      labeled = NodeIndexSet::from_unsorted(std::move(idx), g_train.num_nodes());
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string("labeled node file: ") + e.what());
    }
  } else {
    labeled = cfg.inductive ? training_split(cfg, g_train.num_nodes(), 0)
                            : repeat_split(cfg, d.graph.num_nodes(), 0);
  }
  const SplitSpec split = SplitSpec::from_outcome(labeled, train.y);
  // Nodes that receive predictions, in output order.
  const NodeIndexSet targets = cfg.inductive ? NodeIndexSet::all(d.graph.num_nodes()) : split.unlabeled;
  if (targets.empty()) throw ConfigError("predict: every node is labeled");

  const std::vector<Entry> list = entries(cfg);
  struct Output {
    Selection sel;
    VectorXd pred;
    std::vector<int> classes;
    Diagnostics diag;
  };
  std::vector<Output> outputs(list.size());
  parallel_for(list.size(), [&](std::size_t i) {
    Output& o = outputs[i];
    if (!list[i].alg) {
      o.classes = linbp_predict(g_train, split.labeled, binary_labels(split.y_labeled),
                                linbp_config(cfg, g_train));
      return;
    }
    const Algorithm alg = *list[i].alg;
    o.sel = select_hyperparameters(alg, cfg, g_train, train.X, split, cv_seed(cfg, 0));
    if (cfg.inductive) {
      o.pred = predict_inductive(alg, g_train, train.X, split, d.graph, od.X, o.sel.hp, cfg.cv.budget);
    } else {
      o.pred = predict(alg, g_train, train.X, split, o.sel.hp, cfg.cv.budget, &o.diag);
    }
    if (cfg.cv.metric == Metric::kF1) o.classes = classify_by_threshold(o.pred, o.sel.threshold);
  });

  OutputDir dir(cfg.output_dir);
  ojson j = summary_header(Command::kPredict, cfg);
  ojson res;
  res["outcome"] = od.name;
  res["labeled"] = labeled.size();
  res["predicted"] = targets.size();
  ojson algs = ojson::object();
  const auto& ids = d.graph.node_ids();
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Output& o = outputs[i];
    const std::string file = "predictions_" + file_stem(list[i].name()) + ".csv";
    std::ostringstream csv_out;
    const bool with_class = !o.classes.empty();
    csv_out << "node_id,prediction" << (with_class ? ",class" : "") << '\n';
    for (std::size_t t = 0; t < targets.size(); ++t) {
      csv_out << ids[static_cast<std::size_t>(targets[t])] << ',';
      if (list[i].alg) {
        csv_out << fmt(o.pred(static_cast<Index>(t)) + od.offset);
      } else {
        csv_out << o.classes[t];
      }
      if (with_class) csv_out << ',' << o.classes[t];
      csv_out << '\n';
    }
    dir.write(file, csv_out.str());
    ojson a;
    a["file"] = file;
    if (list[i].alg) {
      a["hyperparameters"] = hyperparameters_json(*list[i].alg, o.sel.hp);
      if (!std::isnan(o.sel.cv_score)) a["cv_score"] = o.sel.cv_score;
      if (!std::isnan(o.sel.threshold)) a["threshold"] = o.sel.threshold;
      a["iterations"] = o.diag.iterations;
      a["converged"] = o.diag.converged;
    } else {
      a["epsilon_fraction"] = *cfg.linbp_eps_fraction;
    }
    algs[list[i].name()] = a;
  }
  res["algorithms"] = algs;
  j["result"] = res;
  dir.write_json("predict.json", j);
  return dir.written();
}

struct RunRecord {
  std::string outcome;
  int repeat = 0;
  Selection sel;
  double score = kNaN;
  double estimate = kNaN;
  Diagnostics diag;
};

ojson run_json(const Entry& e, const RunRecord& r, bool with_estimate) {
  ojson j;
  j["outcome"] = r.outcome;
  j["repeat"] = r.repeat;
  if (with_estimate) {
    j["estimated"] = r.estimate;
    j["empirical"] = r.score;
  } else {
    j["score"] = r.score;
  }
  if (e.alg) j["hyperparameters"] = hyperparameters_json(*e.alg, r.sel.hp);
  if (!std::isnan(r.sel.threshold)) j["threshold"] = r.sel.threshold;
  return j;
}

std::string runs_csv(const std::vector<Entry>& list, const std::vector<std::vector<RunRecord>>& runs,
                     bool with_estimate) {
  std::ostringstream out;
  out << "outcome,repeat,algorithm," << (with_estimate ? "estimated,empirical" : "score")
      << ",omega,K,rp_omega,threshold,cv_score,iterations,converged\n";
  for (std::size_t e = 0; e < list.size(); ++e) {
    for (const RunRecord& r : runs[e]) {
      out << r.outcome << ',' << r.repeat << ',' << list[e].name() << ',';
      if (with_estimate) out << fmt(r.estimate) << ',';
      out << fmt(r.score) << ',';
      const bool uses_omega = list[e].alg && algorithm_uses_omega(*list[e].alg);
      const bool uses_k = list[e].alg && algorithm_uses_k(*list[e].alg);
      const bool rp = list[e].alg &&
                      (*list[e].alg == Algorithm::kLGCRP || *list[e].alg == Algorithm::kSGCRP);
      const Hyperparameters& hp = r.sel.hp;
      out << (uses_omega ? fmt(hp.omega) : "") << ',' << (uses_k ? std::to_string(hp.K) : "") << ','
          << (rp ? fmt(std::isnan(hp.rp_omega) ? hp.omega : hp.rp_omega) : "") << ','
          << fmt(r.sel.threshold) << ',' << fmt(r.sel.cv_score) << ',' << r.diag.iterations << ','
          << (r.diag.converged ? "true" : "false") << '\n';
    }
  }
  return out.str();
}

std::vector<std::string> cmd_evaluate(const ExperimentConfig& cfg) {
  const Dataset d = load_dataset(cfg, cfg.input, 0, true);
  std::optional<Dataset> d2;
  if (cfg.inductive) {
    d2 = load_dataset(cfg, cfg.inductive_input, 1, true);
    if (d2->attrs->names != d.attrs->names) {
      throw DataError("inductive input: attribute columns differ from the primary input");
    }
  }
  std::vector<OutcomeData> outcomes;
  std::vector<OutcomeData> outcomes2;
  for (const auto& name : outcome_names(cfg, *d.attrs)) {
    outcomes.push_back(outcome_data(cfg, *d.attrs, name));
    if (d2) outcomes2.push_back(outcome_data(cfg, *d2->attrs, name));
  }
  const std::vector<Entry> list = entries(cfg);
  const std::size_t per_entry = outcomes.size() * static_cast<std::size_t>(cfg.repeats);
  std::vector<std::vector<RunRecord>> runs(list.size(), std::vector<RunRecord>(per_entry));
  std::optional<LinBpConfig> bp;
  if (cfg.linbp_eps_fraction) bp = linbp_config(cfg, d.graph);

  parallel_for(list.size() * per_entry, [&](std::size_t task) {
    const std::size_t e = task / per_entry;
    const std::size_t slot = task % per_entry;
    const std::size_t o = slot / static_cast<std::size_t>(cfg.repeats);
    const int r = static_cast<int>(slot % static_cast<std::size_t>(cfg.repeats));
    const OutcomeData& od = outcomes[o];
    RunRecord& rec = runs[e][slot];
    rec.outcome = od.name;
    rec.repeat = r;
    const SplitSpec test = SplitSpec::from_outcome(repeat_split(cfg, d.graph.num_nodes(), r), od.y);
    const VectorXd truth = test.unlabeled.gather(od.y);
    if (!list[e].alg) {
      const std::vector<int> classes =
          linbp_predict(d.graph, test.labeled, binary_labels(test.y_labeled), *bp);
      rec.score = f1_score(classes, binary_labels(truth));
      return;
    }
    const Algorithm alg = *list[e].alg;
    VectorXd pred;
    if (d2) {
      const OutcomeData& od2 = outcomes2[o];
      const SplitSpec train =
          SplitSpec::from_outcome(training_split(cfg, d2->graph.num_nodes(), r), od2.y);
      rec.sel = select_hyperparameters(alg, cfg, d2->graph, od2.X, train, cv_seed(cfg, r));
      pred = test.unlabeled.gather(
          predict_inductive(alg, d2->graph, od2.X, train, d.graph, od.X, rec.sel.hp, cfg.cv.budget));
    } else {
      rec.sel = select_hyperparameters(alg, cfg, d.graph, od.X, test, cv_seed(cfg, r));
      pred = predict(alg, d.graph, od.X, test, rec.sel.hp, cfg.cv.budget, &rec.diag);
    }
    rec.score = score_predictions(cfg, pred, truth, rec.sel.threshold);
  });

  OutputDir dir(cfg.output_dir);
  ojson j = summary_header(Command::kEvaluate, cfg);
  ojson res;
  res["metric"] = cfg.cv.metric == Metric::kR2 ? "r2" : "f1";
  res["outcomes"] = [&] {
    std::vector<std::string> names;
    for (const auto& od : outcomes) names.push_back(od.name);
    return names;
  }();
  ojson algs = ojson::object();
  for (std::size_t e = 0; e < list.size(); ++e) {
    std::vector<double> scores;
    ojson by_outcome = ojson::object();
    ojson run_list = ojson::array();
    for (std::size_t o = 0; o < outcomes.size(); ++o) {
      std::vector<double> part;
      for (int r = 0; r < cfg.repeats; ++r) {
        const RunRecord& rec = runs[e][o * static_cast<std::size_t>(cfg.repeats) + static_cast<std::size_t>(r)];
        part.push_back(rec.score);
        scores.push_back(rec.score);
        run_list.push_back(run_json(list[e], rec, false));
      }
      by_outcome[outcomes[o].name] = mean_of(part);
    }
    ojson a;
    a["mean"] = mean_of(scores);
    a["std"] = sample_std(scores);
    a["count"] = scores.size();
    a["by_outcome"] = by_outcome;
    a["runs"] = run_list;
    algs[list[e].name()] = a;
  }
  res["algorithms"] = algs;
  j["result"] = res;
  dir.write("evaluate_runs.csv", runs_csv(list, runs, false));
  dir.write_json("evaluate.json", j);
  return dir.written();
}

std::vector<std::string> cmd_estimate_r2(const ExperimentConfig& cfg) {
  if (cfg.inductive) throw ConfigError("estimate-r2 supports transductive splits only");
  if (cfg.cv.metric != Metric::kR2) throw ConfigError("estimate-r2 needs cv.metric = r2");
  std::vector<Entry> list;
  for (Algorithm a : cfg.algorithms) {
    if (a == Algorithm::kLP || a == Algorithm::kLGC || a == Algorithm::kLGCRP) list.push_back({a});
  }
  if (list.empty()) throw ConfigError("estimate-r2: algorithms must include LP, LGC or LGC/RP");
  const Dataset d = load_dataset(cfg, cfg.input, 0, true);
  std::optional<FitResult> fitted;
  if (cfg.r2_from_fitted) {
    fitted = fit_dataset(cfg, d);
  } else if (!d.params) {
    throw ConfigError("estimate-r2 with given parameters needs params or a synthetic input");
  }
  const GmrfParams& model = fitted ? fitted->params : *d.params;

  std::vector<OutcomeData> outcomes;
  for (const auto& name : outcome_names(cfg, *d.attrs)) outcomes.push_back(outcome_data(cfg, *d.attrs, name));
  std::vector<std::optional<R2Estimator>> estimators(outcomes.size());
  parallel_for(outcomes.size(), [&](std::size_t o) {
    estimators[o].emplace(params_with_outcome(model, column_index(*d.attrs, outcomes[o].name)),
                          d.graph);
  });

  const std::size_t per_entry = outcomes.size() * static_cast<std::size_t>(cfg.repeats);
  std::vector<std::vector<RunRecord>> runs(list.size(), std::vector<RunRecord>(per_entry));
  parallel_for(list.size() * per_entry, [&](std::size_t task) {
    const std::size_t e = task / per_entry;
    const std::size_t slot = task % per_entry;
    const std::size_t o = slot / static_cast<std::size_t>(cfg.repeats);
    const int r = static_cast<int>(slot % static_cast<std::size_t>(cfg.repeats));
    const OutcomeData& od = outcomes[o];
    const Algorithm alg = *list[e].alg;
    RunRecord& rec = runs[e][slot];
    rec.outcome = od.name;
    rec.repeat = r;
    const SplitSpec split = SplitSpec::from_outcome(repeat_split(cfg, d.graph.num_nodes(), r), od.y);
    rec.estimate = estimators[o]->estimate(alg, split);
    rec.sel = select_hyperparameters(alg, cfg, d.graph, od.X, split, cv_seed(cfg, r));
    const VectorXd pred = predict(alg, d.graph, od.X, split, rec.sel.hp, cfg.cv.budget, &rec.diag);
    rec.score = r_squared(pred, split.unlabeled.gather(od.y));
  });

  OutputDir dir(cfg.output_dir);
  ojson j = summary_header(Command::kEstimateR2, cfg);
  ojson algs = ojson::object();
  for (std::size_t e = 0; e < list.size(); ++e) {
    std::vector<double> est;
    std::vector<double> emp;
    std::vector<double> gap;
    ojson run_list = ojson::array();
    for (const RunRecord& rec : runs[e]) {
      est.push_back(rec.estimate);
      emp.push_back(rec.score);
      gap.push_back(std::abs(rec.estimate - rec.score));
      run_list.push_back(run_json(list[e], rec, true));
    }
    // Per outcome: means over the repeats, and the gap between them.
    ojson by_outcome = ojson::object();
    std::vector<double> outcome_gaps;
    for (std::size_t o = 0; o < outcomes.size(); ++o) {
      std::vector<double> e_o;
      std::vector<double> m_o;
      for (int r = 0; r < cfg.repeats; ++r) {
        const RunRecord& rec = runs[e][o * static_cast<std::size_t>(cfg.repeats) + static_cast<std::size_t>(r)];
        e_o.push_back(rec.estimate);
        m_o.push_back(rec.score);
      }
      const double g = std::abs(mean_of(e_o) - mean_of(m_o));
      outcome_gaps.push_back(g);
      by_outcome[outcomes[o].name] = {{"estimated_mean", mean_of(e_o)},
                                      {"empirical_mean", mean_of(m_o)},
                                      {"abs_difference", g}};
    }
    ojson a;
    a["estimated_mean"] = mean_of(est);
    a["empirical_mean"] = mean_of(emp);
    a["abs_difference_of_means"] = std::abs(mean_of(est) - mean_of(emp));
    a["mean_abs_difference"] = mean_of(gap);
    a["mean_outcome_abs_difference"] = mean_of(outcome_gaps);
    a["max_outcome_abs_difference"] = *std::max_element(outcome_gaps.begin(), outcome_gaps.end());
    a["by_outcome"] = by_outcome;
    a["runs"] = run_list;
    algs[list[e].name()] = a;
  }
  ojson res;
  res["parameters"] = ojson::parse(params_to_json(model));
  if (fitted) res["fit_nll"] = fitted->nll;
  res["algorithms"] = algs;
  j["result"] = res;
  dir.write("estimate_r2_runs.csv", runs_csv(list, runs, true));
  dir.write_json("estimate_r2.json", j);
  return dir.written();
}

std::vector<std::string> cmd_spectra(const ExperimentConfig& cfg) {
  std::vector<double> lambdas(static_cast<std::size_t>(cfg.spectra.lambda_count));
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    lambdas[i] = 2.0 * static_cast<double>(i) / static_cast<double>(lambdas.size() - 1);
  }
  lambdas.back() = 2.0;

  OutputDir dir(cfg.output_dir);
  ojson j = summary_header(Command::kSpectra, cfg);
  ojson filters = ojson::array();
  for (std::size_t i = 0; i < cfg.spectra.filters.size(); ++i) {
    const FilterSpec& f = cfg.spectra.filters[i];
    const std::string file = "filter_" + std::to_string(i) + ".csv";
    dir.write(file, filter_response_csv(f, lambdas));
    ojson fj;
    fj["file"] = file;
    fj["kind"] = filter_kind_name(f.kind);
    if (f.kind == FilterSpec::Kind::kLGC) {
      fj["omega"] = f.omega;
    } else {
      fj["K"] = f.K;
      fj["degree"] = f.degree;
    }
    fj["response_at_2"] = filter_response(f, 2.0);
    filters.push_back(fj);
  }
  ojson res;
  res["filters"] = filters;
  if (cfg.spectra.graph_spectrum) {
    const Graph g = build_graph(cfg, cfg.input, 0);
    const LaplacianSpectrum spec = LaplacianSpectrum::compute(g);
    std::ostringstream out;
    out << "index,lambda\n";
    for (Index i = 0; i < spec.lambda.size(); ++i) out << i << ',' << fmt(spec.lambda(i)) << '\n';
    dir.write("laplacian_eigenvalues.csv", out.str());
    ojson gs;
    gs["file"] = "laplacian_eigenvalues.csv";
    gs["count"] = spec.lambda.size();
    gs["min"] = spec.lambda.minCoeff();
    gs["max"] = spec.lambda.maxCoeff();
    res["graph_spectrum"] = gs;
  }
  j["result"] = res;
  dir.write_json("spectra.json", j);
  return dir.written();
}

}  // namespace

Command parse_command(const std::string& name) {
  for (const auto& [c, n] : command_table()) {
    if (n == name) return c;
  }
  throw ConfigError("unknown command '" + name + "'");
}

std::string command_name(Command c) {
  for (const auto& [cmd, n] : command_table()) {
    if (cmd == c) return n;
  }
  return "unknown";
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.fit.trace_every = 10;
  Section s(root, "");
  cfg.seed = s.seed("seed", cfg.seed);
  cfg.output_dir = resolve_path(s.string("output_dir", cfg.output_dir), base_dir);
  if (s.has("input")) cfg.input = parse_input(s.section("input"), base_dir);
  cfg.params_path = resolve_path(s.string("params", ""), base_dir);
  cfg.outcome = s.string("outcome", "");

  if (s.has("split")) {
    Section t = s.section("split");
    cfg.train_fraction = t.number("fraction", cfg.train_fraction);
    cfg.repeats = static_cast<int>(t.integer("repeats", cfg.repeats));
    cfg.labeled_nodes = resolve_path(t.string("labeled_nodes", ""), base_dir);
    t.require(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0, "fraction", "must lie in (0, 1)");
    t.require(cfg.repeats >= 1, "repeats", "must be at least 1");
    if (t.has("inductive")) {
      const json& v = t.at("inductive");
      if (v.is_boolean()) {
        cfg.inductive = v.get<bool>();
        if (cfg.inductive && !cfg.input.synthetic) {
          t.fail("inductive", "file inputs need an {edges, attributes} object for the second graph");
        }
        if (cfg.inductive) cfg.inductive_input = cfg.input;
      } else {
        cfg.inductive = true;
        cfg.inductive_input = parse_input(t.section("inductive"), base_dir);
        if (cfg.inductive_input.synthetic) t.fail("inductive", "must name an edge list and attributes");
        if (cfg.inductive_input.attributes.empty()) t.fail("inductive", "attributes are required");
      }
    }
    t.finish();
  }

  if (s.has("algorithms")) {
    const json& v = s.at("algorithms");
    if (!v.is_array() || v.empty()) s.fail("algorithms", "expected a non-empty array of names");
    cfg.algorithms.clear();
    for (const auto& e : v) {
      if (!e.is_string()) s.fail("algorithms", "expected names");
      const Algorithm a = parse_algorithm(e.get<std::string>());
      for (Algorithm seen : cfg.algorithms) s.require(seen != a, "algorithms", "duplicate entry");
      cfg.algorithms.push_back(a);
    }
  }

  if (s.has("hyperparameters")) {
    Section t = s.section("hyperparameters");
    Hyperparameters hp;
    hp.omega = t.number("omega", hp.omega);
    hp.K = static_cast<int>(t.integer("K", hp.K));
    hp.rp_omega = t.number("rp_omega", hp.rp_omega);
    t.require(hp.omega >= 0.0 && std::isfinite(hp.omega), "omega", "must be >= 0");
    t.require(hp.K >= 0, "K", "must be >= 0");
    t.require(std::isnan(hp.rp_omega) || (hp.rp_omega >= 0.0 && std::isfinite(hp.rp_omega)),
              "rp_omega", "must be >= 0");
    t.finish();
    cfg.fixed = hp;
  }

  if (s.has("cv")) {
    Section t = s.section("cv");
    cfg.cv.folds = static_cast<int>(t.integer("folds", cfg.cv.folds));
    t.require(cfg.cv.folds >= 2, "folds", "must be at least 2");
    if (t.has("omega_grid")) cfg.cv.omega_grid = parse_omega_grid(t, "omega_grid");
    if (t.has("rp_omega_grid")) cfg.cv.rp_omega_grid = parse_omega_grid(t, "rp_omega_grid");
    if (t.has("k_grid")) {
      const json& v = t.at("k_grid");
      if (!v.is_array()) t.fail("k_grid", "expected an array of integers");
      cfg.cv.k_grid.clear();
      for (const auto& e : v) {
        if (!e.is_number_integer() || e.get<long long>() < 0) t.fail("k_grid", "expected integers >= 0");
        cfg.cv.k_grid.push_back(e.get<int>());
      }
    }
    t.require(!cfg.cv.omega_grid.empty(), "omega_grid", "must not be empty");
    t.require(!cfg.cv.k_grid.empty(), "k_grid", "must not be empty");
    const std::string metric = t.string("metric", "r2");
    if (metric == "r2") {
      cfg.cv.metric = Metric::kR2;
    } else if (metric == "f1") {
      cfg.cv.metric = Metric::kF1;
    } else {
      t.fail("metric", "expected r2 or f1");
    }
    t.finish();
  }

  if (s.has("propagation")) {
    Section t = s.section("propagation");
    PropagationBudget& b = cfg.cv.budget;
    const std::string ex = t.string("executor", executor_name(b.executor));
    if (ex == "fixed_point") {
      b.executor = Executor::kFixedPoint;
    } else if (ex == "cg") {
      b.executor = Executor::kConjugateGradient;
    } else {
      t.fail("executor", "expected fixed_point or cg");
    }
    b.max_iterations = static_cast<int>(t.integer("max_iterations", b.max_iterations));
    b.rel_change_tolerance = t.number("tolerance", b.rel_change_tolerance);
    t.require(b.max_iterations >= 1, "max_iterations", "must be at least 1");
    t.require(b.rel_change_tolerance > 0.0, "tolerance", "must be positive");
    t.finish();
  }

  if (s.has("model")) {
    Section t = s.section("model");
    ModelOptions& m = cfg.model;
    const std::string method = t.string("method", method_name(m.method));
    if (method == "auto") {
      m.method = SolveMethod::kAuto;
    } else if (method == "dense") {
      m.method = SolveMethod::kDense;
    } else if (method == "spectral") {
      m.method = SolveMethod::kSpectral;
    } else if (method == "stochastic") {
      m.method = SolveMethod::kStochastic;
    } else {
      t.fail("method", "expected auto, dense, spectral or stochastic");
    }
    m.dense_threshold = t.integer("dense_threshold", m.dense_threshold);
    m.spectral_threshold = t.integer("spectral_threshold", m.spectral_threshold);
    m.slq.num_probes = static_cast<int>(t.integer("probes", m.slq.num_probes));
    m.slq.lanczos_steps = static_cast<int>(t.integer("lanczos_steps", m.slq.lanczos_steps));
    m.cg.rel_tolerance = t.number("cg_tolerance", m.cg.rel_tolerance);
    m.cg.max_iterations = static_cast<int>(t.integer("cg_max_iterations", m.cg.max_iterations));
    t.require(m.dense_threshold >= 0 && m.spectral_threshold >= 0, "dense_threshold",
              "thresholds must be >= 0");
    t.require(m.slq.num_probes >= 1, "probes", "must be at least 1");
    t.require(m.slq.lanczos_steps >= 1, "lanczos_steps", "must be at least 1");
    t.require(m.cg.rel_tolerance > 0.0, "cg_tolerance", "must be positive");
    t.require(m.cg.max_iterations >= 0, "cg_max_iterations", "must be >= 0");
    t.finish();
  }

  if (s.has("fit")) {
    Section t = s.section("fit");
    FitConfig& f = cfg.fit;
    f.restarts = static_cast<int>(t.integer("restarts", f.restarts));
    f.steps = static_cast<int>(t.integer("steps", f.steps));
    f.learning_rate = t.number("learning_rate", f.learning_rate);
    f.weight_decay = t.number("weight_decay", f.weight_decay);
    const std::string opt = t.string("optimizer", "adamw");
    if (opt == "adamw") {
      f.plain_gradient_descent = false;
    } else if (opt == "gd") {
      f.plain_gradient_descent = true;
    } else {
      t.fail("optimizer", "expected adamw or gd");
    }
    f.stop_tolerance = t.number("stop_tolerance", f.stop_tolerance);
    f.trace_every = static_cast<int>(t.integer("trace_every", f.trace_every));
    t.require(f.restarts >= 1, "restarts", "must be at least 1");
    t.require(f.steps >= 1, "steps", "must be at least 1");
    t.require(f.learning_rate > 0.0, "learning_rate", "must be positive");
    t.require(f.weight_decay >= 0.0, "weight_decay", "must be >= 0");
    t.require(f.stop_tolerance >= 0.0, "stop_tolerance", "must be >= 0");
    t.require(f.trace_every >= 0, "trace_every", "must be >= 0");
    t.finish();
  }

  if (s.has("sample")) {
    Section t = s.section("sample");
    if (t.has("conditional_on")) {
      const json& v = t.at("conditional_on");
      if (!v.is_array()) t.fail("conditional_on", "expected an array of column names");
      for (const auto& e : v) {
        if (!e.is_string()) t.fail("conditional_on", "expected column names");
        cfg.conditional_on.push_back(e.get<std::string>());
      }
    }
    t.finish();
  }

  if (s.has("estimate_r2")) {
    Section t = s.section("estimate_r2");
    const std::string mode = t.string("parameters", "fitted");
    if (mode == "fitted") {
      cfg.r2_from_fitted = true;
    } else if (mode == "given") {
      cfg.r2_from_fitted = false;
    } else {
      t.fail("parameters", "expected fitted or given");
    }
    t.finish();
  }

  if (s.has("linbp")) {
    Section t = s.section("linbp");
    const double frac = t.number("epsilon_fraction", 0.5);
    t.require(frac > 0.0 && frac < 1.0, "epsilon_fraction", "must lie in (0, 1)");
    t.finish();
    cfg.linbp_eps_fraction = frac;
  }

  cfg.spectra.filters = default_filters();
  if (s.has("spectra")) {
    Section t = s.section("spectra");
    cfg.spectra.lambda_count = static_cast<int>(t.integer("lambda_count", cfg.spectra.lambda_count));
    t.require(cfg.spectra.lambda_count >= 2, "lambda_count", "must be at least 2");
    cfg.spectra.graph_spectrum = t.boolean("graph_spectrum", false);
    if (t.has("filters")) {
      const json& v = t.at("filters");
      if (!v.is_array() || v.empty()) t.fail("filters", "expected a non-empty array");
      cfg.spectra.filters.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        Section fs_(v[i], "spectra.filters[" + std::to_string(i) + "]");
        FilterSpec f;
        const std::string kind = fs_.string("kind", "");
        if (kind == "LGC") {
          f.kind = FilterSpec::Kind::kLGC;
          f.omega = fs_.number("omega", f.omega);
          fs_.require(f.omega >= 0.0 && std::isfinite(f.omega), "omega", "must be >= 0");
        } else if (kind == "SGC") {
          f.kind = FilterSpec::Kind::kSGC;
          f.K = static_cast<int>(fs_.integer("K", f.K));
          f.degree = fs_.number("degree", 6.0);
          fs_.require(f.K >= 0, "K", "must be >= 0");
          fs_.require(f.degree > 0.0 && std::isfinite(f.degree), "degree", "must be positive");
        } else {
          fs_.fail("kind", "expected LGC or SGC");
        }
        fs_.finish();
        cfg.spectra.filters.push_back(f);
      }
    }
    t.finish();
  }
  s.finish();

  if (cfg.linbp_eps_fraction && cfg.cv.metric != Metric::kF1) {
    throw ConfigError("linbp: needs cv.metric = f1 (LinBP predicts classes)");
  }
  if (cfg.inductive) {
    if (cfg.linbp_eps_fraction) throw ConfigError("linbp: not available for inductive splits");
    for (Algorithm a : cfg.algorithms) {
      if (!algorithm_is_inductive(a)) {
        throw ConfigError("algorithms: " + algorithm_name(a) +
                          " needs labels on the test graph; inductive runs support LR, LGC and SGC");
      }
    }
  }
  refresh_resolved(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string base = fs::path(path).parent_path().string();
  if (base.empty()) base = ".";
  return parse_config(ss.str(), base);
}

void refresh_resolved(ExperimentConfig& cfg) {
  ojson j;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  if (!input_empty(cfg.input)) j["input"] = input_json(cfg.input);
  if (!cfg.params_path.empty()) j["params"] = cfg.params_path;
  j["outcome"] = cfg.outcome;

  ojson split;
  split["fraction"] = cfg.train_fraction;
  split["repeats"] = cfg.repeats;
  if (!cfg.labeled_nodes.empty()) split["labeled_nodes"] = cfg.labeled_nodes;
  if (cfg.inductive && cfg.input.synthetic) {
    split["inductive"] = true;
  } else if (cfg.inductive) {
    split["inductive"] = input_json(cfg.inductive_input);
  } else {
    split["inductive"] = false;
  }
  j["split"] = split;

  ojson algs = ojson::array();
  for (Algorithm a : cfg.algorithms) algs.push_back(algorithm_name(a));
  j["algorithms"] = algs;

  if (cfg.fixed) {
    ojson hp;
    hp["omega"] = cfg.fixed->omega;
    hp["K"] = cfg.fixed->K;
    if (!std::isnan(cfg.fixed->rp_omega)) hp["rp_omega"] = cfg.fixed->rp_omega;
    j["hyperparameters"] = hp;
  }

  ojson cv;
  cv["folds"] = cfg.cv.folds;
  cv["omega_grid"] = cfg.cv.omega_grid;
  cv["k_grid"] = cfg.cv.k_grid;
  cv["rp_omega_grid"] = cfg.cv.rp_omega_grid;
  cv["metric"] = cfg.cv.metric == Metric::kR2 ? "r2" : "f1";
  j["cv"] = cv;

  const PropagationBudget& b = cfg.cv.budget;
  j["propagation"] = {{"executor", executor_name(b.executor)},
                      {"max_iterations", b.max_iterations},
                      {"tolerance", b.rel_change_tolerance}};

  const ModelOptions& m = cfg.model;
  j["model"] = {{"method", method_name(m.method)},
                {"dense_threshold", m.dense_threshold},
                {"spectral_threshold", m.spectral_threshold},
                {"probes", m.slq.num_probes},
                {"lanczos_steps", m.slq.lanczos_steps},
                {"cg_tolerance", m.cg.rel_tolerance},
                {"cg_max_iterations", m.cg.max_iterations}};

  const FitConfig& f = cfg.fit;
  j["fit"] = {{"restarts", f.restarts},
              {"steps", f.steps},
              {"learning_rate", f.learning_rate},
              {"weight_decay", f.weight_decay},
              {"optimizer", f.plain_gradient_descent ? "gd" : "adamw"},
              {"stop_tolerance", f.stop_tolerance},
              {"trace_every", f.trace_every}};

  j["sample"] = {{"conditional_on", cfg.conditional_on}};
  j["estimate_r2"] = {{"parameters", cfg.r2_from_fitted ? "fitted" : "given"}};
  if (cfg.linbp_eps_fraction) j["linbp"] = {{"epsilon_fraction", *cfg.linbp_eps_fraction}};

  ojson filters = ojson::array();
  for (const FilterSpec& fs_ : cfg.spectra.filters) {
    ojson fj;
    fj["kind"] = filter_kind_name(fs_.kind);
    if (fs_.kind == FilterSpec::Kind::kLGC) {
      fj["omega"] = fs_.omega;
    } else {
      fj["K"] = fs_.K;
      fj["degree"] = fs_.degree;
    }
    filters.push_back(fj);
  }
  j["spectra"] = {{"lambda_count", cfg.spectra.lambda_count},
                  {"graph_spectrum", cfg.spectra.graph_spectrum},
                  {"filters", filters}};
  cfg.resolved = j;
}

std::vector<std::string> run_command(Command c, const ExperimentConfig& cfg) {
  switch (c) {
    case Command::kSample: return cmd_sample(cfg);
    case Command::kFit: return cmd_fit(cfg);
    case Command::kPredict: return cmd_predict(cfg);
    case Command::kEvaluate: return cmd_evaluate(cfg);
    case Command::kEstimateR2: return cmd_estimate_r2(cfg);
    case Command::kSpectra: return cmd_spectra(cfg);
  }
  throw ConfigError("unknown command");
}

}  // namespace gmrf
