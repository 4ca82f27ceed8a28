#include "mdd/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdd/discovery.hpp"
#include "mdd/error.hpp"
#include "mdd/oracle.hpp"
#include "mdd/simkit.hpp"

namespace mdd::cli {

using Json = nlohmann::ordered_json;

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::io:
    case ErrorKind::format:
      return kIo;
    case ErrorKind::capacity:
      return kBudget;
    case ErrorKind::insufficient_data:
      return kInsufficientData;
    case ErrorKind::validation:
    case ErrorKind::schema_mismatch:
    case ErrorKind::domain:
    case ErrorKind::contract:
      return kValidation;
  }
  return kValidation;
}

MetricMap parse_metric_spec(std::string_view spec,
                            std::span<const std::string> attributes) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = spec.find('|', start);
    parts.emplace_back(spec.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (parts.size() != 1 && parts.size() != attributes.size()) {
    fail(ErrorKind::validation, "metric spec '" + std::string(spec) +
                                    "' does not match " +
                                    std::to_string(attributes.size()) +
                                    " attributes");
  }
  MetricMap out;
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    out.emplace(attributes[i],
                simkit::parse_metric(parts.size() == 1 ? parts[0] : parts[i]));
  }
  return out;
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (item.empty()) {
      fail(ErrorKind::validation, "empty entry in list '" + text + "'");
    }
    out.push_back(item);
  }
  if (out.empty()) fail(ErrorKind::validation, "empty attribute list");
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct MetricOptions {
  std::string metric = "cosine-word";
  int qgram = 3;
  std::vector<std::string> overrides;  // NAME=SPEC

  MetricMap resolve(std::span<const std::string> attributes) const {
    auto out = uniform_metrics(attributes, simkit::parse_metric(metric, qgram));
    for (const auto& o : overrides) {
      const auto eq = o.rfind('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == o.size()) {
        fail(ErrorKind::validation,
             "--attr-metric expects NAME=METRIC, got '" + o + "'");
      }
      const auto name = o.substr(0, eq);
      auto it = out.find(name);
      if (it == out.end()) {
        fail(ErrorKind::validation, "--attr-metric names '" + name +
                                        "', which is not in X or Y");
      }
      it->second = simkit::parse_metric(o.substr(eq + 1), qgram);
    }
    return out;
  }
};

void add_metric_flags(CLI::App& cmd, MetricOptions& m) {
  cmd.add_option("--metric", m.metric,
                 "cosine-word | cosine-qgram[:<q>] | edit")
      ->capture_default_str();
  cmd.add_option("--qgram", m.qgram, "q for cosine-qgram without explicit q")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--attr-metric", m.overrides,
                 "Per-attribute metric override NAME=METRIC (repeatable)");
}

struct RequestOptions {
  std::string lhs;
  std::string rhs;
  std::string rhs_thresholds;
  std::string rhs_levels;
  double min_support = 0.0;
  double min_confidence = 0.0;
  std::optional<double> epsilon;
  std::string algorithm = "epsc";
  int levels = 10;
  CLI::Option* levels_opt = nullptr;
};

void add_request_flags(CLI::App& cmd, RequestOptions& r) {
  cmd.add_option("--lhs", r.lhs, "LHS attributes X, comma separated")->required();
  cmd.add_option("--rhs", r.rhs, "RHS attributes Y, comma separated")->required();
  auto* sims = cmd.add_option("--rhs-thresholds", r.rhs_thresholds,
                              "RHS similarity thresholds in [0,1], one per Y");
  auto* lv = cmd.add_option("--rhs-levels", r.rhs_levels,
                            "RHS thresholds as integer levels, one per Y");
  sims->excludes(lv);
  cmd.add_option("--min-support", r.min_support, "Minimum support in (0,1]")
      ->required();
  cmd.add_option("--min-confidence", r.min_confidence,
                 "Minimum confidence in (0,1]")
      ->required();
  cmd.add_option("--epsilon", r.epsilon,
                 "Relative error bound for ap/api/aps/apsi");
  cmd.add_option("--algorithm", r.algorithm, "ea|eps|epsc|ap|api|aps|apsi")
      ->capture_default_str();
  r.levels_opt = cmd.add_option("--levels", r.levels,
                                "Number of similarity levels d")
                     ->capture_default_str();
}

DiscoveryRequest make_request(const RequestOptions& r, const LevelDomain& domain) {
  DiscoveryRequest req;
  req.lhs = split_list(r.lhs);
  req.rhs = split_list(r.rhs);
  req.min_support = r.min_support;
  req.min_confidence = r.min_confidence;
  req.epsilon = r.epsilon;
  req.algorithm = parse_algorithm(r.algorithm);

  std::vector<ThresholdPattern::Entry> entries;
  if (!r.rhs_levels.empty()) {
    const auto values = split_list(r.rhs_levels);
    if (values.size() != req.rhs.size()) {
      fail(ErrorKind::validation, "--rhs-levels needs one level per Y attribute");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      int level = 0;
      try {
        std::size_t used = 0;
        level = std::stoi(values[i], &used);
        if (used != values[i].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        fail(ErrorKind::validation, "bad rhs level '" + values[i] + "'");
      }
      entries.push_back({req.rhs[i], level});
    }
  } else if (!r.rhs_thresholds.empty()) {
    const auto values = split_list(r.rhs_thresholds);
    if (values.size() != req.rhs.size()) {
      fail(ErrorKind::validation,
           "--rhs-thresholds needs one similarity per Y attribute");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      double sim = 0.0;
      try {
        std::size_t used = 0;
        sim = std::stod(values[i], &used);
        if (used != values[i].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        fail(ErrorKind::validation, "bad rhs similarity '" + values[i] + "'");
      }
      if (!(sim >= 0.0 && sim <= 1.0)) {
        fail(ErrorKind::validation, "rhs similarity must be within [0,1]");
      }
      entries.push_back({req.rhs[i], simkit::discretize(sim, domain)});
    }
  } else {
    fail(ErrorKind::validation, "one of --rhs-thresholds or --rhs-levels is required");
  }
  req.rhs_pattern = ThresholdPattern(std::move(entries));
  req.validate();
  try {
    req.rhs_pattern.check_domain(domain);
  } catch (const Error& e) {
    fail(ErrorKind::validation, e.what());
  }
  return req;
}

std::vector<std::string> joined(const DiscoveryRequest& req) {
  std::vector<std::string> attrs = req.lhs;
  attrs.insert(attrs.end(), req.rhs.begin(), req.rhs.end());
  return attrs;
}

Json pattern_json(const ThresholdPattern& p, const LevelDomain& domain) {
  Json out = Json::array();
  for (const auto& e : p.entries()) {
    out.push_back({{"attribute", e.attribute},
                   {"level", e.level},
                   {"similarity", domain.similarity_of(e.level)}});
  }
  return out;
}

Json result_json(const DiscoveryRequest& req, const StatDistribution& dist,
                 const DiscoveryResult& result) {
  const auto& domain = dist.domain();
  Json doc;
  doc["schema"] = "mdd-result-v1";
  doc["status"] = result.infeasible() ? "infeasible" : "ok";

  Json request;
  request["lhs"] = req.lhs;
  request["rhs"] = req.rhs;
  request["rhs_pattern"] = pattern_json(req.rhs_pattern, domain);
  request["min_support"] = req.min_support;
  request["min_confidence"] = req.min_confidence;
  request["epsilon"] = req.epsilon ? Json(*req.epsilon) : Json(nullptr);
  request["algorithm"] = to_string(req.algorithm);
  request["levels"] = domain.d();
  request["metric"] = dist.metric_spec();
  doc["request"] = request;

  doc["distribution"] = {{"records", dist.size()},
                         {"pair_total", dist.pair_total()},
                         {"fingerprint", hex64(dist.fingerprint())}};

  if (result.mode.approximate) {
    doc["mode"] = {{"kind", "approximate"},
                   {"prefix_k", result.mode.prefix_k},
                   {"epsilon", result.mode.epsilon}};
  } else {
    doc["mode"] = {{"kind", "exact"}};
  }
  const auto& c = result.counters;
  doc["counters"] = {{"candidates_total", c.candidates_total},
                     {"candidates_evaluated", c.candidates_evaluated},
                     {"record_evaluations", c.record_evaluations},
                     {"pruned_by_support", c.pruned_by_support},
                     {"pruned_by_confidence", c.pruned_by_confidence}};

  Json mds = Json::array();
  for (const auto& md : result.mds) {
    mds.push_back({{"lhs", pattern_json(md.lhs_pattern, domain)},
                   {"lhs_levels", md.lhs_levels},
                   {"rhs", pattern_json(md.rhs_pattern, domain)},
                   {"support", md.support},
                   {"confidence", md.confidence},
                   {"joint_pairs", md.joint_count},
                   {"lhs_pairs", md.lhs_count}});
  }
  doc["mds"] = std::move(mds);
  return doc;
}

void emit(const Json& doc, const std::string& out_path, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
  if (!file) fail(ErrorKind::io, "cannot write '" + out_path + "'");
  file << text;
  if (!file.flush()) fail(ErrorKind::io, "error writing '" + out_path + "'");
}

// ------------------------------------------------------------ subcommands

struct DistributionCmd {
  std::string input;
  std::string attrs;
  std::string out_path;
  int levels = 10;
  int threads = 0;
  MetricOptions metric;

  int run(std::ostream& out) const {
    const auto relation = read_csv(input);
    const auto names = split_list(attrs);
    const LevelDomain domain(levels);
    const auto dist = build_distribution(relation, names,
                                         metric.resolve(names), domain, threads);
    save_distribution(dist, out_path);
    out << "records n=" << dist.size() << " pair_total=" << dist.pair_total()
        << " d=" << domain.d() << "\n";
    return kSuccess;
  }
};

struct DiscoverCmd {
  std::string input;
  std::string dist_path;
  std::string out_path;
  int threads = 0;
  std::uint64_t budget = CandidateLattice::kDefaultBudget;
  RequestOptions request;
  MetricOptions metric;
  CLI::Option* metric_opt = nullptr;

  int run(std::ostream& out) const {
    StatDistribution dist;
    std::optional<DiscoveryRequest> req;
    if (!dist_path.empty()) {
      dist = load_distribution(dist_path);
      if (request.levels_opt->count() > 0 && request.levels != dist.domain().d()) {
        fail(ErrorKind::validation,
             "--levels " + std::to_string(request.levels) +
                 " conflicts with the cached distribution (d=" +
                 std::to_string(dist.domain().d()) + ")");
      }
      if (!metric.overrides.empty() || metric_opt->count() > 0) {
        fail(ErrorKind::validation,
             "metric flags do not apply to a cached distribution");
      }
      req = make_request(request, dist.domain());
    } else {
      const LevelDomain domain(request.levels);
      req = make_request(request, domain);
      const auto relation = read_csv(input);
      const auto attrs = joined(*req);
      dist = build_distribution(relation, attrs, metric.resolve(attrs), domain,
                                threads);
    }
    EngineOptions options;
    options.threads = threads;
    options.candidate_budget = budget;
    const auto result = discover(dist, *req, options);
    // Echo provenance of the projected distribution the engine ran on.
    const auto projected = dist.project(joined(*req));
    emit(result_json(*req, projected, result), out_path, out);
    return kSuccess;
  }
};

struct Mismatch {
  std::vector<Level> levels;
  std::optional<oracle::Measures> oracle_side;
  std::optional<std::pair<double, double>> engine_side;
  std::string reason;
};

Json mismatch_json(const DiscoveryRequest& req, const Mismatch& m) {
  Json j;
  j["lhs_levels"] = m.levels;
  j["lhs"] = req.lhs;
  j["reason"] = m.reason;
  j["engine"] = m.engine_side ? Json{{"support", m.engine_side->first},
                                     {"confidence", m.engine_side->second}}
                              : Json(nullptr);
  j["oracle"] = m.oracle_side ? Json{{"support", m.oracle_side->support},
                                     {"confidence", m.oracle_side->confidence}}
                              : Json(nullptr);
  return j;
}

// Relative error of an approximate value against the exact one.
bool within_relative_error(double exact_support, double exact_confidence,
                           double support, double confidence, double epsilon) {
  constexpr double kTol = 1e-12;
  if (exact_support <= 0.0 || exact_confidence <= 0.0) return false;
  const double dc = (exact_confidence - confidence) / exact_confidence;
  const double ds = (exact_support - support) / exact_support;
  return dc <= epsilon + kTol && dc >= -epsilon - kTol && ds <= epsilon + kTol;
}

std::optional<Mismatch> check_reported(
    const Relation& relation, const DiscoveryRequest& req,
    const MetricMap& metrics, const LevelDomain& domain,
    const std::vector<Level>& levels, double support, double confidence,
    bool approximate, double epsilon) {
  const auto m = oracle::measures(relation, ThresholdPattern(req.lhs, levels),
                                  req.rhs_pattern, metrics, domain);
  const bool ok =
      approximate
          ? within_relative_error(m.support, m.confidence, support, confidence,
                                  epsilon)
          : std::abs(m.support - support) <= 1e-12 &&
                std::abs(m.confidence - confidence) <= 1e-12 &&
                m.support >= req.min_support &&
                m.confidence >= req.min_confidence;
  if (ok) return std::nullopt;
  return Mismatch{levels, m, std::make_pair(support, confidence),
                  approximate ? "approximate values outside the epsilon bound"
                              : "reported values differ from the oracle"};
}

struct VerifyCmd {
  std::string input;
  std::string results_path;
  std::string out_path;
  int threads = 0;
  RequestOptions request;
  MetricOptions metric;

  int run(std::ostream& out) const {
    const auto relation = read_csv(input);
    if (relation.tuple_count() > oracle::kMaxTuples) {
      fail(ErrorKind::capacity, "verify is capped at " +
                                    std::to_string(oracle::kMaxTuples) +
                                    " tuples");
    }
    return results_path.empty() ? run_engine(relation, out)
                                : run_results(relation, out);
  }

  int run_engine(const Relation& relation, std::ostream& out) const {
    const LevelDomain domain(request.levels);
    const auto req = make_request(request, domain);
    const auto attrs = joined(req);
    const auto metrics = metric.resolve(attrs);

    const auto truth =
        oracle::discover(relation, req.lhs, req.rhs_pattern, req.min_support,
                         req.min_confidence, metrics, domain);
    EngineOptions options;
    options.threads = threads;
    const auto dist = build_distribution(relation, attrs, metrics, domain, threads);
    const auto result = discover(dist, req, options);

    std::optional<Mismatch> first;
    auto consider = [&](Mismatch m) {
      if (!first || m.levels < first->levels) first = std::move(m);
    };
    const bool approximate = is_approximate(req.algorithm);
    std::map<std::vector<Level>, const oracle::Found*> by_levels;
    for (const auto& f : truth) by_levels[f.lhs_levels] = &f;

    for (const auto& md : result.mds) {
      auto bad = check_reported(relation, req, metrics, domain, md.lhs_levels,
                                md.support, md.confidence, approximate,
                                req.epsilon.value_or(0.0));
      if (bad) {
        consider(std::move(*bad));
      } else if (!approximate && !by_levels.count(md.lhs_levels)) {
        consider(Mismatch{md.lhs_levels, std::nullopt,
                          std::make_pair(md.support, md.confidence),
                          "engine returned a pattern the oracle rejects"});
      }
    }
    if (!approximate) {
      std::map<std::vector<Level>, bool> engine_set;
      for (const auto& md : result.mds) engine_set[md.lhs_levels] = true;
      for (const auto& f : truth) {
        if (!engine_set.count(f.lhs_levels)) {
          consider(Mismatch{f.lhs_levels, f.measures, std::nullopt,
                            "oracle pattern missing from engine output"});
        }
      }
    }

    Json report;
    report["schema"] = "mdd-verify-v1";
    report["status"] = first ? "disagree" : "agree";
    report["algorithm"] = to_string(req.algorithm);
    report["oracle_patterns"] = truth.size();
    report["engine_patterns"] = result.mds.size();
    report["counterexample"] = first ? mismatch_json(req, *first) : Json(nullptr);
    emit(report, out_path, out);
    return first ? kDisagreement : kSuccess;
  }

  // Re-checks every md of a results document against the oracle.
  int run_results(const Relation& relation, std::ostream& out) const {
    std::ifstream in(results_path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open '" + results_path + "'");
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::exception& e) {
      fail(ErrorKind::format, std::string("results document: ") + e.what());
    }
    std::optional<Mismatch> first;
    DiscoveryRequest req;
    std::size_t checked = 0;
    std::set<std::vector<Level>> reported;
    try {
      if (doc.at("schema") != "mdd-result-v1") {
        fail(ErrorKind::format, "unsupported results schema");
      }
      const auto& r = doc.at("request");
      req.lhs = r.at("lhs").get<std::vector<std::string>>();
      req.rhs = r.at("rhs").get<std::vector<std::string>>();
      std::vector<ThresholdPattern::Entry> rhs;
      for (const auto& e : r.at("rhs_pattern")) {
        rhs.push_back({e.at("attribute").get<std::string>(), e.at("level").get<int>()});
      }
      req.rhs_pattern = ThresholdPattern(std::move(rhs));
      req.min_support = r.at("min_support").get<double>();
      req.min_confidence = r.at("min_confidence").get<double>();
      if (!r.at("epsilon").is_null()) req.epsilon = r.at("epsilon").get<double>();
      req.algorithm = parse_algorithm(r.at("algorithm").get<std::string>());
      req.validate();
      const LevelDomain domain(r.at("levels").get<int>());
      const auto attrs = joined(req);
      const auto metrics =
          parse_metric_spec(r.at("metric").get<std::string>(), attrs);
      const bool approximate = doc.at("mode").at("kind") == "approximate";
      for (const auto& md : doc.at("mds")) {
        const auto levels = md.at("lhs_levels").get<std::vector<Level>>();
        auto bad = check_reported(relation, req, metrics, domain, levels,
                                  md.at("support").get<double>(),
                                  md.at("confidence").get<double>(),
                                  approximate, req.epsilon.value_or(0.0));
        ++checked;
        if (bad && (!first || bad->levels < first->levels)) first = std::move(bad);
        reported.insert(levels);
      }
      // An exact result must also be complete.
      if (!approximate) {
        const auto truth =
            oracle::discover(relation, req.lhs, req.rhs_pattern, req.min_support,
                             req.min_confidence, metrics, domain);
        for (const auto& f : truth) {
          if (reported.count(f.lhs_levels)) continue;
          if (!first || f.lhs_levels < first->levels) {
            first = Mismatch{f.lhs_levels, f.measures, std::nullopt,
                             "oracle pattern missing from the results"};
          }
        }
      }
    } catch (const Json::exception& e) {
      fail(ErrorKind::format, std::string("results document: ") + e.what());
    }
    Json report;
    report["schema"] = "mdd-verify-v1";
    report["status"] = first ? "disagree" : "agree";
    report["algorithm"] = to_string(req.algorithm);
    report["checked"] = checked;
    report["counterexample"] = first ? mismatch_json(req, *first) : Json(nullptr);
    emit(report, out_path, out);
    return first ? kDisagreement : kSuccess;
  }
};

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Matching dependency discovery over pairwise similarity "
               "distributions",
               "mdd"};
  app.require_subcommand(1);

  DistributionCmd dist_cmd;
  auto* dist = app.add_subcommand(
      "distribution", "Build the statistical distribution and cache it");
  dist->add_option("--input", dist_cmd.input, "CSV file with a header row")
      ->required();
  dist->add_option("--attrs", dist_cmd.attrs,
                   "Attributes to keep (X and Y), comma separated")
      ->required();
  dist->add_option("--out", dist_cmd.out_path, "Distribution cache file")
      ->required();
  dist->add_option("--levels", dist_cmd.levels, "Number of similarity levels d")
      ->capture_default_str();
  dist->add_option("--threads", dist_cmd.threads, "Worker threads (0 = all)");
  add_metric_flags(*dist, dist_cmd.metric);

  DiscoverCmd disc_cmd;
  auto* disc = app.add_subcommand("discover", "Find lhs threshold patterns");
  auto* in_opt = disc->add_option("--input", disc_cmd.input, "CSV file");
  auto* dist_opt =
      disc->add_option("--dist", disc_cmd.dist_path, "Distribution cache file");
  in_opt->excludes(dist_opt);
  disc->add_option("--out", disc_cmd.out_path, "Write JSON here instead of stdout");
  disc->add_option("--threads", disc_cmd.threads, "Worker threads (0 = all)");
  disc->add_option("--candidate-budget", disc_cmd.budget,
                   "Maximum d^|X| candidates")
      ->capture_default_str();
  add_request_flags(*disc, disc_cmd.request);
  add_metric_flags(*disc, disc_cmd.metric);
  disc_cmd.metric_opt = disc->get_option("--metric");

  VerifyCmd verify_cmd;
  auto* verify = app.add_subcommand(
      "verify", "Check engine output against the brute-force oracle");
  verify->add_option("--input", verify_cmd.input, "CSV file")->required();
  verify->add_option("--results", verify_cmd.results_path,
                     "Re-verify a results document instead of running the engine");
  verify->add_option("--out", verify_cmd.out_path, "Write report here");
  verify->add_option("--threads", verify_cmd.threads, "Worker threads (0 = all)");
  add_request_flags(*verify, verify_cmd.request);
  add_metric_flags(*verify, verify_cmd.metric);

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());

  const bool verify_with_results =
      std::find(args.begin(), args.end(), "verify") != args.end() &&
      std::find(args.begin(), args.end(), "--results") != args.end();
  // --results carries its own request.
  if (verify_with_results) {
    for (const char* name : {"--lhs", "--rhs", "--min-support", "--min-confidence"}) {
      verify->get_option(name)->required(false);
    }
  }

  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kValidation;
  }

  try {
    if (*dist) return dist_cmd.run(out);
    if (*disc) {
      if (disc_cmd.input.empty() && disc_cmd.dist_path.empty()) {
        fail(ErrorKind::validation, "discover needs --input or --dist");
      }
      return disc_cmd.run(out);
    }
    return verify_cmd.run(out);
  } catch (const Error& e) {
    err << "mdd: " << to_string(e.kind()) << " error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
}

}  // namespace mdd::cli
