#include "diamond/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "diamond/diagonal.hpp"
#include "diamond/error.hpp"
#include "diamond/filter_lab.hpp"
#include "diamond/fubini.hpp"
#include "diamond/io.hpp"
#include "diamond/probability.hpp"
#include "diamond/pseudo_tree.hpp"
#include "diamond/selector.hpp"

namespace diamond::cli {

namespace {

using io::Json;

/// Raised for option combinations CLI11 cannot express.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A check inside a command failed; the report has already been written.
struct CheckFailed {};

struct Options {
  std::string pi = "ruler";
  std::string f = "id";
  std::vector<std::string> g;
  std::optional<std::uint64_t> horizon;
  std::size_t stages = 0;
  std::uint64_t cap = std::uint64_t{1} << 32;
  std::uint64_t seed = 1;
  std::uint64_t structure_seed = 0;
  std::uint64_t trials = 0;
  std::size_t arity = 0;
  std::optional<std::uint64_t> frontier;
  std::optional<std::uint64_t> midpoint;
  std::size_t probe_arity = 2;
  std::string relation = "less";
  std::uint64_t begin = 0;
  std::optional<std::uint64_t> end;
  std::optional<std::uint64_t> n;
  std::uint64_t samples = 0;
  std::string codec = "cantor";
  std::string in;
  std::string out;
  std::string log;
  std::string partition;
  std::string source_hex;
  std::vector<std::string> trees;
  std::vector<std::string> indices;
  bool entries = false;
  bool terms = false;
};

Json opt(const std::optional<std::uint64_t>& v) { return v ? Json(*v) : Json(nullptr); }
Json opt(const std::string& v) { return v.empty() ? Json(nullptr) : Json(v); }

Json window_summary(const SetWindow& w) {
  Json j;
  j["count"] = w.count();
  j["first"] = opt(w.first());
  j["last"] = opt(w.last());
  return j;
}

std::uint64_t default_frontier(const PseudoTree& tree) {
  const auto marks = tree.stage_marks();
  if (marks.size() < 2) return 0;
  const std::size_t stages = marks.size() - 1;
  return marks[(stages - 1) / 2 * 2];
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  void emit(const std::string& command, const Json& config, Json result) {
    Json record;
    record["command"] = command;
    record["config"] = config;
    record["result"] = std::move(result);
    out_ << record.dump() << '\n';
  }

  void emit_error(const std::string& command, const Json& config, const std::string& type, const std::string& message,
                  Json extra = Json::object()) {
    Json record;
    record["command"] = command;
    record["config"] = config;
    Json e;
    e["type"] = type;
    e["message"] = message;
    for (auto& [k, v] : extra.items()) e[k] = v;
    record["error"] = std::move(e);
    out_ << record.dump() << '\n';
  }

  std::ostream& summary() { return err_; }

 private:
  std::ostream& out_;
  std::ostream& err_;
};

FuncSpec spec(const std::string& text, const char* flag) {
  try {
    return FuncSpec::parse(text);
  } catch (const ParseError& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

GuessingStructure structure_source(const Options& o, Json& config) {
  if (!o.in.empty()) {
    config["in"] = o.in;
    return io::structure_from_json(io::read_json(o.in));
  }
  if (!o.horizon) throw UsageError("need --in or --horizon");
  config["pi"] = o.pi;
  config["f"] = o.f;
  config["horizon"] = *o.horizon;
  config["structure_seed"] = o.structure_seed;
  return random_structure(spec(o.pi, "--pi"), spec(o.f, "--f"), *o.horizon, o.structure_seed);
}

LevelWindow level_window(const Options& o, const GuessingStructure& g, Json& config) {
  const LevelWindow w{o.begin, o.end.value_or(g.horizon())};
  config["begin"] = w.begin;
  config["end"] = w.end;
  return w;
}

// Tree or structure file, told apart by its format tag.
GuessingStructure component_from_file(const std::string& path) {
  const Json j = io::read_json(path);
  if (j.is_object() && j.value("format", "") == "diamond.tree") return to_guessing_structure(io::tree_from_json(j));
  return io::structure_from_json(j);
}

void build_tree(Runner& r, const Options& o) {
  Json config;
  config["pi"] = o.pi;
  config["stages"] = o.stages;
  config["cap"] = o.cap;
  config["out"] = opt(o.out);
  config["log"] = opt(o.log);
  const SplittingTree built = construct_splitting_tree(spec(o.pi, "--pi"), o.stages, o.cap);
  const PseudoTree& tree = built.tree;
  if (!o.out.empty()) io::write_json(o.out, io::tree_to_json(tree));
  if (!o.log.empty()) {
    std::ofstream log(o.log);
    if (!log) throw Error("cannot write " + o.log);
    for (const StageLog& s : built.log) log << io::stage_to_json(s).dump() << '\n';
  }
  const bool fallback =
      std::any_of(built.log.begin(), built.log.end(), [](const StageLog& s) { return s.fallback_used; });
  Json result;
  result["horizon"] = tree.horizon();
  result["stage_marks"] = std::vector<std::uint64_t>(tree.stage_marks().begin(), tree.stage_marks().end());
  result["levels"] = tree.levels().levels().size();
  result["nodes"] = tree.levels().node_count();
  result["maximal_nodes"] = built.log.empty() ? 0 : built.log.back().maximal_after.size();
  result["fallback_used"] = fallback;
  r.emit("build-tree", config, result);
  r.summary() << "built " << o.stages << " stages: horizon " << tree.horizon() << ", " << tree.levels().node_count()
              << " nodes" << (fallback ? " (fallback levels used)" : "") << '\n';
}

void verify(Runner& r, const Options& o) {
  Json config;
  config["in"] = o.in;
  const PseudoTree tree = io::tree_from_json(io::read_json(o.in));
  const std::uint64_t frontier = o.frontier.value_or(default_frontier(tree));
  const std::size_t arity = o.arity == 0 ? 2 : o.arity;
  config["frontier"] = frontier;
  config["arity"] = arity;

  const SplittingReport report = verify_splitting(tree, frontier);
  const std::vector<BranchSample> branches = frontier_branches(tree);
  std::size_t families = 0;
  std::size_t without = 0;
  std::optional<std::size_t> min_levels;
  std::vector<std::size_t> members;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    for (std::size_t i = start; i < branches.size(); ++i) {
      members.push_back(i);
      std::vector<BranchSample> family;
      for (std::size_t m : members) family.push_back(branches[m]);
      const std::size_t levels = verify_star(tree, family).size();
      ++families;
      if (levels == 0) ++without;
      min_levels = std::min(min_levels.value_or(levels), levels);
      if (members.size() < arity) rec(i + 1);
      members.pop_back();
    }
  };
  rec(0);

  Json result;
  result["passed"] = report.passed();
  result["cardinality_violations"] = report.cardinality_violations.size();
  result["non_branching"] = report.non_branching.size();
  result["indeterminate"] = report.indeterminate;
  result["equality_shortfall"] = report.equality_shortfall;
  Json star;
  star["branches"] = branches.size();
  star["families"] = families;
  star["min_exact_levels"] = min_levels ? Json(*min_levels) : Json(nullptr);
  star["families_without_levels"] = without;
  result["star"] = star;
  r.emit("verify", config, result);
  r.summary() << "splitting " << (report.passed() ? "passed" : "FAILED") << " below " << frontier << "; star over "
              << families << " families, min " << min_levels.value_or(0) << " exact levels\n";
  if (!report.passed()) throw CheckFailed{};
}

void base(Runner& r, const Options& o) {
  Json config;
  config["in"] = o.in;
  const PseudoTree tree = io::tree_from_json(io::read_json(o.in));
  const FilterBase b = base_from_tree(tree, frontier_branches(tree));
  const std::size_t arity = std::min(o.arity == 0 ? kDefaultFipArity : o.arity, b.size());
  config["arity"] = arity;
  config["out"] = opt(o.out);
  const FipReport fip = check_fip(b, arity);
  if (!o.out.empty()) io::write_json(o.out, io::base_to_json(b));
  Json result;
  result["generators"] = b.size();
  result["empty_generators"] = b.empty_generators();
  Json fj = io::fip_to_json(fip);
  if (!o.entries) fj.erase("entries");
  result["fip"] = fj;
  r.emit("base", config, result);
  r.summary() << b.size() << " generators; FIP at arity " << arity << ' ' << (fip.passed() ? "holds" : "FAILS")
              << " over " << fip.entries.size() << " subfamilies\n";
  if (!fip.passed()) throw CheckFailed{};
}

FilterBase base_or_empty(const Options& o, Json& config) {
  if (!o.in.empty()) {
    config["in"] = o.in;
    return io::base_from_json(io::read_json(o.in));
  }
  if (!o.horizon) throw UsageError("need --in or --horizon");
  config["horizon"] = *o.horizon;
  return FilterBase(*o.horizon);
}

void sky(Runner& r, const Options& o) {
  Json config;
  config["pi"] = o.pi;
  config["f"] = o.f;
  config["g"] = o.g;
  const FilterBase b = base_or_empty(o, config);
  SkyOptions so;
  if (o.relation == "less") {
    so.relation = SkyRelation::kLess;
  } else if (o.relation == "geq") {
    so.relation = SkyRelation::kGreaterEq;
  } else {
    throw UsageError("--relation must be less or geq");
  }
  so.midpoint = o.midpoint;
  so.probe_arity = o.probe_arity;
  config["relation"] = o.relation;
  config["midpoint"] = opt(o.midpoint);
  config["probe_arity"] = o.probe_arity;
  std::vector<FuncSpec> tests;
  for (const std::string& t : o.g) tests.push_back(spec(t, "--g"));
  const SkyVerdict v = sky_probe(spec(o.pi, "--pi"), spec(o.f, "--f"), b, tests, so);

  Json result;
  result["relation"] = to_string(v.relation);
  result["outcome"] = to_string(v.outcome);
  result["midpoint"] = v.midpoint;
  Json probes = Json::array();
  for (const SkyProbe& p : v.probes) {
    Json pj;
    pj["test"] = p.test;
    pj["members"] = p.members;
    pj["live"] = p.live;
    pj["below_past_midpoint"] = p.below_past_midpoint;
    pj["above_past_midpoint"] = p.above_past_midpoint;
    pj["window"] = window_summary(p.window);
    probes.push_back(std::move(pj));
  }
  result["probes"] = std::move(probes);
  result["counterexample"] = v.counterexample ? window_summary(*v.counterexample) : Json(nullptr);
  result["deciding_probe"] = v.deciding_probe ? Json(*v.deciding_probe) : Json(nullptr);
  result["witness_test"] = v.witness_test ? Json(*v.witness_test) : Json(nullptr);
  r.emit("sky", config, result);
  r.summary() << "sky " << to_string(v.relation) << ": " << to_string(v.outcome) << " (midpoint " << v.midpoint << ", "
              << v.probes.size() << " probes)\n";
}

void extend(Runner& r, const Options& o) {
  Json config;
  config["in"] = o.in;
  config["pi"] = o.pi;
  config["f"] = o.f;
  if (o.g.size() != 1) throw UsageError("extend takes exactly one --g");
  config["g"] = o.g.front();
  const std::size_t arity = o.arity == 0 ? kDefaultFipArity : o.arity;
  config["arity"] = arity;
  config["out"] = opt(o.out);
  const FilterBase b = io::base_from_json(io::read_json(o.in));
  try {
    const Extension ext = extend_good(b, spec(o.pi, "--pi"), spec(o.f, "--f"), spec(o.g.front(), "--g"), arity);
    if (!o.out.empty()) io::write_json(o.out, io::base_to_json(ext.base));
    Json result;
    const NamedWindow& added = ext.base.generators().back();
    result["adjoined"] = added.name;
    result["window"] = window_summary(added.window);
    result["generators"] = ext.base.size();
    Json fj = io::fip_to_json(ext.report);
    if (!o.entries) fj.erase("entries");
    result["fip"] = fj;
    r.emit("extend", config, result);
    r.summary() << "adjoined " << added.name << " (" << added.window.count() << " members); FIP holds at arity "
                << ext.report.arity << '\n';
  } catch (const FipError& e) {
    r.emit_error("extend", config, "fip", e.what(), Json{{"failing_subfamily", e.failing_subfamily()}});
    r.summary() << e.what() << '\n';
    throw CheckFailed{};
  }
}

void bc(Runner& r, const Options& o) {
  Json config;
  BCReport report;
  if (!o.n) throw UsageError("bc needs --N");
  if (!o.in.empty()) {
    config["in"] = o.in;
    config["begin"] = o.begin;
    config["N"] = *o.n;
    report = bc_window_sum(io::structure_from_json(io::read_json(o.in)), {o.begin, *o.n});
  } else {
    config["pi"] = o.pi;
    config["f"] = o.f;
    config["begin"] = o.begin;
    config["N"] = *o.n;
    report = bc_window_sum(spec(o.pi, "--pi"), spec(o.f, "--f"), {o.begin, *o.n});
  }
  config["terms"] = o.terms;
  Json result;
  result["total"] = report.total_value();
  result["total_exact"] = report.total ? Json(to_string(*report.total)) : Json(nullptr);
  result["divergence_flag"] = report.divergence_flag;
  if (o.terms) {
    Json terms = Json::array();
    for (std::size_t k = 0; k < report.terms.size(); ++k) {
      const BCTerm& t = report.terms[k];
      terms.push_back(Json{{"n", t.level},
                           {"count", t.count},
                           {"length", t.length},
                           {"term", t.value},
                           {"partial_sum", report.partial_values[k]}});
    }
    result["terms"] = std::move(terms);
  }
  r.emit("bc", config, result);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", report.total_value());
  r.summary() << "sum over [" << o.begin << ", " << *o.n << ") = " << buf
              << (report.divergence_flag ? " (upper half still adds >= 1/2)" : "") << '\n';
}

void measure(Runner& r, const Options& o) {
  Json config;
  const GuessingStructure g = structure_source(o, config);
  const LevelWindow w = level_window(o, g, config);
  const Rational m = exact_guess_measure(g, w);
  const BCReport bound = bc_window_sum(g, w);
  Json result;
  result["measure_exact"] = to_string(m);
  result["measure"] = m.convert_to<double>();
  result["union_bound_exact"] = bound.total ? Json(to_string(*bound.total)) : Json(nullptr);
  result["union_bound"] = bound.total_value();
  r.emit("measure", config, result);
  r.summary() << "P(guessed in [" << w.begin << ", " << w.end << ")) = " << to_string(m) << '\n';
}

void mc(Runner& r, const Options& o) {
  Json config;
  const GuessingStructure g = structure_source(o, config);
  const LevelWindow w = level_window(o, g, config);
  const std::uint64_t trials = o.trials == 0 ? 10000 : o.trials;
  config["trials"] = trials;
  config["seed"] = o.seed;
  const TrialReport t = mc_guess_fraction(g, w, trials, o.seed);
  Json result;
  result["hits"] = t.hits;
  result["fraction"] = t.fraction;
  result["stderr"] = t.stderr_estimate;
  r.emit("mc", config, result);
  r.summary() << t.hits << " of " << trials << " subjects guessed in [" << w.begin << ", " << w.end << ")\n";
}

void diag(Runner& r, const Options& o) {
  Json config;
  // Defaults to the full power-set structure on [0, 16); pi defaults to pow2 here.
  Options defaults = o;
  if (o.in.empty() && !o.horizon) defaults.horizon = 16;
  const GuessingStructure g = structure_source(defaults, config);
  config["out"] = opt(o.out);
  const DiagonalCertificate cert = diagonalize(g);
  if (!o.out.empty()) io::write_json(o.out, io::certificate_to_json(cert));

  const std::uint64_t h = g.horizon();
  constexpr std::uint64_t kMaxSweep = 24;
  const bool exhaustive = h <= kMaxSweep;
  const std::uint64_t subjects = exhaustive ? std::uint64_t{1} << h : (o.samples == 0 ? 100000 : o.samples);
  config["sweep"] = exhaustive ? "exhaustive" : "sampled";
  if (!exhaustive) config["seed"] = o.seed;
  config["subjects"] = subjects;
  std::vector<std::uint64_t> histogram;
  for (std::uint64_t s = 0; s < subjects; ++s) {
    SetWindow x(h);
    if (exhaustive) {
      x = SetWindow::from_words(h, std::vector<std::uint64_t>(h == 0 ? 0 : 1, s));
    } else {
      SplitMix64 rng = SplitMix64::substream(o.seed, s);
      x = random_window(h, rng);
    }
    const std::uint64_t agree = check_threadable(cert.chosen, x, cert.b).count();
    if (histogram.size() <= agree) histogram.resize(agree + 1, 0);
    ++histogram[agree];
  }
  const std::uint64_t max_agreement = histogram.empty() ? 0 : histogram.size() - 1;
  Json result;
  result["b"] = cert.b.members();
  result["pairs"] = cert.pairs.size();
  result["verified"] = cert.verified;
  result["max_agreement"] = max_agreement;
  result["agreement_histogram"] = histogram;
  const bool ok = cert.verified && max_agreement <= 1;
  result["passed"] = ok;
  r.emit("diag", config, result);
  r.summary() << "|B| = " << cert.b.count() << "; " << subjects << " subjects, max agreement on B " << max_agreement
              << (ok ? "" : " (CHECK FAILED)") << '\n';
  if (!ok) throw CheckFailed{};
}

void fubini(Runner& r, const Options& o) {
  Json config;
  std::vector<GuessingStructure> parts;
  std::string codec_name = o.codec;
  if (!o.in.empty()) {
    config["in"] = o.in;
    const Json d = io::read_json(o.in);
    if (!d.is_object() || d.value("format", "") != "diamond.sum") throw FormatError("expected a diamond.sum document");
    codec_name = d.value("codec", "cantor");
    const std::filesystem::path dir = std::filesystem::path(o.in).parent_path();
    for (const Json& c : d.at("components")) parts.push_back(component_from_file((dir / c.get<std::string>()).string()));
  } else {
    if (o.trees.empty()) throw UsageError("fubini needs --in or --tree");
    config["tree"] = o.trees;
    for (const std::string& t : o.trees) parts.push_back(component_from_file(t));
  }
  const std::uint64_t samples = o.samples == 0 ? 1000 : o.samples;
  config["codec"] = codec_name;
  config["samples"] = samples;
  config["seed"] = o.seed;
  const SumStructure s = build_sum(std::move(parts), PairCodec::parse(codec_name));
  std::uint64_t mismatches = 0;
  std::uint64_t guessed = 0;
  for (std::uint64_t t = 0; t < samples; ++t) {
    SplitMix64 rng = SplitMix64::substream(o.seed, t);
    const RectangleCheck c = check_rectangle_law(s, random_window(s.max_length(), rng));
    if (!c.holds()) ++mismatches;
    guessed += c.sum.size();
  }
  Json result;
  result["components"] = s.components().size();
  result["sum_horizon"] = s.horizon();
  result["occupied_levels"] = s.occupied().size();
  result["guessed_pairs"] = guessed;
  result["mismatches"] = mismatches;
  result["passed"] = mismatches == 0;
  r.emit("fubini", config, result);
  r.summary() << "rectangle law " << (mismatches == 0 ? "holds" : "FAILS") << " on " << samples << " subjects\n";
  if (mismatches != 0) throw CheckFailed{};
}

void selector(Runner& r, const Options& o) {
  Json config;
  std::optional<FilterBase> b;
  if (!o.in.empty()) {
    config["in"] = o.in;
    b = io::base_from_json(io::read_json(o.in));
  }
  std::optional<FinitePartition> p;
  if (!o.partition.empty()) {
    config["partition"] = o.partition;
    p = io::partition_from_json(io::read_json(o.partition));
  } else {
    const std::optional<std::uint64_t> h = o.horizon ? o.horizon : b ? std::optional(b->horizon()) : std::nullopt;
    if (!h) throw UsageError("selector needs --partition, --horizon or --in");
    config["horizon"] = *h;
    config["partition"] = "square-intervals";
    p = FinitePartition::square_intervals(*h);
  }
  if (!b) {
    b = FilterBase(p->horizon());
    b->add("full", SetWindow::full(p->horizon()));
  }
  Json result;
  result["pieces"] = p->size();
  if (!o.source_hex.empty()) {
    config["source_hex"] = o.source_hex;
    const SelectorResult s = extract_selector(*p, SetWindow::from_hex(o.source_hex, p->horizon()));
    result["selector"] = s.x.members();
    result["source_counts"] = s.source_counts;
    std::vector<std::string> met;
    for (const NamedWindow& g : b->generators()) {
      if (s.x.intersects(g.window)) met.push_back(g.name);
    }
    result["meets"] = met;
    r.emit("selector", config, result);
    r.summary() << "selector with " << s.x.count() << " points meets " << met.size() << " of " << b->size()
                << " generators\n";
    return;
  }
  const std::uint64_t trials = o.trials == 0 ? 1000 : o.trials;
  config["trials"] = trials;
  config["seed"] = o.seed;
  const SelectorTrials t = selector_vs_base(*p, *b, trials, o.seed);
  result["meets_all"] = t.meets_all;
  result["meet_fraction"] = t.meet_fraction;
  result["generator_meets"] = t.generator_meets;
  result["empty_selectors"] = t.empty_selectors;
  result["invariant_violations"] = t.invariant_violations;
  result["passed"] = t.invariant_violations == 0;
  r.emit("selector", config, result);
  r.summary() << t.meets_all << " of " << trials << " selectors meet every generator\n";
  if (t.invariant_violations != 0) throw CheckFailed{};
}

std::vector<SetWindow> parse_indices(const std::vector<std::string>& texts, std::uint64_t cap) {
  std::vector<SetWindow> out;
  for (const std::string& text : texts) {
    SetWindow w(cap);
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      std::uint64_t v = 0;
      try {
        std::size_t used = 0;
        v = std::stoull(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw UsageError("--index expects comma-separated members, got '" + text + "'");
      }
      if (v >= cap) throw UsageError("--index member " + item + " not below --cap");
      w.set(v);
    }
    out.push_back(std::move(w));
  }
  return out;
}

void isbell(Runner& r, const Options& o) {
  Json config;
  const std::uint64_t cap = o.horizon.value_or(5);
  const std::size_t arity = o.arity == 0 ? 4 : o.arity;
  config["cap"] = cap;
  config["arity"] = arity;
  std::vector<SetWindow> indices;
  if (!o.indices.empty()) {
    config["index"] = o.indices;
    indices = parse_indices(o.indices, cap);
  } else {
    if (cap > kMaxIsbellCap) throw UsageError("--cap above " + std::to_string(kMaxIsbellCap));
    // Every subset of the ground when that is small, else the singletons.
    const bool all = cap <= 5;
    config["index"] = all ? "all-subsets" : "singletons";
    if (all) {
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << cap); ++m) {
        indices.push_back(SetWindow::from_words(cap, std::vector<std::uint64_t>(cap == 0 ? 0 : 1, m)));
      }
    } else {
      for (std::uint64_t i = 0; i < cap; ++i) indices.push_back(SetWindow::from_members(cap, {i}));
    }
  }
  const IsbellFamily family = isbell_family(cap, indices, arity);
  const IndependenceReport rep = check_independence(family, arity);
  Json result;
  result["ground_size"] = family.ground_size();
  result["max_support"] = family.max_support();
  result["indices"] = family.sets().size();
  result["combinations"] = rep.combinations;
  result["passed"] = rep.passed();
  if (rep.failure) {
    result["failure"] = Json{{"members", rep.failure->first}, {"complements", rep.failure->second}};
  } else {
    result["failure"] = nullptr;
  }
  r.emit("isbell", config, result);
  r.summary() << family.sets().size() << " coded sets over " << family.ground_size() << " points; "
              << rep.combinations << " combinations " << (rep.passed() ? "all nonempty" : "NOT independent") << '\n';
  if (!rep.passed()) throw CheckFailed{};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Finite experiments with diamond-style guessing on omega", "diamond"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  auto add_specs = [&](CLI::App* s) {
    s->add_option("--pi", o.pi, "Bound function pi")->capture_default_str();
    s->add_option("--f", o.f, "Length function f")->capture_default_str();
  };
  auto add_structure = [&](CLI::App* s) {
    add_specs(s);
    s->add_option("--in", o.in, "Structure file");
    s->add_option("--horizon", o.horizon, "Horizon of a random structure");
    s->add_option("--structure-seed", o.structure_seed, "Seed of the random structure")->capture_default_str();
    s->add_option("--begin", o.begin, "First level of the window")->capture_default_str();
    s->add_option("--end", o.end, "One past the last level (default: horizon)");
  };

  std::map<CLI::App*, std::function<void(Runner&, const Options&)>> handlers;

  auto* s_build = app.add_subcommand("build-tree", "Construct a splitting tree and its stage log");
  s_build->add_option("--pi", o.pi, "Bound function pi")->capture_default_str();
  s_build->add_option("--stages", o.stages, "Number of stages")->required();
  s_build->add_option("--cap", o.cap, "Largest horizon the construction may use")->capture_default_str();
  s_build->add_option("--out", o.out, "Tree file to write");
  s_build->add_option("--log", o.log, "Stage log (JSON lines) to write");
  handlers[s_build] = build_tree;

  auto* s_verify = app.add_subcommand("verify", "Check splitting and the star property of a tree");
  s_verify->add_option("--in", o.in, "Tree file")->required();
  s_verify->add_option("--frontier", o.frontier, "Safety frontier (default: last even-stage mark)");
  s_verify->add_option("--arity", o.arity, "Largest branch family for the star check (default 2)");
  handlers[s_verify] = verify;

  auto* s_base = app.add_subcommand("base", "Generator family of a tree's frontier branches, with FIP check");
  s_base->add_option("--in", o.in, "Tree file")->required();
  s_base->add_option("--arity", o.arity, "FIP arity (default 5)");
  s_base->add_option("--out", o.out, "Base file to write");
  s_base->add_flag("--entries", o.entries, "Include every subfamily witness");
  handlers[s_base] = base;

  auto* s_sky = app.add_subcommand("sky", "Probe a sky relation over test functions");
  add_specs(s_sky);
  s_sky->add_option("--g", o.g, "Test function (repeatable)")->required();
  s_sky->add_option("--in", o.in, "Base file");
  s_sky->add_option("--horizon", o.horizon, "Horizon when no base is given");
  s_sky->add_option("--relation", o.relation, "less or geq")->capture_default_str();
  s_sky->add_option("--midpoint", o.midpoint, "Midpoint (default: horizon / 2)");
  s_sky->add_option("--probe-arity", o.probe_arity, "Generators per probed intersection")->capture_default_str();
  handlers[s_sky] = sky;

  auto* s_extend = app.add_subcommand("extend", "Adjoin {n : g(pi(n)) < f(n)} to a base");
  add_specs(s_extend);
  s_extend->add_option("--g", o.g, "Test function")->required();
  s_extend->add_option("--in", o.in, "Base file")->required();
  s_extend->add_option("--arity", o.arity, "FIP arity (default 5)");
  s_extend->add_option("--out", o.out, "Extended base file to write");
  s_extend->add_flag("--entries", o.entries, "Include every subfamily witness");
  handlers[s_extend] = extend;

  auto* s_bc = app.add_subcommand("bc", "Partial sums of pi(n) / 2^f(n)");
  add_specs(s_bc);
  s_bc->add_option("--N", o.n, "End of the summation window")->required();
  s_bc->add_option("--begin", o.begin, "Start of the summation window")->capture_default_str();
  s_bc->add_option("--in", o.in, "Structure file (sums |A_n| instead of pi(n))");
  s_bc->add_flag("--terms", o.terms, "List every term and partial sum");
  handlers[s_bc] = bc;

  auto* s_measure = app.add_subcommand("measure", "Exact probability of being guessed in a window");
  add_structure(s_measure);
  handlers[s_measure] = measure;

  auto* s_mc = app.add_subcommand("mc", "Monte Carlo fraction of subjects guessed in a window");
  add_structure(s_mc);
  s_mc->add_option("--trials", o.trials, "Number of subjects (default 10000)");
  s_mc->add_option("--seed", o.seed, "Trial seed")->capture_default_str();
  handlers[s_mc] = mc;

  auto* s_diag = app.add_subcommand("diag", "Diagonalize and sweep subjects for threading");
  add_structure(s_diag);
  s_diag->preparse_callback([&o](std::size_t) { o.pi = "pow2"; });
  s_diag->add_option("--out", o.out, "Certificate file to write");
  s_diag->add_option("--samples", o.samples, "Subjects when the horizon is too large to sweep");
  s_diag->add_option("--seed", o.seed, "Sampling seed")->capture_default_str();
  handlers[s_diag] = diag;

  auto* s_fubini = app.add_subcommand("fubini", "Sum of structures and the rectangle law");
  s_fubini->add_option("--in", o.in, "Sum descriptor file");
  s_fubini->add_option("--tree", o.trees, "Component tree or structure file (repeatable)");
  s_fubini->add_option("--codec", o.codec, "cantor or row-major:<width>")->capture_default_str();
  s_fubini->add_option("--samples", o.samples, "Random subjects (default 1000)");
  s_fubini->add_option("--seed", o.seed, "Sampling seed")->capture_default_str();
  handlers[s_fubini] = fubini;

  auto* s_sel = app.add_subcommand("selector", "Extract selectors and test them against a base");
  s_sel->add_option("--partition", o.partition, "Partition file");
  s_sel->add_option("--horizon", o.horizon, "Horizon of the square-interval partition");
  s_sel->add_option("--in", o.in, "Base file (default: the full window)");
  s_sel->add_option("--source-hex", o.source_hex, "Use this window as the source instead of random trials");
  s_sel->add_option("--trials", o.trials, "Number of trials (default 1000)");
  s_sel->add_option("--seed", o.seed, "Trial seed")->capture_default_str();
  handlers[s_sel] = selector;

  auto* s_isbell = app.add_subcommand("isbell", "Coded independent family and its exhaustive check");
  s_isbell->add_option("--cap", o.horizon, "Ground cap (default 5)");
  s_isbell->add_option("--arity", o.arity, "Largest combination (default 4)");
  s_isbell->add_option("--index", o.indices, "Index set as comma-separated members (repeatable)");
  handlers[s_isbell] = isbell;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();
  Runner runner(out, err);
  try {
    handlers.at(chosen)(runner, o);
    return kExitOk;
  } catch (const CheckFailed&) {
    return kExitCheckFailed;
  } catch (const UsageError& e) {
    err << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::string type = "error";
    if (dynamic_cast<const FormatError*>(&e)) type = "format";
    if (dynamic_cast<const HorizonError*>(&e)) type = "horizon";
    if (dynamic_cast<const PreconditionError*>(&e)) type = "precondition";
    if (dynamic_cast<const OverflowError*>(&e)) type = "overflow";
    runner.emit_error(command, Json{{"argv", std::vector<std::string>(argv + 1, argv + argc)}}, type, e.what());
    err << command << ": " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

}  // namespace diamond::cli
