#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <new>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cli.hpp"
#include "json.hpp"
#include "json_config.hpp"
#include "recdiv/baselines.hpp"
#include "recdiv/error.hpp"
#include "recdiv/flow_diversify.hpp"
#include "recdiv/format.hpp"
#include "recdiv/greedy_diversify.hpp"
#include "recdiv/synthetic.hpp"
#include "recdiv/thresholds.hpp"
#include "workspace.hpp"

namespace recdiv::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const std::vector<std::string> kMethods{"top", "mmr", "xquad", "greedy", "flow"};

struct MethodSettings {
  std::string method;
  DivParams params;
  double lambda = 0.0;
};

// Checks that the workspace holds what the method needs.
void require_inputs(const Workspace& ws, const std::string& method) {
  if ((method == "mmr" || method == "xquad") && !ws.has_item_categories) {
    throw UsageError("method " + method + " needs --item-groups");
  }
  if (method == "xquad" && !ws.intent) {
    throw UsageError("method xquad needs --train to build intent profiles");
  }
  if ((method == "greedy" || method == "flow") && !ws.thresholds) {
    throw UsageError("method " + method +
                     " needs --thresholds, or --train with groupings to derive them");
  }
  if (method == "flow" && (!ws.has_user_types || !ws.has_item_categories)) {
    throw UsageError("method flow needs both --user-groups and --item-groups");
  }
}

RankedLists run_method(const Workspace& ws, const MethodSettings& m) {
  if (m.method == "top") return top_k(ws.graph);
  if (m.method == "mmr") return mmr(ws.graph, ws.item_categories, m.lambda);
  if (m.method == "xquad") return xquad(ws.graph, ws.item_categories, *ws.intent, m.lambda);
  if (m.method == "greedy") {
    return rank_by_relevance(
        greedy_solve(ws.graph, ws.user_types, ws.item_categories, *ws.thresholds, m.params));
  }
  return rank_by_relevance(
      solve_tdiv(ws.graph, ws.user_types, ws.item_categories, *ws.thresholds, m.params));
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void write_text(const std::string& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DataError("cannot write " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MetricsReport evaluate_lists(const Workspace& ws, const RankedLists& ranked,
                             const TestRelevance* test, const DivParams& params,
                             std::size_t cutoff, bool unfiltered) {
  EvaluationInputs in;
  in.graph = &ws.graph;
  if (ws.has_user_types) in.user_types = &ws.user_types;
  if (ws.has_item_categories) in.item_categories = &ws.item_categories;
  if (ws.thresholds) in.thresholds = &*ws.thresholds;
  if (ws.intent) in.intent = &*ws.intent;
  in.test = test;
  in.params = params;
  in.catalog_size = ws.catalog_size;
  in.cutoff = cutoff;
  in.intent_on_relevant_only = !unfiltered;
  return evaluate(ranked, in);
}

std::string method_help() {
  std::string out;
  for (const auto& m : kMethods) out += (out.empty() ? "" : "|") + m;
  return out;
}

// ---- split

struct SplitCommand {
  std::string ratings;
  std::string out_dir;
  SplitSpec spec;

  void add_to(CLI::App& app) {
    app.add_option("--ratings", ratings, "Ratings file")->required()->check(CLI::ExistingFile);
    app.add_option("--out-dir", out_dir, "Directory for train_<f>.tsv and test_<f>.tsv")
        ->required();
    app.add_option("--folds", spec.folds, "Number of folds")->check(CLI::Range(2, 1000));
    app.add_option("--min-ratings", spec.min_ratings,
                   "Users with more ratings than this are test users")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", spec.seed, "Shuffle seed");
  }

  void run(std::ostream& out) const {
    const RatingsDataset data = load_ratings(ratings);
    const std::vector<Fold> folds = split_folds(data, spec);
    fs::create_directories(out_dir);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      save_ratings((fs::path(out_dir) / ("train_" + std::to_string(f) + ".tsv")).string(),
                   folds[f].train);
      save_ratings((fs::path(out_dir) / ("test_" + std::to_string(f) + ".tsv")).string(),
                   folds[f].test);
      out << "fold " << f << ": " << folds[f].train.ratings.size() << " train, "
          << folds[f].test.ratings.size() << " test\n";
    }
  }
};

// ---- derive-thresholds

struct DeriveCommand {
  InputOptions inputs;
  std::string out_path;

  void add_to(CLI::App& app) {
    inputs.add_to(app);
    app.add_option("--out", out_path, "Threshold file to write")->required();
  }

  void run(std::ostream& out) const {
    if (inputs.train.empty()) throw UsageError("derive-thresholds needs --train");
    if (!inputs.thresholds.empty()) throw UsageError("--thresholds makes no sense here");
    if (inputs.user_groups.empty() && inputs.item_groups.empty()) {
      throw UsageError("derive-thresholds needs --user-groups or --item-groups");
    }
    const Workspace ws(inputs);
    ensure_parent(out_path);
    save_thresholds(out_path, *ws.thresholds, ws.graph, ws.user_types, ws.item_categories);
    out << "wrote " << ws.thresholds->user_category.nonzero_count() << " user and "
        << ws.thresholds->item_type.nonzero_count() << " item thresholds to " << out_path
        << "\n";
  }
};

// ---- diversify

struct DiversifyCommand {
  InputOptions inputs;
  MethodSettings settings;
  std::string out_path;
  std::string log_path;
  CLI::Option* beta_opt = nullptr;
  CLI::Option* mu_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;

  void add_to(CLI::App& app) {
    inputs.add_to(app);
    app.add_option("--method", settings.method, method_help())
        ->required()
        ->check(CLI::IsMember(kMethods));
    beta_opt = app.add_option("--beta", settings.params.beta, "Weight of TUDiv (greedy, flow)")
                   ->check(CLI::NonNegativeNumber);
    mu_opt = app.add_option("--mu", settings.params.mu, "Weight of TIDiv (greedy, flow)")
                 ->check(CLI::NonNegativeNumber);
    lambda_opt = app.add_option("--lambda", settings.lambda, "Relevance weight (mmr, xquad)")
                     ->check(CLI::Range(0.0, 1.0));
    app.add_option("--out", out_path, "Solution file to write")->required();
    app.add_option("--log", log_path, "JSON run log (default: <out>.log.json)");
  }

  void run(std::ostream& out) const {
    const std::string& m = settings.method;
    if ((m == "greedy" || m == "flow") && (beta_opt->count() == 0 || mu_opt->count() == 0)) {
      throw UsageError("method " + m + " needs --beta and --mu");
    }
    if ((m == "mmr" || m == "xquad") && lambda_opt->count() == 0) {
      throw UsageError("method " + m + " needs --lambda");
    }
    const Workspace ws(inputs);
    require_inputs(ws, m);

    const auto start = Clock::now();
    const RankedLists ranked = run_method(ws, settings);
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();

    ensure_parent(out_path);
    save_solution(out_path, ws.graph, ranked, m);

    const Solution sol = to_solution(ranked, ws.graph, ws.user_types, ws.item_categories);
    nlohmann::ordered_json log;
    log["method"] = m;
    log["beta"] = settings.params.beta;
    log["mu"] = settings.params.mu;
    if (m == "mmr" || m == "xquad") log["lambda"] = settings.lambda;
    log["users"] = ws.graph.user_count();
    log["items"] = ws.graph.item_count();
    log["edges"] = ws.graph.edge_count();
    log["total_capacity"] = ws.graph.total_capacity();
    log["selected"] = sol.size();
    log["thresholds"] = ws.threshold_source;
    const double rel = relevance_sum(sol);
    log["relevance"] = rel;
    if (ws.thresholds) {
      const double tu = tudiv(sol, ws.item_categories, *ws.thresholds);
      const double ti = tidiv(sol, ws.user_types, *ws.thresholds);
      log["tudiv"] = tu;
      log["tidiv"] = ti;
      log["objective"] = rel + settings.params.beta * tu + settings.params.mu * ti;
    } else {
      log["tudiv"] = nullptr;
      log["tidiv"] = nullptr;
      log["objective"] = nullptr;
    }
    log["wall_seconds"] = seconds;
    log["skipped_candidate_rows"] = ws.skipped_candidates;
    const std::string path = log_path.empty() ? out_path + ".log.json" : log_path;
    write_text(path, log.dump(2) + "\n");

    out << m << ": " << sol.size() << " recommendations for " << ws.graph.user_count()
        << " users in " << format_real(seconds) << "s";
    if (!log["objective"].is_null()) {
      out << ", objective " << format_real(log["objective"].get<double>());
    }
    out << "\n";
  }
};

// ---- evaluate

struct EvaluationOptions {
  std::string test;
  double min_rating = 3.0;
  std::size_t cutoff = 10;
  bool unfiltered = false;

  void add_to(CLI::App& app) {
    app.add_option("--test", test, "Held-out ratings for precision")->check(CLI::ExistingFile);
    app.add_option("--min-rating", min_rating, "Test ratings at or above this are relevant");
    app.add_option("--cutoff", cutoff, "List cutoff k (0 = full lists)");
    app.add_flag("--unfiltered", unfiltered,
                 "Compute diversity and intent metrics on whole lists instead of the "
                 "held-out relevant items");
  }

  std::optional<TestRelevance> load(const Workspace& ws) const {
    if (test.empty()) return std::nullopt;
    return test_relevance(load_ratings(test), ws.graph, min_rating);
  }
};

struct EvaluateCommand {
  InputOptions inputs;
  EvaluationOptions eval;
  std::string solution;
  DivParams params;
  std::string json_path;
  std::string csv_path;

  void add_to(CLI::App& app) {
    inputs.add_to(app);
    eval.add_to(app);
    app.add_option("--solution", solution, "Solution file")->required()->check(CLI::ExistingFile);
    app.add_option("--beta", params.beta, "beta for the div metric")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--mu", params.mu, "mu for the div metric")->check(CLI::NonNegativeNumber);
    app.add_option("--json", json_path, "Write the report as JSON (default: stdout)");
    app.add_option("--csv", csv_path, "Write the report as a CSV header and row");
  }

  void run(std::ostream& out) const {
    const Workspace ws(inputs);
    const RankedLists ranked = load_solution(solution, ws.graph);
    const auto test = eval.load(ws);
    const MetricsReport report =
        evaluate_lists(ws, ranked, test ? &*test : nullptr, params, eval.cutoff,
                       eval.unfiltered);
    if (json_path.empty()) {
      out << report.to_json() << "\n";
    } else {
      write_text(json_path, report.to_json() + "\n");
    }
    if (!csv_path.empty()) {
      write_text(csv_path, report.csv_header() + "\n" + report.csv_row() + "\n");
    }
  }
};

// ---- gridsearch

struct GridRow {
  MethodSettings settings;
  MetricsReport report;
  std::string flags;
};

void flag_argmax(std::vector<GridRow>& rows, const std::string& field, const std::string& flag) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto v = rows[i].report.field(field);
    if (v && (!best || *v > *rows[*best].report.field(field))) best = i;
  }
  if (!best) return;
  auto& f = rows[*best].flags;
  f += (f.empty() ? "" : "|") + flag;
}

struct GridCommand {
  InputOptions inputs;
  EvaluationOptions eval;
  std::string method;
  std::vector<double> betas{0.0};
  std::vector<double> mus{0.0};
  std::vector<double> lambdas;
  unsigned jobs = 1;
  std::string out_path;

  void add_to(CLI::App& app) {
    inputs.add_to(app);
    eval.add_to(app);
    app.add_option("--method", method, "greedy|flow|mmr|xquad")
        ->required()
        ->check(CLI::IsMember({"greedy", "flow", "mmr", "xquad"}));
    app.add_option("--betas", betas, "beta values (greedy, flow)")
        ->delimiter(',')
        ->check(CLI::NonNegativeNumber);
    app.add_option("--mus", mus, "mu values (greedy, flow)")
        ->delimiter(',')
        ->check(CLI::NonNegativeNumber);
    app.add_option("--lambdas", lambdas, "lambda values (mmr, xquad)")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--jobs", jobs, "Settings evaluated concurrently")->check(CLI::Range(1u, 256u));
    app.add_option("--out", out_path, "CSV file to write (default: stdout)");
  }

  std::vector<MethodSettings> grid() const {
    std::vector<MethodSettings> out;
    if (method == "mmr" || method == "xquad") {
      if (lambdas.empty()) throw UsageError("method " + method + " needs --lambdas");
      for (double l : lambdas) out.push_back({method, {}, l});
    } else {
      for (double b : betas) {
        for (double m : mus) out.push_back({method, {b, m}, 0.0});
      }
    }
    if (out.empty()) throw UsageError("empty grid");
    return out;
  }

  void run(std::ostream& out) const {
    const std::vector<MethodSettings> settings = grid();
    const Workspace ws(inputs);
    require_inputs(ws, method);
    const auto test = eval.load(ws);

    // Settings share only read-only inputs; each writes its own row.
    std::vector<GridRow> rows(settings.size());
    std::vector<std::exception_ptr> errors(settings.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < settings.size(); i = next++) {
        try {
          const RankedLists ranked = run_method(ws, settings[i]);
          rows[i] = {settings[i],
                     evaluate_lists(ws, ranked, test ? &*test : nullptr, settings[i].params,
                                    eval.cutoff, eval.unfiltered),
                     ""};
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    const unsigned n = std::min<std::size_t>(jobs, settings.size());
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    flag_argmax(rows, "tudiv", "argmax_tudiv");
    flag_argmax(rows, "tidiv", "argmax_tidiv");

    std::ostringstream csv;
    csv << "method,beta,mu,lambda," << MetricsReport{}.csv_header() << ",flag\n";
    for (const auto& r : rows) {
      const bool uses_lambda = method == "mmr" || method == "xquad";
      csv << method << ',' << (uses_lambda ? "" : format_real(r.settings.params.beta)) << ','
          << (uses_lambda ? "" : format_real(r.settings.params.mu)) << ','
          << (uses_lambda ? format_real(r.settings.lambda) : "") << ',' << r.report.csv_row()
          << ',' << r.flags << '\n';
    }
    if (out_path.empty()) {
      out << csv.str();
    } else {
      write_text(out_path, csv.str());
      out << "wrote " << rows.size() << " settings to " << out_path << "\n";
    }
  }
};

// ---- report

struct ReportCommand {
  std::vector<std::string> inputs;
  std::string format = "csv";
  std::string out_path;

  void add_to(CLI::App& app) {
    app.add_option("inputs", inputs, "Metrics JSON files written by evaluate")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--format", format, "csv|markdown")->check(CLI::IsMember({"csv", "markdown"}));
    app.add_option("--out", out_path, "File to write (default: stdout)");
  }

  void run(std::ostream& out) const {
    std::ostringstream table;
    const auto& names = MetricsReport::field_names();
    if (format == "markdown") {
      table << "| run | cutoff |";
      for (const auto& n : names) table << ' ' << n << " |";
      table << "\n|---|---|";
      for (std::size_t i = 0; i < names.size(); ++i) table << "---|";
      table << '\n';
    } else {
      table << "run," << MetricsReport{}.csv_header() << '\n';
    }
    for (const auto& path : inputs) {
      const MetricsReport r = MetricsReport::from_json(read_text(path));
      const std::string label = fs::path(path).stem().string();
      if (format == "markdown") {
        table << "| " << label << " | " << r.cutoff << " |";
        for (const auto& n : names) {
          const auto v = r.field(n);
          table << ' ' << (v ? format_real(*v) : "-") << " |";
        }
        table << '\n';
      } else {
        table << label << ',' << r.csv_row() << '\n';
      }
    }
    if (out_path.empty()) {
      out << table.str();
    } else {
      write_text(out_path, table.str());
    }
  }
};

// ---- synth

struct SynthCommand {
  SyntheticSpec spec;
  std::string out_dir;

  void add_to(CLI::App& app) {
    app.add_option("--out-dir", out_dir, "Directory to write the dataset into")->required();
    app.add_option("--users", spec.users)->check(CLI::PositiveNumber);
    app.add_option("--items", spec.items)->check(CLI::PositiveNumber);
    app.add_option("--candidates-per-user", spec.candidates_per_user)
        ->check(CLI::PositiveNumber);
    app.add_option("--display", spec.display, "Display constraint the data is shaped for")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--seed", spec.seed);
  }

  void run(std::ostream& out) const {
    const SyntheticData d = make_synthetic(spec);
    fs::create_directories(out_dir);
    const auto at = [&](const char* name) { return (fs::path(out_dir) / name).string(); };
    save_candidates(at("candidates.tsv"), d.graph);
    save_ratings(at("ratings.tsv"), d.train);
    save_grouping(at("item_genres.tsv"), d.item_genres, d.graph);
    save_grouping(at("item_studios.tsv"), d.item_studios, d.graph);
    save_grouping(at("user_demographics.tsv"), d.user_demographics, d.graph);
    save_grouping(at("user_genders.tsv"), d.user_genders, d.graph);
    out << "wrote " << d.graph.user_count() << " users, " << d.graph.item_count() << " items, "
        << d.graph.edge_count() << " candidates and " << d.train.ratings.size()
        << " ratings to " << out_dir << "\n";
  }
};

std::string active_subcommand(const std::vector<std::string>& args,
                              const std::set<std::string>& names) {
  for (const auto& a : args) {
    if (names.count(a)) return a;
  }
  return {};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Diversity-aware reranking of candidate recommendations", "recdiv");
  app.require_subcommand(1);

  SplitCommand split;
  DeriveCommand derive;
  DiversifyCommand diversify;
  EvaluateCommand evaluate_cmd;
  GridCommand grid;
  ReportCommand report;
  SynthCommand synth;

  std::vector<std::pair<CLI::App*, std::function<void()>>> commands;
  auto add = [&](const char* name, const char* help, auto& cmd) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    cmd.add_to(*sub);
    commands.emplace_back(sub, [&cmd, &out] { cmd.run(out); });
  };
  add("split", "Split ratings into train/test folds", split);
  add("derive-thresholds", "Derive per-user and per-item thresholds", derive);
  add("diversify", "Select recommendation lists with one method", diversify);
  add("evaluate", "Compute the metrics report of a solution", evaluate_cmd);
  add("gridsearch", "Diversify and evaluate over a parameter grid", grid);
  add("report", "Tabulate metrics reports", report);
  add("synth", "Write a synthetic dataset", synth);

  std::set<std::string> names;
  for (const auto& [sub, run] : commands) names.insert(sub->get_name());
  auto config = std::make_shared<JsonConfig>(names);
  config->set_active(active_subcommand(args, names));
  app.config_formatter(config);
  app.set_config("--config", "", "JSON file of option values; flags take precedence");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    for (const auto& [sub, run] : commands) {
      if (sub->parsed()) run();
    }
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const LimitError& e) {
    err << "limit exceeded: " << e.what() << "\n";
    return kExitLimits;
  } catch (const FlowError& e) {
    err << "flow failure: " << e.what() << "\n";
    return kExitLimits;
  } catch (const Error& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::bad_alloc&) {
    err << "limit exceeded: out of memory\n";
    return kExitLimits;
  }
}

}  // namespace recdiv::cli
