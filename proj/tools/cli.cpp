#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "gmdiv/bounds.hpp"
#include "gmdiv/divergence.hpp"
#include "gmdiv/errors.hpp"
#include "gmdiv/estimation.hpp"
#include "gmdiv/format.hpp"
#include "gmdiv/parallel.hpp"
#include "gmdiv/record.hpp"
#include "gmdiv/sweep.hpp"

namespace gmdiv::cli {

namespace {

using nlohmann::json;

const std::vector<std::string> kCommands = {"div", "sweep", "dichotomy", "entropy", "seq", "report"};
const std::vector<std::string> kCommonKeys = {"command", "seed", "out", "threads"};

void allow_keys(const json& j, const std::string& where, const std::vector<std::string>& keys) {
  if (!j.is_object()) throw InputError("config: '" + where + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw InputError("config: unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

std::string field(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

double number(const json& j, const std::string& where, const std::string& key,
              std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw InputError("config: missing field '" + field(where, key) + "'");
  }
  if (!j.at(key).is_number()) throw InputError("config: field '" + field(where, key) + "' must be a number");
  return j.at(key).get<double>();
}

std::size_t count(const json& j, const std::string& where, const std::string& key,
                  std::optional<std::size_t> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw InputError("config: missing field '" + field(where, key) + "'");
  }
  if (!j.at(key).is_number_unsigned()) {
    throw InputError("config: field '" + field(where, key) + "' must be a non-negative integer");
  }
  return j.at(key).get<std::size_t>();
}

std::string text(const json& j, const std::string& where, const std::string& key,
                 std::optional<std::string> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw InputError("config: missing field '" + field(where, key) + "'");
  }
  if (!j.at(key).is_string()) throw InputError("config: field '" + field(where, key) + "' must be a string");
  return j.at(key).get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& where, const std::string& key,
                            std::optional<std::vector<double>> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw InputError("config: missing field '" + field(where, key) + "'");
  }
  const auto& a = j.at(key);
  if (!a.is_array() || a.empty()) {
    throw InputError("config: field '" + field(where, key) + "' must be a non-empty array of numbers");
  }
  std::vector<double> out;
  for (const auto& v : a) {
    if (!v.is_number()) throw InputError("config: field '" + field(where, key) + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::uint64_t seed_of(const json& config) { return count(config, "", "seed", 1); }

std::filesystem::path out_dir(const json& config) {
  std::filesystem::path dir = text(config, "", "out", ".");
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << contents;
}

GaussianMixture mixture_field(const json& j, const std::string& where, const std::string& key) {
  if (!j.contains(key)) throw InputError("config: missing field '" + field(where, key) + "'");
  try {
    return mixture_from_record(j.at(key));
  } catch (const InputError& e) {
    throw InputError("config: field '" + field(where, key) + "': " + e.what());
  }
}

ClassTag class_field(const json& j, const std::string& where) {
  const std::string type = text(j, where, "type");
  if (type == "compact") {
    allow_keys(j, where, {"type", "M"});
    return Compact{number(j, where, "M")};
  }
  if (type == "subgaussian") {
    allow_keys(j, where, {"type", "K"});
    return Subgaussian{number(j, where, "K")};
  }
  throw InputError("config: field '" + field(where, "type") + "' must be 'compact' or 'subgaussian'");
}

std::vector<GaussianMixture> family_field(const json& j, const std::string& where) {
  const std::string type = text(j, where, "type");
  if (type == "theta_grid") {
    allow_keys(j, where, {"type", "lo", "hi", "count"});
    return theta_grid_family(number(j, where, "lo"), number(j, where, "hi"), count(j, where, "count"));
  }
  if (type == "atom_grid") {
    allow_keys(j, where, {"type", "M", "locations", "weights"});
    return atom_grid_family(number(j, where, "M"), count(j, where, "locations"),
                            numbers(j, where, "weights", std::vector<double>{0.5}));
  }
  if (type == "dichotomy") {
    allow_keys(j, where, {"type", "K", "r_grid"});
    return dichotomy_grid_family(number(j, where, "K"), numbers(j, where, "r_grid"));
  }
  if (type == "list") {
    allow_keys(j, where, {"type", "members"});
    if (!j.contains("members") || !j.at("members").is_array() || j.at("members").empty()) {
      throw InputError("config: field '" + field(where, "members") + "' must be a non-empty array");
    }
    std::vector<GaussianMixture> out;
    for (const auto& m : j.at("members")) out.push_back(mixture_from_record(m));
    return out;
  }
  throw InputError("config: field '" + field(where, "type") +
                   "' must be one of theta_grid, atom_grid, dichotomy, list");
}

const json& object_field(const json& j, const std::string& key) {
  if (!j.contains(key)) throw InputError("config: missing field '" + key + "'");
  if (!j.at(key).is_object()) throw InputError("config: field '" + key + "' must be an object");
  return j.at(key);
}

void run_div(const json& config, std::ostream& out) {
  auto keys = kCommonKeys;
  keys.insert(keys.end(), {"kind", "p", "q", "tol", "min_radius", "mc_samples"});
  allow_keys(config, "", keys);

  std::vector<DivergenceKind> kinds(kAllDivergenceKinds.begin(), kAllDivergenceKinds.end());
  if (config.contains("kind")) {
    kinds.clear();
    const auto& k = config.at("kind");
    if (k.is_string()) {
      kinds.push_back(parse_divergence_kind(k.get<std::string>()));
    } else if (k.is_array() && !k.empty()) {
      for (const auto& name : k) {
        if (!name.is_string()) throw InputError("config: field 'kind' must hold strings");
        kinds.push_back(parse_divergence_kind(name.get<std::string>()));
      }
    } else {
      throw InputError("config: field 'kind' must be a string or a non-empty array of strings");
    }
  }
  const auto p = mixture_field(config, "", "p");
  const auto q = mixture_field(config, "", "q");
  DivergenceOptions opts;
  opts.tol = number(config, "", "tol", 0.0);
  opts.min_radius = number(config, "", "min_radius", 0.0);
  opts.mc_samples = count(config, "", "mc_samples", opts.mc_samples);
  opts.mc_seed = seed_of(config);

  std::ostringstream csv_text;
  CsvWriter csv(csv_text, {"kind", "value", "truncation_bound", "domain_radius", "quadrature_points"});
  for (auto kind : kinds) {
    const auto est = divergence(kind, p, q, opts);
    csv.cell(std::string(to_string(kind)))
        .cell(est.value)
        .cell(est.truncation_bound)
        .cell(est.domain_radius)
        .cell(est.quadrature_points);
    csv.end_row();
  }
  out << csv_text.str();
  if (config.contains("out")) write_file(out_dir(config) / "div.csv", csv_text.str());
}

void run_sweep(const json& config, std::ostream& out) {
  auto keys = kCommonKeys;
  keys.insert(keys.end(), {"bound", "class", "d", "n", "tol", "max_atoms", "standard_q_fraction"});
  allow_keys(config, "", keys);

  SweepSpec spec;
  spec.id = parse_bound_id(text(config, "", "bound"));
  spec.cls = class_field(object_field(config, "class"), "class");
  spec.d = count(config, "", "d", 1);
  spec.n = count(config, "", "n", 100);
  spec.seed = seed_of(config);
  spec.tol = number(config, "", "tol", 0.0);
  spec.max_atoms = count(config, "", "max_atoms", 8);
  spec.standard_q_fraction = number(config, "", "standard_q_fraction", 0.1);

  const auto report = verify_sweep(spec);
  const auto dir = out_dir(config);
  std::ostringstream csv;
  write_sweep_csv(csv, report);
  write_file(dir / "sweep.csv", csv.str());
  const auto summary = sweep_summary(report);
  write_file(dir / "sweep.json", summary.dump(2) + "\n");
  out << summary.dump() << "\n";
}

void run_dichotomy(const json& config, std::ostream& out) {
  auto keys = kCommonKeys;
  keys.insert(keys.end(), {"K", "r_grid", "rel_tol"});
  allow_keys(config, "", keys);

  const auto rows = dichotomy_experiment(number(config, "", "K", 2.0),
                                         numbers(config, "", "r_grid", std::vector<double>{5, 10, 15}),
                                         number(config, "", "rel_tol", 1e-6));
  std::ostringstream csv;
  write_dichotomy_csv(csv, rows);
  write_file(out_dir(config) / "dichotomy.csv", csv.str());
  out << csv.str();
}

void run_entropy(const json& config, std::ostream& out) {
  auto keys = kCommonKeys;
  keys.insert(keys.end(), {"family", "epsilons", "eta_grid", "centers", "n", "tol", "risk_trials"});
  allow_keys(config, "", keys);

  const auto family = family_field(object_field(config, "family"), "family");
  const auto epsilons = numbers(config, "", "epsilons");
  for (double e : epsilons) {
    if (!(e > 0.0)) throw InputError("config: field 'epsilons' must hold positive numbers");
  }
  const auto eta_grid = numbers(config, "", "eta_grid", epsilons);
  const std::size_t n = count(config, "", "n", 100);
  if (n == 0) throw InputError("config: field 'n' must be at least 1");
  const double tol = number(config, "", "tol", 0.0);
  std::vector<std::size_t> centers;
  if (config.contains("centers")) {
    for (double c : numbers(config, "", "centers")) {
      if (!(c >= 0.0) || c != static_cast<double>(static_cast<std::size_t>(c)) ||
          static_cast<std::size_t>(c) >= family.size()) {
        throw InputError("config: field 'centers' must hold candidate indices");
      }
      centers.push_back(static_cast<std::size_t>(c));
    }
  } else {
    for (std::size_t i = 0; i < family.size(); ++i) centers.push_back(i);
  }

  const auto dist = pairwise_hellinger(family, tol);
  std::vector<std::size_t> global(epsilons.size());
  std::vector<std::size_t> local(epsilons.size());
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    global[k] = greedy_cover_indices(dist, epsilons[k]).size();
    local[k] = local_covering_number(dist, centers, epsilons[k], eta_grid);
  }
  const auto batch = rate_functional(epsilons, local, true, n);
  const auto seq = rate_functional(epsilons, global, false, n);

  std::ostringstream csv_text;
  CsvWriter csv(csv_text, {"eps", "N", "N_loc", "batch_rate", "seq_rate"});
  const double dn = static_cast<double>(n);
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    const double e2 = epsilons[k] * epsilons[k];
    csv.cell(epsilons[k])
        .cell(global[k])
        .cell(local[k])
        .cell(e2 + batch.log_cover[k] / dn)
        .cell(dn * e2 + seq.log_cover[k]);
    csv.end_row();
  }

  json summary;
  summary["family_size"] = family.size();
  summary["n"] = n;
  summary["eta_grid"] = eta_grid;
  summary["centers"] = centers;
  summary["batch"] = to_json(batch);
  summary["sequential"] = to_json(seq);
  const std::size_t trials = count(config, "", "risk_trials", 0);
  if (trials > 0) {
    const Net net = greedy_cover(family, dist, batch.epsilon_star);
    const auto risk = estimate_batch_risk(net, family, n, trials, seed_of(config), tol);
    summary["risk"] = {{"net_epsilon", net.epsilon},    {"net_size", net.elements.size()},
                       {"trials", risk.trials},         {"mean_h2", risk.mean},
                       {"half_width", risk.half_width}, {"worst_index", risk.worst},
                       {"worst_mean_h2", risk.mean[risk.worst]}};
  }

  const auto dir = out_dir(config);
  write_file(dir / "entropy.csv", csv_text.str());
  write_file(dir / "entropy.json", summary.dump(2) + "\n");
  out << csv_text.str();
}

void run_seq(const json& config, std::ostream& out) {
  auto keys = kCommonKeys;
  keys.insert(keys.end(), {"net", "truth", "length"});
  allow_keys(config, "", keys);

  Net net;
  net.elements = family_field(object_field(config, "net"), "net");
  const auto truth = mixture_field(config, "", "truth");
  for (const auto& e : net.elements) {
    if (e.dim() != truth.dim()) throw InputError("config: 'net' and 'truth' differ in dimension");
  }
  const std::size_t length = count(config, "", "length", 100);
  if (length == 0) throw InputError("config: field 'length' must be at least 1");
  const auto stream = truth.sample(length, seed_of(config));
  const auto trace = sequential_forecaster(net, stream, truth);

  std::ostringstream csv_text;
  CsvWriter csv(csv_text, {"t", "x", "log_true", "log_predictive", "cum_regret", "regret_bound"});
  for (std::size_t t = 0; t < stream.size(); ++t) {
    std::string x;
    for (std::size_t i = 0; i < stream[t].size(); ++i) x += (i ? " " : "") + fmt17(stream[t][i]);
    csv.cell(t + 1)
        .cell(x)
        .cell(trace.log_true[t])
        .cell(trace.log_predictive[t])
        .cell(trace.cum_regret[t])
        .cell(trace.regret_bound[t]);
    csv.end_row();
  }
  json summary;
  summary["net_size"] = net.elements.size();
  summary["length"] = length;
  summary["log_net_size"] = std::log(static_cast<double>(net.elements.size()));
  summary["final_regret"] = trace.final_regret;
  summary["final_regret_bound"] = trace.regret_bound.back();
  summary["max_best_expert_regret"] =
      *std::max_element(trace.best_expert_regret.begin(), trace.best_expert_regret.end());

  const auto dir = out_dir(config);
  write_file(dir / "seq.csv", csv_text.str());
  write_file(dir / "seq.json", summary.dump(2) + "\n");
  out << summary.dump() << "\n";
}

json read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("report: cannot read " + path.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  std::string line;
  json out;
  if (!std::getline(f, line)) throw InputError("report: " + path.string() + " is empty");
  out["header"] = split(line);
  out["rows"] = json::array();
  while (std::getline(f, line)) {
    if (!line.empty()) out["rows"].push_back(split(line));
  }
  return out;
}

void run_report(const json& config, std::ostream& out) {
  auto keys = kCommonKeys;
  keys.insert(keys.end(), {"inputs"});
  allow_keys(config, "", keys);
  if (!config.contains("inputs") || !config.at("inputs").is_array() || config.at("inputs").empty()) {
    throw InputError("config: field 'inputs' must be a non-empty array of paths");
  }
  json merged;
  merged["inputs"] = json::array();
  for (const auto& entry : config.at("inputs")) {
    if (!entry.is_string()) throw InputError("config: field 'inputs' must hold strings");
    const std::filesystem::path path = entry.get<std::string>();
    json item;
    item["path"] = path.string();
    if (path.extension() == ".json") {
      std::ifstream f(path, std::ios::binary);
      if (!f) throw InputError("report: cannot read " + path.string());
      item["type"] = "json";
      item["content"] = json::parse(f);
    } else if (path.extension() == ".csv") {
      item["type"] = "csv";
      item["content"] = read_csv(path);
    } else {
      throw InputError("report: input '" + path.string() + "' must end in .json or .csv");
    }
    merged["inputs"].push_back(std::move(item));
  }
  write_file(out_dir(config) / "report.json", merged.dump(2) + "\n");
  out << "merged " << merged["inputs"].size() << " inputs\n";
}

}  // namespace

void run_command(const std::string& command, const json& config, std::ostream& out) {
  if (!config.is_object()) throw InputError("config: top level must be an object");
  if (config.contains("command") && config.at("command") != command) {
    throw InputError("config: field 'command' does not match the command line");
  }
  set_thread_count(count(config, "", "threads", 0));
  if (command == "div") return run_div(config, out);
  if (command == "sweep") return run_sweep(config, out);
  if (command == "dichotomy") return run_dichotomy(config, out);
  if (command == "entropy") return run_entropy(config, out);
  if (command == "seq") return run_seq(config, out);
  if (command == "report") return run_report(config, out);
  throw InputError("unknown command '" + command + "'");
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Divergences between Gaussian mixtures and checks of their comparison bounds", "gmdiv"};
  app.set_version_flag("--version", "gmdiv 1.0");
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
  std::optional<std::size_t> threads;
  app.add_option("command", command, "div | sweep | dichotomy | entropy | seq | report")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--out", out_path, "output directory");
  app.add_option("--threads", threads, "worker threads (0 = all cores)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "gmdiv: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    json config;
    {
      std::ifstream f(config_path, std::ios::binary);
      if (!f) throw InputError("config: cannot read " + config_path);
      config = json::parse(f);
    }
    if (!config.is_object()) throw InputError("config: top level must be an object");
    if (seed) config["seed"] = *seed;
    if (out_path) config["out"] = *out_path;
    if (threads) config["threads"] = *threads;
    run_command(command, config, out);
    return kOk;
  } catch (const json::exception& e) {
    err << "gmdiv: config: " << e.what() << "\n";
    return kConfigError;
  } catch (const InputError& e) {
    err << "gmdiv: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << "gmdiv: " << e.what() << "\n";
    return kHypothesisViolation;
  } catch (const CapabilityError& e) {
    err << "gmdiv: " << e.what() << "\n";
    return kCapabilityError;
  } catch (const std::exception& e) {
    err << "gmdiv: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gmdiv::cli
