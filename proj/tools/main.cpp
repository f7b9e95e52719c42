// tender: command-line front end for the tender-car sizing library.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "document.hpp"
#include "tender/errors.hpp"
#include "tender/fixtures.hpp"
#include "tender/market_pipeline.hpp"
#include "tender/report_io.hpp"
#include "tender/synthetic.hpp"

namespace fs = std::filesystem;
using namespace tender;
using tender::cli::Document;
using tender::cli::Format;
using tender::cli::Value;

namespace {

constexpr const char* kConfigEnv = "TENDER_CONFIG";

Value num(std::size_t v) { return static_cast<std::int64_t>(v); }
Value num(int v) { return static_cast<std::int64_t>(v); }
Value num(double v) { return v; }
Value str(std::string_view s) { return std::string(s); }

struct Common {
  std::string format;
  std::string output;
  std::string config;
  std::vector<std::string> sets;
  bool verbose = false;
};

struct MarketOpts {
  std::string fixture;
  std::string markets;
  std::string market_id;
  std::string commodity;
  std::string region;
  std::string railroad;
  double distance = 0, t0 = 0, speed = 0, train_length = 0, demand = 0, alpha = 0;
  double gross_tons = 0, holding_cost = 0;
  int locomotives = 1;
  double tender_range = 0, stop_time = 0, stop_cost = 0, loco_rate = 0, tender_rate = 0;
  std::map<std::string, CLI::Option*> opt;

  bool given(const std::string& name) const {
    const auto it = opt.find(name);
    return it != opt.end() && it->second->count() > 0;
  }
};

struct ScenarioOpts {
  std::string capital = "included";
  double delay_factor = 1.0;
  double charger_power = 0, swap_hours = 0, carbon_price = 0;
  CLI::Option* charger_opt = nullptr;
  CLI::Option* swap_opt = nullptr;
  CLI::Option* carbon_opt = nullptr;
};

CapitalCosts parse_capital(const std::string& s) {
  if (s == "included") return CapitalCosts::Included;
  if (s == "excluded") return CapitalCosts::Excluded;
  throw ValidationError("--capital must be included or excluded, not '" + s + "'");
}

ScenarioSpec make_scenario(const ScenarioOpts& o) {
  ScenarioSpec s;
  s.capital = parse_capital(o.capital);
  s.delay_factor = o.delay_factor;
  if (o.charger_opt->count()) s.charger_power = o.charger_power;
  if (o.swap_opt->count()) s.swap_hours = o.swap_hours;
  if (o.carbon_opt->count()) s.carbon_price = o.carbon_price;
  s.validate();
  return s;
}

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string("cannot open ") + what + " " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// defaults < config file (--config or TENDER_CONFIG) < --set key=value
struct EffectiveConfig {
  TechInputs tech;
  std::string source = "defaults";
  std::vector<std::pair<std::string, std::string>> echo;
};

EffectiveConfig load_config(const Common& c) {
  EffectiveConfig cfg;
  std::string path = c.config;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnv); env && *env) path = env;
  }
  if (!path.empty()) {
    std::istringstream in(read_file(path, "config file"));
    cfg.tech = parse_tech_inputs(in, cfg.tech);
    cfg.source = path;
  }
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    std::istringstream in(key + " = " + value + "\n");
    cfg.tech = parse_tech_inputs(in, cfg.tech);
  }
  cfg.tech.validate();
  std::ostringstream dump;
  write_tech_inputs(dump, cfg.tech);
  cfg.echo.emplace_back("config_source", cfg.source);
  std::istringstream lines(dump.str());
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find(" = ");
    const auto hash = line.find("  #");
    cfg.echo.emplace_back(line.substr(0, eq), line.substr(eq + 3, hash - eq - 3));
  }
  return cfg;
}

Format output_format(const Common& c) {
  if (!c.format.empty()) return cli::parse_format(c.format);
  if (!c.output.empty()) return c.output.ends_with(".json") ? Format::Json : Format::Csv;
  return isatty(fileno(stdout)) ? Format::Table : Format::Csv;
}

void emit(const Common& c, const Document& doc) {
  const auto format = output_format(c);
  if (c.output.empty()) {
    cli::render(std::cout, doc, format);
    return;
  }
  std::ofstream out(c.output, std::ios::binary);
  if (!out) throw IoError("cannot write " + c.output);
  cli::render(out, doc, format);
  if (!out) throw IoError("write failed for " + c.output);
}

void add_config_section(Document& doc, const EffectiveConfig& cfg) {
  auto& s = doc.fields("config");
  s.add({str("tool_version"), str(library_version())});
  for (const auto& [k, v] : cfg.echo) s.add({str(k), str(v)});
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--format", c.format, "table, csv or json (default: table on a terminal, csv otherwise)");
  app->add_option("-o,--output", c.output, "Write the report to this file");
  app->add_option("--config", c.config,
                  std::string("Tech parameter file (key = value); env ") + kConfigEnv);
  app->add_option("--set", c.sets, "Override one tech parameter, key=value (repeatable)");
  app->add_flag("-v,--verbose", c.verbose, "Extra diagnostics on stderr");
}

void add_market(CLI::App* app, MarketOpts& m) {
  auto& o = m.opt;
  app->add_option("--fixture", m.fixture, "Linehaul example: intermodal, automotive or coal");
  app->add_option("--markets", m.markets, "Market CSV to pick the market from (with --market-id)");
  app->add_option("--market-id", m.market_id, "Market to use from --markets");
  o["commodity"] = app->add_option("--commodity", m.commodity, "Commodity group");
  o["region"] = app->add_option("--region", m.region, "Western or Eastern");
  o["railroad"] = app->add_option("--railroad", m.railroad, "Railroad code");
  o["distance"] = app->add_option("--distance", m.distance, "Trip distance, miles");
  o["t0"] = app->add_option("--t0", m.t0, "Nominal trip time, hours");
  o["speed"] = app->add_option("--speed", m.speed, "Average speed, mph (t0 = D/speed + initial stop)");
  o["train-length"] = app->add_option("--train-length", m.train_length, "Train length, cars");
  o["demand"] = app->add_option("--demand", m.demand, "Annual demand, cars");
  o["alpha"] = app->add_option("--alpha", m.alpha, "Tender to loaded car weight ratio");
  o["locomotives"] = app->add_option("--locomotives", m.locomotives, "Locomotives per train");
  o["gross-tons"] = app->add_option("--gross-tons", m.gross_tons, "Gross tons per locomotive");
  o["holding-cost"] = app->add_option("--holding-cost", m.holding_cost,
                                      "Delay cost per car-hour (default: lookup by train type)");
  o["tender-range"] = app->add_option("--tender-range", m.tender_range,
                                      "Miles one tender gives one locomotive (replaces derived)");
  o["stop-time"] = app->add_option("--stop-time", m.stop_time, "Hours per stop (replaces derived)");
  o["stop-cost"] = app->add_option("--stop-cost", m.stop_cost,
                                   "Energy cost per tender per stop, USD (replaces derived)");
  o["loco-rate"] = app->add_option("--loco-rate", m.loco_rate,
                                   "Locomotive USD/hour (replaces derived)");
  o["tender-rate"] = app->add_option("--tender-rate", m.tender_rate,
                                     "Tender USD/hour (replaces derived)");
}

void add_scenario(CLI::App* app, ScenarioOpts& s) {
  app->add_option("--capital", s.capital, "Equipment capital costs: included or excluded");
  app->add_option("--delay-factor", s.delay_factor, "Multiplier on delay cost per car-hour");
  s.charger_opt = app->add_option("--charger-power", s.charger_power, "Charger power, MW");
  s.swap_opt = app->add_option("--swap-hours", s.swap_hours, "Battery swap instead of charging, hours per stop");
  s.carbon_opt = app->add_option("--carbon-price", s.carbon_price, "USD per ton CO2-eq");
}

MarketRecord resolve_record(const MarketOpts& m) {
  MarketRecord r;
  bool base = false;
  if (!m.fixture.empty()) {
    r = linehaul_fixture(m.fixture);
    base = true;
  } else if (!m.markets.empty()) {
    if (m.market_id.empty()) throw ValidationError("missing required option --market-id");
    const auto ingest = ingest_markets(m.markets);
    bool found = false;
    for (const auto& rec : ingest.records) {
      if (rec.market_id == m.market_id) {
        r = rec;
        found = true;
        break;
      }
    }
    if (!found) throw ValidationError("market '" + m.market_id + "' not found in " + m.markets);
    base = true;
  } else {
    r.market_id = "cli";
  }
  auto need = [&](const char* name) {
    if (!base && !m.given(name)) throw ValidationError(std::string("missing required option --") + name);
  };
  need("distance");
  need("train-length");
  need("demand");
  need("alpha");
  need("commodity");
  if (m.given("commodity")) r.commodity = parse_commodity(m.commodity);
  if (m.given("region")) r.region = parse_region(m.region);
  if (m.given("railroad")) r.railroad = m.railroad;
  if (m.given("distance")) r.distance = m.distance;
  if (m.given("train-length")) r.train_length = m.train_length;
  if (m.given("demand")) r.annual_demand = m.demand;
  if (m.given("alpha")) r.alpha = m.alpha;
  if (m.given("locomotives")) r.locomotives = m.locomotives;
  if (m.given("gross-tons")) r.gross_tons = m.gross_tons;
  if (m.given("holding-cost")) r.h_override = m.holding_cost;
  if (m.given("t0") && m.given("speed")) {
    throw ValidationError("--t0 and --speed are exclusive; give one");
  }
  if (m.given("t0")) {
    r.t0 = m.t0;
    r.speed.reset();
  } else if (m.given("speed")) {
    r.speed = m.speed;
    r.t0.reset();
  } else if (!base) {
    throw ValidationError("missing required option --t0 or --speed");
  }
  r.validate();
  return r;
}

MarketParameters resolve_parameters(const MarketOpts& m, const MarketRecord& record,
                                    const TechInputs& tech, const CommodityEnergyTable& table,
                                    const ScenarioSpec& scenario) {
  auto p = derive_market(record, tech, table, scenario);
  auto& g = p.model;
  if (m.given("tender-range")) {
    p.range_per_locomotive_tender = m.tender_range;
    g.base.tender_range = m.tender_range / g.locomotives;
  }
  if (m.given("stop-time")) g.base.stop_time = m.stop_time;
  if (m.given("stop-cost")) g.stop_energy_cost = m.stop_cost;
  if (m.given("loco-rate")) g.loco_rate = m.loco_rate;
  if (m.given("tender-rate")) g.tender_rate = m.tender_rate;
  g.validate();
  return p;
}

void add_parameters_section(Document& doc, const MarketParameters& p, const MarketRecord& r) {
  const auto& g = p.model;
  auto& s = doc.fields("parameters");
  s.add({str("market_id"), str(r.market_id)});
  s.add({str("commodity_group"), str(to_string(r.commodity))});
  s.add({str("region"), str(to_string(r.region))});
  s.add({str("train_type"), str(to_string(p.train_type))});
  s.add({str("distance_mi"), num(g.base.distance)});
  s.add({str("nominal_time_h"), num(g.base.nominal_time)});
  s.add({str("train_length_cars"), num(g.base.train_length)});
  s.add({str("demand_cars"), num(g.base.demand)});
  s.add({str("locomotives"), num(g.locomotives)});
  s.add({str("alpha"), num(g.base.alpha)});
  s.add({str("gross_tons_per_locomotive"), num(p.gross_tons)});
  s.add({str("range_per_locomotive_tender_mi"), num(p.range_per_locomotive_tender)});
  s.add({str("range_per_tender_car_mi"), num(g.base.tender_range)});
  s.add({str("holding_cost"), num(g.base.holding_cost)});
  s.add({str("stop_time_h"), num(g.base.stop_time)});
  s.add({str("stop_energy_cost"), num(g.stop_energy_cost)});
  s.add({str("loco_rate"), num(g.loco_rate)});
  s.add({str("tender_rate"), num(g.tender_rate)});
}

// ---- optimize ----------------------------------------------------------

struct OptimizeCmd {
  Common common;
  MarketOpts market;
  ScenarioOpts scenario;
};

int run_optimize(const OptimizeCmd& cmd) {
  const auto cfg = load_config(cmd.common);
  const auto table = CommodityEnergyTable::bundled();
  const auto record = resolve_record(cmd.market);
  const auto scenario = make_scenario(cmd.scenario);
  const auto params = resolve_parameters(cmd.market, record, cfg.tech, table, scenario);
  const auto r = optimize_parameters(params);
  const auto eval = total_cost_general(params.model, r.tenders);

  Document doc;
  add_parameters_section(doc, params, record);
  auto& o = doc.fields("optimum");
  o.add({str("n_continuous"), num(r.n_continuous)});
  o.add({str("n_continuous_per_locomotive"), num(r.n_continuous_per_locomotive)});
  o.add({str("bound"), str(to_string(r.bound))});
  o.add({str("closed_form"), r.closed_form});
  o.add({str("n_integer_per_train"), num(r.tenders_free)});
  o.add({str("n_integer"), num(r.tenders)});
  o.add({str("m_star"), num(r.batteries_per_locomotive)});
  o.add({str("range_mi"), num(r.range)});
  o.add({str("stops_continuous"), num(r.stops_continuous)});
  o.add({str("stops_practical"), num(r.stops_practical)});
  o.add({str("stops_per_1000mi"), num(r.stops_per_1000mi)});
  o.add({str("trip_time_h"), num(r.trip_time)});
  o.add({str("total_cost"), num(r.total_cost)});
  auto& c = doc.section("costs", {"component", "value", "share_pct"});
  const double shares[] = {r.shares.locomotive, r.shares.battery, r.shares.charging,
                           r.shares.delay};
  for (std::size_t i = 0; i < eval.components.size(); ++i) {
    const auto& comp = eval.components[i];
    c.add({str(comp.name), num(comp.value), i < 4 ? num(shares[i]) : str("")});
  }
  c.add({str("total"), num(eval.total_cost), str("")});
  add_config_section(doc, cfg);
  emit(cmd.common, doc);
  return 0;
}

// ---- curve ---------------------------------------------------------------

struct CurveCmd {
  Common common;
  MarketOpts market;
  ScenarioOpts scenario;
  int from = 1;
  int to = 10;
  bool per_train = false;
  CLI::Option* to_opt = nullptr;
};

int run_curve(const CurveCmd& cmd) {
  const auto cfg = load_config(cmd.common);
  const auto table = CommodityEnergyTable::bundled();
  const auto record = resolve_record(cmd.market);
  const auto scenario = make_scenario(cmd.scenario);
  const auto params = resolve_parameters(cmd.market, record, cfg.tech, table, scenario);
  const auto& g = params.model;
  const int multiple = cmd.per_train ? 1 : g.locomotives;
  const int max_units = max_feasible_multiple(g.base.train_length, g.base.alpha, multiple);
  const int to = cmd.to_opt->count() ? cmd.to : std::min(10, max_units);
  if (cmd.from < 1 || to < cmd.from) {
    throw ValidationError("need 1 <= --from <= --to, got " + std::to_string(cmd.from) + ".." +
                          std::to_string(to));
  }
  if (to > max_units) {
    throw ValidationError("--to " + std::to_string(to) + " exceeds the feasible maximum " +
                          std::to_string(max_units));
  }

  Document doc;
  add_parameters_section(doc, params, record);
  auto& s = doc.section("curve", {"n", "per_locomotive", "payload", "range_mi", "stops_continuous",
                                  "stops_practical", "trip_time_h", "locomotive", "tender",
                                  "charging", "delay", "constant", "total"});
  for (int u = cmd.from; u <= to; ++u) {
    const int n = u * multiple;
    const auto e = total_cost_general(g, n);
    std::vector<Value> row = {num(n), num(static_cast<double>(n) / g.locomotives), num(e.payload),
                              num(e.range), num(e.stops_continuous), num(e.stops_practical),
                              num(e.trip_time)};
    for (const auto& comp : e.components) row.push_back(num(comp.value));
    row.push_back(num(e.total_cost));
    s.add(std::move(row));
  }
  add_config_section(doc, cfg);
  emit(cmd.common, doc);
  return 0;
}

// ---- batch / sweep -------------------------------------------------------

struct BatchInput {
  std::string markets;
  bool synthetic = false;
  std::size_t count = 22501;
  std::uint64_t seed = SyntheticOptions{}.seed;
  std::string out_dir = ".";
  std::string results_name = "results.csv";
  std::string aggregates_name = "aggregates.json";
  unsigned threads = 0;
  double audit = -1.0;
};

void add_batch_input(CLI::App* app, BatchInput& b) {
  app->add_option("--markets", b.markets, "Market CSV file");
  app->add_flag("--synthetic", b.synthetic, "Use the seeded synthetic market set instead");
  app->add_option("--count", b.count, "Synthetic market count");
  app->add_option("--seed", b.seed, "Synthetic generator seed");
  app->add_option("--out-dir", b.out_dir, "Directory for the results and aggregates files");
  app->add_option("--results", b.results_name, "Results CSV file name");
  app->add_option("--aggregates", b.aggregates_name, "Aggregates JSON file name");
  app->add_option("--threads", b.threads, "Worker threads (0 = all cores)");
  app->add_option("--audit", b.audit, "Fraction of results re-checked by exhaustive scan");
}

struct LoadedMarkets {
  std::vector<MarketRecord> records;
  std::vector<RowError> rejected;
  std::string checksum;
  std::string source;
};

LoadedMarkets load_markets(const BatchInput& b) {
  LoadedMarkets out;
  std::string bytes;
  if (b.synthetic == !b.markets.empty()) {
    throw ValidationError("give exactly one of --markets FILE or --synthetic");
  }
  if (b.synthetic) {
    out.records = generate_markets({b.count, b.seed});
    std::ostringstream ss;
    write_markets(ss, out.records);
    bytes = ss.str();
    out.source = fmt::format("synthetic(count={}, seed={})", b.count, b.seed);
  } else {
    bytes = read_file(b.markets, "market file");
    std::istringstream in(bytes);
    auto ingest = parse_markets(in);
    out.records = std::move(ingest.records);
    out.rejected = std::move(ingest.rejected);
    out.source = b.markets;
  }
  out.checksum = checksum(bytes);
  return out;
}

int run_pipeline(const Common& common, const BatchInput& input,
                 const std::vector<ScenarioSpec>& scenarios, bool scenario_table) {
  const auto started = std::chrono::steady_clock::now();
  const auto cfg = load_config(common);
  const auto table = CommodityEnergyTable::bundled();
  const auto markets = load_markets(input);

  SweepOptions options;
  options.threads = input.threads;
  if (input.audit >= 0.0) options.audit_fraction = input.audit;
  const auto out = sweep(markets.records, cfg.tech, table, scenarios, options);
  const auto stats = aggregate(out.results, scenarios);

  RunMetadata meta;
  for (const auto& s : scenarios) meta.scenarios.push_back(s.describe());
  meta.input_checksum = markets.checksum;
  meta.config = cfg.echo;
  meta.config.emplace_back("input", markets.source);

  std::error_code ec;
  fs::create_directories(input.out_dir, ec);
  if (ec) throw IoError("cannot create " + input.out_dir + ": " + ec.message());
  const auto results_path = (fs::path(input.out_dir) / input.results_name).string();
  const auto aggregates_path = (fs::path(input.out_dir) / input.aggregates_name).string();
  {
    std::ofstream f(results_path, std::ios::binary);
    if (!f) throw IoError("cannot write " + results_path);
    write_results_csv(f, out.results, meta);
    if (!f) throw IoError("write failed for " + results_path);
  }
  {
    std::ofstream f(aggregates_path, std::ios::binary);
    if (!f) throw IoError("cannot write " + aggregates_path);
    write_aggregates_json(f, stats, out.results, meta);
    if (!f) throw IoError("write failed for " + aggregates_path);
  }

  Document doc;
  auto& s = doc.fields("summary");
  s.add({str("input"), str(markets.source)});
  s.add({str("input_checksum"), str(markets.checksum)});
  s.add({str("markets"), num(markets.records.size())});
  s.add({str("rejected_rows"), num(markets.rejected.size())});
  s.add({str("scenarios"), num(scenarios.size())});
  s.add({str("results"), num(out.summary.results)});
  s.add({str("ok"), num(out.summary.ok)});
  s.add({str("infeasible"), num(out.summary.infeasible)});
  s.add({str("invalid"), num(out.summary.invalid)});
  s.add({str("audited"), num(out.summary.audited)});
  s.add({str("audit_mismatches"), num(out.summary.audit_mismatches.size())});
  s.add({str("results_path"), str(results_path)});
  s.add({str("aggregates_path"), str(aggregates_path)});

  if (scenario_table) {
    std::vector<std::string> cols = {"scenario", "ok", "excluded"};
    for (const auto c : all_commodities()) cols.emplace_back(to_string(c));
    auto& t = doc.section("median_batteries_per_locomotive", cols);
    for (const auto& sc : stats.scenarios) {
      std::vector<Value> row = {str(sc.scenario), num(sc.markets - sc.excluded), num(sc.excluded)};
      for (const auto c : all_commodities()) {
        Value v = str("");
        for (const auto& g : sc.groups) {
          if (g.commodity == c) v = num(g.metrics.front().stats.median);
        }
        row.push_back(v);
      }
      t.add(std::move(row));
    }
  } else {
    auto& t = doc.section("aggregates", {"scenario", "commodity_group", "markets",
                                         "median_batteries_per_locomotive", "median_range_mi",
                                         "median_stops_per_1000mi"});
    for (const auto& sc : stats.scenarios) {
      for (const auto& g : sc.groups) {
        t.add({str(sc.scenario), str(to_string(g.commodity)), num(g.metrics[0].stats.count),
               num(g.metrics[0].stats.median), num(g.metrics[1].stats.median),
               num(g.metrics[2].stats.median)});
      }
    }
  }
  if (!markets.rejected.empty()) {
    auto& t = doc.section("rejected", {"row", "column", "message"});
    for (const auto& e : markets.rejected) t.add({num(e.row), str(e.column), str(e.message)});
  }
  if (out.summary.ok != out.summary.results) {
    auto& t = doc.section("flagged", {"market_id", "scenario", "status", "note"});
    for (const auto& r : out.results) {
      if (r.status == ResultStatus::Ok) continue;
      t.add({str(r.market_id), str(r.scenario), str(to_string(r.status)), str(r.note)});
    }
  }
  emit(common, doc);
  if (common.verbose) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    fmt::print(stderr, "processed {} results in {:.3f} s\n", out.summary.results, secs);
  }
  if (!out.summary.audit_mismatches.empty()) {
    throw ConsistencyError(fmt::format("{} results disagree with the exhaustive integer scan",
                                       out.summary.audit_mismatches.size()));
  }
  return 0;
}

struct BatchCmd {
  Common common;
  BatchInput input;
  ScenarioOpts scenario;
  std::string label = "default";
};

int run_batch(const BatchCmd& cmd) {
  auto s = make_scenario(cmd.scenario);
  s.label = cmd.label;
  s.validate();
  return run_pipeline(cmd.common, cmd.input, {s}, false);
}

struct SweepCmd {
  Common common;
  BatchInput input;
  std::vector<std::string> capital = {"included"};
  std::vector<double> delay_factors = {1.0};
  std::vector<double> charger_powers;
  std::vector<double> swap_hours;
  std::vector<double> carbon_prices;
};

int run_sweep(const SweepCmd& cmd) {
  struct Charging {
    std::string tag;
    std::optional<double> power, swap;
  };
  std::vector<Charging> charging;
  for (const double p : cmd.charger_powers) charging.push_back({fmt::format("{}MW", p), p, {}});
  for (const double h : cmd.swap_hours) charging.push_back({fmt::format("swap{}h", h), {}, h});
  if (charging.empty()) charging.push_back({"tech", {}, {}});
  std::vector<std::optional<double>> carbon;
  for (const double c : cmd.carbon_prices) carbon.emplace_back(c);
  if (carbon.empty()) carbon.emplace_back();

  std::vector<ScenarioSpec> grid;
  for (const auto& cap : cmd.capital) {
    for (const double d : cmd.delay_factors) {
      for (const auto& ch : charging) {
        for (const auto& co : carbon) {
          ScenarioSpec s;
          s.capital = parse_capital(cap);
          s.delay_factor = d;
          s.charger_power = ch.power;
          s.swap_hours = ch.swap;
          s.carbon_price = co;
          s.label = fmt::format("capital-{}/delay-{}/{}", cap, d, ch.tag);
          if (co) s.label += fmt::format("/carbon-{}", *co);
          grid.push_back(std::move(s));
        }
      }
    }
  }
  return run_pipeline(cmd.common, cmd.input, grid, true);
}

// ---- compare-diesel -----------------------------------------------------

struct CompareCmd {
  Common common;
  MarketOpts market;
  ScenarioOpts scenario;
};

int run_compare(const CompareCmd& cmd) {
  const auto cfg = load_config(cmd.common);
  const auto table = CommodityEnergyTable::bundled();
  const auto record = resolve_record(cmd.market);
  const auto scenario = make_scenario(cmd.scenario);
  const auto params = resolve_parameters(cmd.market, record, cfg.tech, table, scenario);
  auto battery = optimize_parameters(params);
  battery.market_id = record.market_id;
  TechInputs diesel_tech = cfg.tech;
  if (scenario.carbon_price) diesel_tech.carbon_price = *scenario.carbon_price;
  const auto c = compare_diesel(record, battery, diesel_tech, table);
  const auto eval = total_cost_general(params.model, battery.tenders);

  Document doc;
  add_parameters_section(doc, params, record);
  auto& b = doc.section("battery_components", {"component", "value"});
  b.add({str("batteries_per_locomotive"), num(battery.batteries_per_locomotive)});
  b.add({str("trip_time_h"), num(battery.trip_time)});
  for (const auto& comp : eval.components) b.add({str(comp.name), num(comp.value)});
  auto& d = doc.section("diesel_components", {"component", "value"});
  d.add({str("trips"), num(c.diesel.trips)});
  d.add({str("trip_time_h"), num(c.diesel.trip_time)});
  d.add({str("gallons"), num(c.diesel.gallons)});
  d.add({str("locomotive"), num(c.diesel.locomotive_cost)});
  d.add({str("fuel"), num(c.diesel.fuel_cost)});
  auto& t = doc.section("comparison", {"item", "battery_electric", "diesel"});
  t.add({str("financial"), num(c.battery_financial), num(c.diesel_financial)});
  t.add({str("delay"), num(c.battery_delay), num(c.diesel_delay)});
  t.add({str("total"), num(c.battery_total), num(c.diesel_total)});
  auto& v = doc.fields("verdict");
  v.add({str("battery_cheaper_financial"), c.battery_cheaper_financial});
  v.add({str("battery_cheaper_total"), c.battery_cheaper_total});
  add_config_section(doc, cfg);
  emit(cmd.common, doc);
  return 0;
}

// ---- derive ------------------------------------------------------------

struct DeriveCmd {
  Common common;
  std::string commodity;
  std::string region;
  double gross_tons = 0;
  CLI::Option* gross_opt = nullptr;
  std::string write_config;
  std::string write_tables;
};

std::string g(double v) { return fmt::format("{:.6g}", v); }

int run_derive(const DeriveCmd& cmd) {
  const auto cfg = load_config(cmd.common);
  const auto& t = cfg.tech;
  const auto table = CommodityEnergyTable::bundled();

  Document doc;
  auto& s = doc.section("derived", {"parameter", "value", "unit", "formula"});
  const double cap = effective_capacity(t);
  s.add({str("effective_capacity"), num(cap), str("MWh"),
         str(fmt::format("{} x {} x {} = {}", g(t.battery_capacity), g(t.charging_depth),
                         g(t.battery_efficiency), g(cap)))});
  const double ts = stop_time(t, tender::Charging{});
  s.add({str("stop_time_charging"), num(ts), str("h"),
         str(fmt::format("{} x {} / {} = {}", g(t.battery_capacity), g(t.charging_depth),
                         g(t.charger_power), g(ts)))});
  const double swap = stop_time(t, Swapping{t.swap_stop_time});
  s.add({str("stop_time_swap"), num(swap), str("h"), str("fixed")});
  const double kwh = charge_energy_per_stop(t);
  const double f = charge_cost_per_stop(t);
  s.add({str("stop_energy_cost"), num(f), str("USD per tender per stop"),
         str(fmt::format("{} kWh x {} + {} kWh x {} kg/kWh x {} USD/t / 1000 = {}", g(kwh),
                         g(t.electricity_price), g(kwh), g(t.grid_intensity), g(t.carbon_price),
                         g(f)))});
  const double cl = locomotive_hourly_cost(t);
  s.add({str("loco_rate"), num(cl), str("USD/h"),
         str(fmt::format("{} / ({} x {}) = {}", g(t.loco_annual_total), g(t.loco_utilization),
                         g(kHoursPerYear), g(cl)))});
  const auto e = battery_equipment(t);
  const auto be = equipment_cost_breakdown(e);
  s.add({str("battery_npv"), num(be.npv), str("USD"),
         str(fmt::format("{} + {} replacement(s) of {} discounted at {} continuous + {} USD/yr "
                         "maintenance over {} yr = {}",
                         g(e.capital), be.replacements, g(e.future_capital), g(e.rate),
                         g(e.annual_maintenance), g(e.horizon), g(be.npv)))});
  s.add({str("battery_annual"), num(be.annual), str("USD/yr"),
         str(fmt::format("{} x {} / (1 - exp(-{} x {})) = {}", g(be.npv), g(e.rate), g(e.rate),
                         g(e.horizon), g(be.annual)))});
  s.add({str("tender_rate"), num(be.hourly), str("USD/h"),
         str(fmt::format("{} / ({} x {}) = {}", g(be.annual), g(e.utilization),
                         g(kHoursPerYear), g(be.hourly)))});

  std::vector<Commodity> commodities;
  if (!cmd.commodity.empty()) {
    commodities.push_back(parse_commodity(cmd.commodity));
  } else {
    commodities.assign(all_commodities().begin(), all_commodities().end());
  }
  std::vector<Region> regions = {Region::Western, Region::Eastern};
  if (!cmd.region.empty()) regions = {parse_region(cmd.region)};

  auto& r = doc.section("range_per_tender", {"commodity_group", "region", "gross_tons",
                                             "btu_per_ton_mile", "kwh_per_ton_mile", "range_mi"});
  for (const auto c : commodities) {
    for (const auto reg : regions) {
      const double gross = cmd.gross_opt->count() ? cmd.gross_tons : default_gross_tons(c);
      r.add({str(to_string(c)), str(to_string(reg)), num(gross),
             num(table.energy_requirement(c, reg)), num(energy_per_ton_mile(t, table, c, reg)),
             num(range_per_tender(t, table, c, reg, gross))});
    }
  }

  auto& d = doc.section("delay_cost", {"train_type", "band", "usd_per_car_hour"});
  const std::pair<const char*, double> bands[] = {{"0-1000", 500}, {"1000-1500", 1250},
                                                  {">1500", 2000}};
  for (const auto type : {TrainType::Unit, TrainType::Manifest, TrainType::Intermodal}) {
    for (const auto& [band, miles] : bands) {
      d.add({str(to_string(type)), str(band), num(delay_cost_lookup(type, miles))});
    }
  }
  add_config_section(doc, cfg);

  if (!cmd.write_config.empty()) {
    std::ofstream f(cmd.write_config, std::ios::binary);
    if (!f) throw IoError("cannot write " + cmd.write_config);
    write_tech_inputs(f, t);
  }
  if (!cmd.write_tables.empty()) {
    std::error_code ec;
    fs::create_directories(cmd.write_tables, ec);
    if (ec) throw IoError("cannot create " + cmd.write_tables + ": " + ec.message());
    std::ofstream energy(fs::path(cmd.write_tables) / "energy_requirements.csv", std::ios::binary);
    std::ofstream speed(fs::path(cmd.write_tables) / "train_speeds.csv", std::ios::binary);
    std::ofstream schema(fs::path(cmd.write_tables) / "results_schema.json", std::ios::binary);
    if (!energy || !speed || !schema) throw IoError("cannot write tables to " + cmd.write_tables);
    table.write_energy_csv(energy);
    table.write_speed_csv(speed);
    schema << results_schema();
  }
  emit(cmd.common, doc);
  return 0;
}

// ---- generate ----------------------------------------------------------

struct GenerateCmd {
  std::size_t count = 22501;
  std::uint64_t seed = SyntheticOptions{}.seed;
  std::string output;
};

int run_generate(const GenerateCmd& cmd) {
  const auto records = generate_markets({cmd.count, cmd.seed});
  if (cmd.output.empty()) {
    write_markets(std::cout, records);
    return 0;
  }
  std::ofstream f(cmd.output, std::ios::binary);
  if (!f) throw IoError("cannot write " + cmd.output);
  write_markets(f, records);
  if (!f) throw IoError("write failed for " + cmd.output);
  return 0;
}

int fail(const char* kind, const std::string& message, int code) {
  std::string one_line = message;
  for (auto& c : one_line) {
    if (c == '\n') c = ' ';
  }
  std::cerr << "error[" << kind << "]: " << one_line << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Battery tender car sizing for freight rail: optimum, cost curves, batch studies"};
  app.set_version_flag("--version", std::string(library_version()));
  app.require_subcommand(1, 1);

  OptimizeCmd optimize;
  auto* opt = app.add_subcommand("optimize", "Optimal tender count for one market");
  add_common(opt, optimize.common);
  add_market(opt, optimize.market);
  add_scenario(opt, optimize.scenario);

  CurveCmd curve;
  auto* cur = app.add_subcommand("curve", "Cost components for a range of tender counts");
  add_common(cur, curve.common);
  add_market(cur, curve.market);
  add_scenario(cur, curve.scenario);
  cur->add_option("--from", curve.from, "First tender count (per locomotive unless --per-train)");
  curve.to_opt = cur->add_option("--to", curve.to, "Last tender count (default: 10 or the feasible max)");
  cur->add_flag("--per-train", curve.per_train, "Step one tender per train instead of per locomotive");

  BatchCmd batch;
  auto* bat = app.add_subcommand("batch", "Optimize every market under one scenario");
  add_common(bat, batch.common);
  add_batch_input(bat, batch.input);
  add_scenario(bat, batch.scenario);
  bat->add_option("--label", batch.label, "Scenario label");

  SweepCmd sweep_cmd;
  auto* swp = app.add_subcommand("sweep", "Optimize every market under a grid of scenarios");
  add_common(swp, sweep_cmd.common);
  add_batch_input(swp, sweep_cmd.input);
  swp->add_option("--capital", sweep_cmd.capital, "Capital modes: included, excluded")->delimiter(',');
  swp->add_option("--delay-factors", sweep_cmd.delay_factors, "Delay cost multipliers")->delimiter(',');
  swp->add_option("--charger-powers", sweep_cmd.charger_powers, "Charger powers, MW")->delimiter(',');
  swp->add_option("--swap-hours", sweep_cmd.swap_hours, "Swap stop times, hours")->delimiter(',');
  swp->add_option("--carbon-prices", sweep_cmd.carbon_prices, "Carbon prices, USD/t")->delimiter(',');

  CompareCmd compare;
  auto* cmp = app.add_subcommand("compare-diesel", "Battery-electric optimum against diesel");
  add_common(cmp, compare.common);
  add_market(cmp, compare.market);
  add_scenario(cmp, compare.scenario);

  DeriveCmd derive;
  auto* der = app.add_subcommand("derive", "Show derived model parameters and their inputs");
  add_common(der, derive.common);
  der->add_option("--commodity", derive.commodity, "Limit the range table to one commodity group");
  der->add_option("--region", derive.region, "Limit the range table to one region");
  derive.gross_opt = der->add_option("--gross-tons", derive.gross_tons, "Gross tons per locomotive");
  der->add_option("--write-config", derive.write_config, "Write the effective tech parameters");
  der->add_option("--write-tables", derive.write_tables, "Write bundled tables to this directory");

  GenerateCmd generate;
  auto* gen = app.add_subcommand("generate", "Write the seeded synthetic market set as CSV");
  gen->add_option("--count", generate.count, "Number of markets");
  gen->add_option("--seed", generate.seed, "Generator seed");
  gen->add_option("-o,--output", generate.output, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("validation", e.what(), 2);
  }

  try {
    if (opt->parsed()) return run_optimize(optimize);
    if (cur->parsed()) return run_curve(curve);
    if (bat->parsed()) return run_batch(batch);
    if (swp->parsed()) return run_sweep(sweep_cmd);
    if (cmp->parsed()) return run_compare(compare);
    if (der->parsed()) return run_derive(derive);
    if (gen->parsed()) return run_generate(generate);
  } catch (const IoError& e) {
    return fail("io", e.what(), 3);
  } catch (const ValidationError& e) {
    return fail("validation", e.what(), 2);
  } catch (const DomainError& e) {
    return fail("validation", e.what(), 2);
  } catch (const InfeasibleError& e) {
    return fail("validation", e.what(), 2);
  } catch (const Error& e) {
    return fail("internal", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}
