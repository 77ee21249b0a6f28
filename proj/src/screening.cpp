// SPDX-License-Identifier: Apache-2.0

#include "copas/screening.h"

#include <algorithm>
#include <cstdio>
#include <thread>

#include <json.hpp>

#include "copas/csv.h"
#include "copas/error.h"

namespace copas {
namespace {

using Json = nlohmann::ordered_json;

std::optional<double> optional_double(const std::string &cell, const char *what) {
  if (cell.empty()) return std::nullopt;
  return parse_double(cell, what);
}

// Canonical key of a table row; rows that do not parse are reported.
std::string table_key(const std::string &smiles, std::size_t line, const char *table) {
  try {
    return canonicalize(smiles);
  } catch (const Error &e) {
    throw Error(ErrorCode::kUnparseableSmiles, std::string(table) + " line " +
                                                   std::to_string(line) + ": " + e.what());
  }
}

bool by_rank(const Candidate &a, const Candidate &b) {
  if (*a.predicted != *b.predicted) return *a.predicted > *b.predicted;
  return a.id < b.id;
}

std::filesystem::path resolve(const std::filesystem::path &base, const std::string &p) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return std::filesystem::absolute(path).lexically_normal();
}

Json threshold_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

} // namespace

CandidatePool parse_pool(std::string_view csv_text, std::string label) {
  const CsvTable table = parse_csv(csv_text);
  const std::size_t smiles_col = table.require_column("smiles");
  const auto cas_col = table.column("cas");
  CandidatePool pool;
  pool.label = std::move(label);
  pool.input_rows = table.rows.size();
  std::map<std::string, Candidate> merged;
  for (const auto &row : table.rows) {
    Candidate c;
    c.smiles = row[smiles_col];
    try {
      c.graph = parse_smiles(c.smiles);
      c.id = canonical_smiles(*c.graph);
    } catch (const Error &e) {
      c.graph.reset();
      c.id = c.smiles;
      c.parse_error = e.what();
    }
    if (cas_col && !row[*cas_col].empty()) c.cas = row[*cas_col];
    auto [it, inserted] = merged.try_emplace(c.id, c);
    if (inserted) continue;
    ++pool.merged_duplicates;
    Candidate &kept = it->second;
    if (c.smiles < kept.smiles) {
      kept.smiles = c.smiles;
      kept.graph = std::move(c.graph);
    }
    if (c.cas && (!kept.cas || *c.cas < *kept.cas)) kept.cas = c.cas;
  }
  for (auto &[id, c] : merged) pool.records.push_back(std::move(c));
  return pool;
}

CandidatePool load_pool(const std::filesystem::path &path) {
  return parse_pool(read_text_file(path), path.stem().string());
}

std::map<std::string, PropertyRecord> parse_property_table(std::string_view csv_text) {
  const CsvTable table = parse_csv(csv_text);
  const std::size_t smiles_col = table.require_column("smiles");
  const std::size_t dn_col = table.require_column("donor_number");
  const std::size_t dm_col = table.require_column("dipole_moment");
  const auto hba_col = table.column("hba");
  std::map<std::string, PropertyRecord> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    PropertyRecord rec;
    rec.donor_number = optional_double(row[dn_col], "donor_number");
    rec.dipole_moment = optional_double(row[dm_col], "dipole_moment");
    if (hba_col && !row[*hba_col].empty()) {
      const double h = parse_double(row[*hba_col], "hba");
      if (h < 0 || h != std::floor(h)) {
        throw Error(ErrorCode::kFormatError, "hba must be a non-negative integer, got " + row[*hba_col]);
      }
      rec.hba = static_cast<int>(h);
    }
    const std::string key = table_key(row[smiles_col], table.line_numbers[r], "property table");
    if (!out.emplace(key, rec).second) {
      throw Error(ErrorCode::kDuplicateKey, "property table repeats " + key);
    }
  }
  return out;
}

std::map<std::string, PropertyRecord> load_property_table(const std::filesystem::path &path) {
  return parse_property_table(read_text_file(path));
}

std::map<std::string, std::string> parse_cas_table(std::string_view csv_text) {
  const CsvTable table = parse_csv(csv_text);
  const std::size_t smiles_col = table.require_column("smiles");
  const std::size_t cas_col = table.require_column("cas");
  std::map<std::string, std::string> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    if (row[cas_col].empty()) continue;
    const std::string key = table_key(row[smiles_col], table.line_numbers[r], "CAS table");
    auto [it, inserted] = out.emplace(key, row[cas_col]);
    if (!inserted && row[cas_col] < it->second) it->second = row[cas_col];
  }
  return out;
}

std::map<std::string, std::string> load_cas_table(const std::filesystem::path &path) {
  return parse_cas_table(read_text_file(path));
}

std::size_t top_fraction_count(std::size_t n, double fraction) {
  const double x = static_cast<double>(n) * fraction;
  const double r = std::round(x);
  const double k = std::abs(x - r) < 1e-9 ? r : std::ceil(x);
  return std::min(n, static_cast<std::size_t>(std::max(0.0, k)));
}

TierOutcome tier_vocab(std::vector<Candidate> pool, const std::set<Element> &vocabulary,
                       const LatentTable *latents) {
  TierOutcome out;
  for (auto &c : pool) {
    if (!c.graph) {
      out.dropped.push_back({c.id, "unparseable"});
      continue;
    }
    std::string missing;
    if (!vocabulary.empty()) {
      for (const Atom &a : c.graph->atoms()) {
        if (!vocabulary.count(a.element)) {
          missing = std::string(element_info(a.element).symbol);
          break;
        }
      }
    }
    if (!missing.empty()) {
      out.dropped.push_back({c.id, "element_outside_vocabulary:" + missing});
    } else if (latents != nullptr && latents->find(c.id) == nullptr) {
      out.dropped.push_back({c.id, "missing_latent"});
    } else {
      out.survivors.push_back(std::move(c));
    }
  }
  return out;
}

TierOutcome tier_scaffold(std::vector<Candidate> pool, const ScaffoldRegistry &registry) {
  TierOutcome out;
  for (auto &c : pool) {
    const GateResult gate = classify(*c.graph, registry);
    if (!gate.known()) {
      out.dropped.push_back({c.id, "novel_scaffold"});
      continue;
    }
    c.group = gate.group;
    c.group_name = registry.group_name(*gate.group);
    out.survivors.push_back(std::move(c));
  }
  return out;
}

TierOutcome tier_rank(std::vector<Candidate> pool, const Predictor &predictor,
                      const LatentTable *latents, double top_fraction, int threads) {
  if (!(top_fraction > 0.0 && top_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "top_fraction must lie in (0, 1]");
  }
  const std::size_t n = pool.size();
  std::vector<double> predictions(n);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), n / 64 + 1));
  std::vector<std::exception_ptr> failures(workers);
  auto score_chunk = [&](std::size_t w) {
    try {
      const std::size_t lo = n * w / workers;
      const std::size_t hi = n * (w + 1) / workers;
      std::vector<MolecularGraph> graphs;
      graphs.reserve(hi - lo);
      for (std::size_t i = lo; i < hi; ++i) graphs.push_back(*pool[i].graph);
      if (graphs.empty()) return;
      const std::vector<double> p = predictor.predict(predictor.featurize(graphs, latents));
      std::copy(p.begin(), p.end(), predictions.begin() + static_cast<std::ptrdiff_t>(lo));
    } catch (...) {
      failures[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    score_chunk(0);
  } else {
    std::vector<std::thread> pool_threads;
    for (std::size_t w = 0; w < workers; ++w) pool_threads.emplace_back(score_chunk, w);
    for (auto &t : pool_threads) t.join();
  }
  for (const auto &f : failures) {
    if (f) std::rethrow_exception(f);
  }
  for (std::size_t i = 0; i < n; ++i) pool[i].predicted = predictions[i];
  std::sort(pool.begin(), pool.end(), by_rank);
  const std::size_t keep = top_fraction_count(n, top_fraction);
  TierOutcome out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < keep) {
      out.survivors.push_back(std::move(pool[i]));
    } else {
      out.dropped.push_back({pool[i].id, "below_top_fraction"});
    }
  }
  return out;
}

TierOutcome tier_properties(std::vector<Candidate> pool,
                            const std::map<std::string, PropertyRecord> &table,
                            const PropertyThresholds &thresholds) {
  TierOutcome out;
  for (auto &c : pool) {
    auto it = table.find(c.id);
    if (it != table.end()) {
      c.donor_number = it->second.donor_number;
      c.dipole_moment = it->second.dipole_moment;
      c.hba = it->second.hba;
    }
    if (!c.hba) c.hba = static_cast<int>(descriptors(*c.graph)["hba_count"]);
    const char *cause = nullptr;
    if (!c.donor_number || !c.dipole_moment) {
      cause = "missing_property";
    } else if (*c.donor_number < thresholds.dn_min) {
      cause = "donor_number_below_min";
    } else if (*c.dipole_moment < thresholds.dm_min) {
      cause = "dipole_moment_below_min";
    } else if (*c.hba < thresholds.ha_min) {
      cause = "hba_below_min";
    }
    if (cause != nullptr) {
      out.dropped.push_back({c.id, cause});
    } else {
      out.survivors.push_back(std::move(c));
    }
  }
  return out;
}

TierOutcome tier_cas(std::vector<Candidate> pool, const std::map<std::string, std::string> &table) {
  TierOutcome out;
  for (auto &c : pool) {
    auto it = table.find(c.id);
    if (it == table.end()) {
      out.dropped.push_back({c.id, "no_cas"});
      continue;
    }
    c.cas = it->second;
    out.survivors.push_back(std::move(c));
  }
  return out;
}

FunnelConfig FunnelConfig::from_json(const std::string &text, const std::filesystem::path &base_dir) {
  FunnelConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto &[key, value] : j.items()) {
      static const std::set<std::string> known{"vocabulary", "pool", "registry", "model",
                                               "latents", "properties", "cas", "top_fraction",
                                               "thresholds", "require_latent", "format_version"};
      if (!known.count(key)) throw Error(ErrorCode::kInvalidConfig, "unknown funnel key '" + key + "'");
    }
    if (j.contains("vocabulary") && !j.at("vocabulary").is_null()) {
      for (const auto &s : j.at("vocabulary")) {
        const std::string sym = s.get<std::string>();
        auto e = element_from_symbol(sym);
        if (!e) throw Error(ErrorCode::kInvalidConfig, "unknown vocabulary element '" + sym + "'");
        c.vocabulary.insert(*e);
      }
    }
    c.pool = resolve(base_dir, j.at("pool").get<std::string>());
    c.registry = resolve(base_dir, j.at("registry").get<std::string>());
    c.model = resolve(base_dir, j.at("model").get<std::string>());
    auto optional_path = [&](const char *key) -> std::optional<std::filesystem::path> {
      if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
      return resolve(base_dir, j.at(key).get<std::string>());
    };
    c.latents = optional_path("latents");
    c.properties = optional_path("properties");
    c.cas = optional_path("cas");
    c.top_fraction = j.value("top_fraction", 0.01);
    if (j.contains("thresholds")) {
      const auto &t = j.at("thresholds");
      auto bound = [&](const char *key) {
        return t.contains(key) && !t.at(key).is_null() ? t.at(key).get<double>() : -INFINITY;
      };
      c.thresholds.dn_min = bound("dn_min");
      c.thresholds.dm_min = bound("dm_min");
      c.thresholds.ha_min = t.contains("ha_min") && !t.at("ha_min").is_null() ? t.at("ha_min").get<int>() : 0;
    }
    c.require_latent = j.value("require_latent", false);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("funnel config: ") + e.what());
  }
  if (!(c.top_fraction > 0.0 && c.top_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "top_fraction must lie in (0, 1]");
  }
  if (c.require_latent && !c.latents) {
    throw Error(ErrorCode::kInvalidConfig, "require_latent needs a latents path");
  }
  return c;
}

std::string FunnelConfig::to_json() const {
  Json j;
  j["format_version"] = 1;
  Json vocab = Json::array();
  for (Element e : vocabulary) vocab.push_back(std::string(element_info(e).symbol));
  j["vocabulary"] = vocabulary.empty() ? Json(nullptr) : vocab;
  j["pool"] = pool.string();
  j["registry"] = registry.string();
  j["model"] = model.string();
  j["latents"] = latents ? Json(latents->string()) : Json(nullptr);
  j["properties"] = properties ? Json(properties->string()) : Json(nullptr);
  j["cas"] = cas ? Json(cas->string()) : Json(nullptr);
  j["top_fraction"] = top_fraction;
  j["thresholds"] = {{"dn_min", threshold_json(thresholds.dn_min)},
                     {"dm_min", threshold_json(thresholds.dm_min)},
                     {"ha_min", thresholds.ha_min}};
  j["require_latent"] = require_latent;
  return j.dump(1);
}

FunnelInputs load_funnel_inputs(const FunnelConfig &config) {
  FunnelInputs in;
  std::vector<std::string> problems;
  auto attempt = [&](const char *what, auto &&fn) {
    try {
      fn();
    } catch (const std::exception &e) {
      problems.push_back(std::string(what) + ": " + e.what());
    }
  };
  attempt("pool", [&] { in.pool = load_pool(config.pool); });
  attempt("registry", [&] { in.registry = load_registry(config.registry); });
  attempt("model", [&] { in.predictor = predictor_from_json(read_text_file(config.model)); });
  if (config.latents) attempt("latents", [&] { in.latents = load_latents(*config.latents); });
  if (config.properties) attempt("properties", [&] { in.properties = load_property_table(*config.properties); });
  if (config.cas) attempt("cas", [&] { in.cas = load_cas_table(*config.cas); });
  if (problems.empty() && in.predictor.blocks.count(Block::kLatent) && !in.latents) {
    problems.push_back("model uses latent features but no latents path is configured");
  }
  if (!problems.empty()) {
    std::string msg = "funnel inputs failed to load";
    for (const auto &p : problems) msg += "\n  " + p;
    throw Error(ErrorCode::kInvalidConfig, msg);
  }
  return in;
}

ScreeningReport run_funnel(const FunnelInputs &inputs, const FunnelConfig &config, int threads) {
  ScreeningReport report;
  report.pool_label = inputs.pool.label;
  report.input_rows = inputs.pool.input_rows;
  report.merged_duplicates = inputs.pool.merged_duplicates;
  report.pool_size = inputs.pool.records.size();
  report.top_fraction = config.top_fraction;
  report.config_json = config.to_json();

  const LatentTable *latents = inputs.latents ? &*inputs.latents : nullptr;
  std::map<std::string, std::string> pool_cas;
  if (!inputs.cas) {
    for (const auto &c : inputs.pool.records) {
      if (c.cas) pool_cas.emplace(c.id, *c.cas);
    }
  }
  const auto &cas_table = inputs.cas ? *inputs.cas : pool_cas;

  auto record = [&](const char *name, std::size_t input, TierOutcome outcome) {
    TierReport t;
    t.name = name;
    t.input = input;
    for (const auto &c : outcome.survivors) t.survivors.push_back(c.id);
    for (const auto &d : outcome.dropped) {
      ++t.drop_causes[d.cause];
      report.dropped.push_back({d.id, name, d.cause});
    }
    report.tiers.push_back(std::move(t));
    return std::move(outcome.survivors);
  };

  std::vector<Candidate> current = inputs.pool.records;
  std::size_t n = current.size();
  current = record("vocab", n,
                   tier_vocab(std::move(current), config.vocabulary,
                              config.require_latent ? latents : nullptr));
  n = current.size();
  current = record("scaffold", n, tier_scaffold(std::move(current), inputs.registry));
  n = current.size();
  current = record("rank", n, tier_rank(std::move(current), inputs.predictor, latents,
                                        config.top_fraction, threads));
  n = current.size();
  current = record("properties", n,
                   tier_properties(std::move(current), inputs.properties, config.thresholds));
  n = current.size();
  current = record("cas", n, tier_cas(std::move(current), cas_table));
  report.final = std::move(current);
  std::sort(report.dropped.begin(), report.dropped.end(),
            [](const DroppedRecord &a, const DroppedRecord &b) { return a.id < b.id; });
  return report;
}

std::string screening_report_to_json(const ScreeningReport &report) {
  Json j;
  j["format_version"] = 1;
  j["config"] = Json::parse(report.config_json);
  j["pool"] = {{"label", report.pool_label},
               {"input_rows", report.input_rows},
               {"merged_duplicates", report.merged_duplicates},
               {"size", report.pool_size}};
  Json tiers = Json::array();
  for (const auto &t : report.tiers) {
    Json causes = Json::object();
    for (const auto &[cause, count] : t.drop_causes) causes[cause] = count;
    tiers.push_back({{"name", t.name},
                     {"input", t.input},
                     {"kept", t.survivors.size()},
                     {"dropped", causes},
                     {"survivors", t.survivors}});
  }
  j["tiers"] = std::move(tiers);
  Json finals = Json::array();
  int rank = 1;
  for (const auto &c : report.final) {
    Json r;
    r["rank"] = rank++;
    r["id"] = c.id;
    r["smiles"] = c.smiles;
    r["predicted_pce"] = *c.predicted;
    r["group"] = c.group ? Json(*c.group) : Json(nullptr);
    r["group_name"] = c.group_name;
    r["donor_number"] = c.donor_number ? Json(*c.donor_number) : Json(nullptr);
    r["dipole_moment"] = c.dipole_moment ? Json(*c.dipole_moment) : Json(nullptr);
    r["hba"] = c.hba ? Json(*c.hba) : Json(nullptr);
    r["cas"] = c.cas ? Json(*c.cas) : Json(nullptr);
    finals.push_back(std::move(r));
  }
  j["final"] = std::move(finals);
  Json dropped = Json::array();
  for (const auto &d : report.dropped) dropped.push_back({{"id", d.id}, {"tier", d.tier}, {"cause", d.cause}});
  j["dropped"] = std::move(dropped);
  return j.dump(1) + "\n";
}

std::string screening_report_to_text(const ScreeningReport &report, std::size_t top_n) {
  std::string out;
  char line[512];
  std::snprintf(line, sizeof(line), "pool '%s': %zu rows, %zu merged duplicates, %zu candidates\n",
                report.pool_label.c_str(), report.input_rows, report.merged_duplicates,
                report.pool_size);
  out += line;
  for (const auto &t : report.tiers) {
    std::snprintf(line, sizeof(line), "  %-11s %8zu -> %8zu", t.name.c_str(), t.input, t.survivors.size());
    out += line;
    for (const auto &[cause, count] : t.drop_causes) out += "  " + cause + "=" + std::to_string(count);
    out += '\n';
  }
  out += "\nrank  predicted  group  cas           smiles\n";
  std::size_t rank = 0;
  for (const auto &c : report.final) {
    if (rank++ >= top_n) break;
    std::snprintf(line, sizeof(line), "%4zu  %9.4f  %5d  %-12s  %s\n", rank, *c.predicted,
                  c.group.value_or(-1), c.cas.value_or("").c_str(), c.id.c_str());
    out += line;
  }
  return out;
}

} // namespace copas
