// SPDX-License-Identifier: Apache-2.0

#include "copas/dataset.h"

#include <cmath>
#include <map>

#include "copas/csv.h"
#include "copas/error.h"

namespace copas {

std::vector<double> Dataset::targets() const {
  std::vector<double> y;
  y.reserve(records.size());
  for (const auto &r : records) y.push_back(r.pce);
  return y;
}

Dataset parse_dataset(std::string_view csv_text, std::string name, bool skip_bad,
                      std::vector<DatasetIssue> *issues) {
  const CsvTable table = parse_csv(csv_text);
  const std::size_t smiles_col = table.require_column("smiles");
  const std::size_t pce_col = table.require_column("pce");
  const auto doi_col = table.column("doi");

  Dataset ds;
  ds.name = std::move(name);
  std::map<std::string, std::size_t> seen;  // canonical -> first line
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    DatasetRecord rec;
    rec.smiles = row[smiles_col];
    rec.line = line;
    if (doi_col) rec.doi = row[*doi_col];
    try {
      MolecularGraph g = parse_smiles(rec.smiles);
      rec.pce = parse_double(row[pce_col], "pce");
      if (!(rec.pce > 0.0 && rec.pce < 100.0)) {
        throw Error(ErrorCode::kInvalidDataset, "pce " + row[pce_col] + " outside (0, 100)");
      }
      rec.canonical = canonical_smiles(g);
      if (auto it = seen.find(rec.canonical); it != seen.end()) {
        throw Error(ErrorCode::kDuplicateMolecule, rec.canonical + " already appears on line " +
                                                       std::to_string(it->second));
      }
      seen.emplace(rec.canonical, line);
      ds.records.push_back(std::move(rec));
      ds.molecules.push_back(std::move(g));
    } catch (const Error &e) {
      if (!skip_bad) {
        throw Error(e.code(), "line " + std::to_string(line) + " ('" + row[smiles_col] + "'): " + e.what());
      }
      if (issues != nullptr) issues->push_back({line, row[smiles_col], e.what()});
    }
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path &path, bool skip_bad,
                     std::vector<DatasetIssue> *issues) {
  return parse_dataset(read_text_file(path), path.stem().string(), skip_bad, issues);
}

} // namespace copas
