// SPDX-License-Identifier: Apache-2.0
//
// Labelled additive datasets: CSV with columns smiles, pce and optional doi.

#ifndef COPAS_DATASET_H_
#define COPAS_DATASET_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "copas/molgraph.h"

namespace copas {

struct DatasetRecord {
  std::string smiles;
  std::string canonical;
  double pce = 0.0;  // percent, in (0, 100)
  std::string doi;
  std::size_t line = 0;
};

struct DatasetIssue {
  std::size_t line = 0;
  std::string smiles;
  std::string message;
};

struct Dataset {
  std::string name;
  std::vector<DatasetRecord> records;
  std::vector<MolecularGraph> molecules;  // parallel to records

  std::size_t size() const { return records.size(); }
  std::vector<double> targets() const;
};

// Rejects unparseable SMILES, pce outside (0, 100) and canonical duplicates.
// With `skip_bad` those rows are dropped and listed in `issues` instead; the
// first error is thrown otherwise.
Dataset parse_dataset(std::string_view csv_text, std::string name, bool skip_bad = false,
                      std::vector<DatasetIssue> *issues = nullptr);
Dataset load_dataset(const std::filesystem::path &path, bool skip_bad = false,
                     std::vector<DatasetIssue> *issues = nullptr);

} // namespace copas

#endif // COPAS_DATASET_H_
