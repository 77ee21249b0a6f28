// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <set>

#include "copas/csv.h"
#include "copas/error.h"
#include "copas/features.h"

namespace copas {
namespace {

struct RawCsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;
};

// Keeps the true field count of every row so width errors can be reported.
RawCsv read_raw(std::string_view text) {
  RawCsv raw;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header) {
      raw.header = split_csv_line(line);
      header = true;
    } else {
      raw.rows.push_back(split_csv_line(line));
      raw.lines.push_back(line_no);
    }
  }
  return raw;
}

std::string canonical_or_throw(const std::string &smiles, std::size_t line) {
  try {
    return canonicalize(smiles);
  } catch (const Error &e) {
    throw Error(ErrorCode::kUnparseableSmiles,
                "row at line " + std::to_string(line) + ": " + e.what());
  }
}

} // namespace

const std::vector<double> *LatentTable::find(const std::string &canonical) const {
  auto it = vectors.find(canonical);
  return it == vectors.end() ? nullptr : &it->second;
}

LatentTable parse_latents(std::string_view csv_text) {
  const RawCsv raw = read_raw(csv_text);
  LatentTable table;
  if (raw.header.empty()) return table;
  if (raw.header.front() != "smiles") {
    throw Error(ErrorCode::kFormatError, "latent file must start with a 'smiles' column");
  }
  table.dimension = raw.header.size() - 1;
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    const auto &row = raw.rows[r];
    const std::size_t line = raw.lines[r];
    if (row.size() != raw.header.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "row at line " + std::to_string(line) + " has " +
                      std::to_string(row.size() - 1) + " values, header declares " +
                      std::to_string(table.dimension));
    }
    std::vector<double> z(table.dimension);
    for (std::size_t k = 0; k < table.dimension; ++k) {
      if (row[k + 1].empty()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "row at line " + std::to_string(line) + " has an empty value");
      }
      z[k] = parse_double(row[k + 1], "latent value");
    }
    std::string key = canonical_or_throw(row[0], line);
    if (!table.vectors.emplace(key, std::move(z)).second) {
      throw Error(ErrorCode::kDuplicateKey,
                  "row at line " + std::to_string(line) + " repeats molecule " + key);
    }
  }
  return table;
}

LatentTable load_latents(const std::filesystem::path &path) {
  return parse_latents(read_text_file(path));
}

ExternalFingerprints parse_external_fingerprints(std::string_view csv_text) {
  const RawCsv raw = read_raw(csv_text);
  ExternalFingerprints fps;
  if (raw.header.empty()) return fps;
  if (raw.header.front() != "smiles") {
    throw Error(ErrorCode::kFormatError, "fingerprint file must start with a 'smiles' column");
  }
  fps.bit_names.assign(raw.header.begin() + 1, raw.header.end());
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    const auto &row = raw.rows[r];
    if (row.size() != raw.header.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "fingerprint row at line " + std::to_string(raw.lines[r]) + " has wrong width");
    }
    std::vector<double> bits(fps.bit_names.size());
    for (std::size_t k = 0; k < bits.size(); ++k) bits[k] = parse_double(row[k + 1], "bit");
    std::string key = canonical_or_throw(row[0], raw.lines[r]);
    if (!fps.rows.emplace(key, std::move(bits)).second) {
      throw Error(ErrorCode::kDuplicateKey, "fingerprint row repeats molecule " + key);
    }
  }
  return fps;
}

ExternalFingerprints load_external_fingerprints(const std::filesystem::path &path) {
  return parse_external_fingerprints(read_text_file(path));
}

char block_tag(Block b) {
  switch (b) {
  case Block::kKeys: return 'K';
  case Block::kDescriptors: return 'D';
  case Block::kLatent: return 'Z';
  }
  return '?';
}

std::optional<Block> block_from_tag(char c) {
  switch (c) {
  case 'K': case 'k': case 'M': case 'm': return Block::kKeys;
  case 'D': case 'd': return Block::kDescriptors;
  case 'Z': case 'z': return Block::kLatent;
  default: return std::nullopt;
  }
}

std::set<Block> parse_blocks(std::string_view tags) {
  std::set<Block> blocks;
  for (char c : tags) {
    if (c == '+' || c == ',' || c == ' ') continue;
    auto b = block_from_tag(c);
    if (!b) throw Error(ErrorCode::kUsage, "unknown feature block '" + std::string(1, c) + "'");
    blocks.insert(*b);
  }
  if (blocks.empty()) throw Error(ErrorCode::kUsage, "no feature blocks given");
  return blocks;
}

std::string blocks_to_string(const std::set<Block> &blocks) {
  std::string s;
  for (Block b : blocks) {
    if (!s.empty()) s += '+';
    s += block_tag(b);
  }
  return s;
}

std::optional<std::size_t> FeatureMatrix::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<FeatureColumn> feature_columns(const std::set<Block> &blocks,
                                           const FeatureSources &sources) {
  std::vector<FeatureColumn> cols;
  if (blocks.count(Block::kKeys)) {
    if (sources.external_keys != nullptr) {
      for (const auto &name : sources.external_keys->bit_names) {
        cols.push_back({"K:" + name, Block::kKeys});
      }
    } else {
      const KeySet &ks = sources.keyset != nullptr ? *sources.keyset : default_keyset();
      for (const PatternKey &k : ks.keys) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "K:key_%02d", k.id);
        cols.push_back({buf, Block::kKeys});
      }
    }
  }
  if (blocks.count(Block::kDescriptors)) {
    for (std::string_view name : descriptor_names()) {
      cols.push_back({"D:" + std::string(name), Block::kDescriptors});
    }
  }
  if (blocks.count(Block::kLatent)) {
    const std::size_t d = sources.latents != nullptr ? sources.latents->dimension : 0;
    for (std::size_t k = 1; k <= d; ++k) {
      cols.push_back({"Z:z" + std::to_string(k), Block::kLatent});
    }
  }
  return cols;
}

FeatureMatrix assemble(const std::vector<MolecularGraph> &molecules,
                       const std::set<Block> &blocks, const FeatureSources &sources) {
  if (blocks.empty()) throw Error(ErrorCode::kUsage, "no feature blocks requested");
  if (blocks.count(Block::kLatent) && sources.latents == nullptr) {
    throw Error(ErrorCode::kUsage, "Z block requested without a latent table");
  }
  const KeySet &keyset = sources.keyset != nullptr ? *sources.keyset : default_keyset();
  FeatureMatrix m;
  m.columns = feature_columns(blocks, sources);
  std::set<std::string> names;
  for (const auto &c : m.columns) {
    if (!names.insert(c.name).second) {
      throw Error(ErrorCode::kFormatError, "duplicate feature column '" + c.name + "'");
    }
  }
  m.row_ids.reserve(molecules.size());
  m.values.reserve(molecules.size());
  for (const MolecularGraph &g : molecules) {
    const std::string canonical = canonical_smiles(g);
    std::vector<double> row;
    row.reserve(m.columns.size());
    if (blocks.count(Block::kKeys)) {
      if (sources.external_keys != nullptr) {
        auto it = sources.external_keys->rows.find(canonical);
        if (it == sources.external_keys->rows.end()) {
          throw Error(ErrorCode::kMissingLatent, "no external fingerprint for " + canonical);
        }
        row.insert(row.end(), it->second.begin(), it->second.end());
      } else {
        for (std::uint8_t bit : fingerprint(g, keyset)) row.push_back(bit);
      }
    }
    if (blocks.count(Block::kDescriptors)) {
      const DescriptorVector d = descriptors(g);
      row.insert(row.end(), d.values.begin(), d.values.end());
    }
    if (blocks.count(Block::kLatent)) {
      const std::vector<double> *z = sources.latents->find(canonical);
      if (z == nullptr) throw Error(ErrorCode::kMissingLatent, "no latent vector for " + canonical);
      row.insert(row.end(), z->begin(), z->end());
    }
    m.row_ids.push_back(canonical);
    m.values.push_back(std::move(row));
  }
  return m;
}

std::string feature_matrix_to_csv(const FeatureMatrix &matrix) {
  std::string out = "id";
  for (const auto &c : matrix.columns) out += "," + csv_escape(c.name);
  out += '\n';
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    out += csv_escape(matrix.row_ids[r]);
    for (double v : matrix.values[r]) out += "," + format_double(v);
    out += '\n';
  }
  return out;
}

} // namespace copas
