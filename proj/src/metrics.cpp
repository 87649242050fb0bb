#include "remp/metrics.hpp"

#include "remp/error.hpp"

#include <fstream>

namespace remp {

NamedPairSet load_pair_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  NamedPairSet pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto t1 = line.find('\t');
    if (t1 == std::string::npos)
      throw IoError(file.string() + ":" + std::to_string(lineno) + ": expected two columns");
    const auto t2 = line.find('\t', t1 + 1);
    pairs.emplace(unescape_field(std::string_view(line).substr(0, t1)),
                  unescape_field(std::string_view(line).substr(
                      t1 + 1, t2 == std::string::npos ? std::string::npos : t2 - t1 - 1)));
  }
  return pairs;
}

Metrics evaluate(const NamedPairSet& predicted, const NamedPairSet& gold) {
  Metrics m;
  m.predicted = predicted.size();
  m.gold = gold.size();
  for (const auto& p : predicted) m.true_positives += gold.count(p);
  const auto tp = static_cast<double>(m.true_positives);
  m.precision = m.predicted ? tp / static_cast<double>(m.predicted) : 0.0;
  m.recall = m.gold ? tp / static_cast<double>(m.gold) : 0.0;
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

double reduction_ratio(std::size_t retained, std::size_t candidates) {
  if (candidates == 0) return 0.0;
  return 1.0 - static_cast<double>(retained) / static_cast<double>(candidates);
}

double pair_completeness(std::span<const EntityPair> pairs, const KnowledgeBase& kb1,
                         const KnowledgeBase& kb2, const NamedPairSet& gold) {
  if (gold.empty()) return 0.0;
  std::size_t found = 0;
  for (const auto& p : pairs)
    found += gold.count({kb1.entities().name(p.u1), kb2.entities().name(p.u2)});
  return static_cast<double>(found) / static_cast<double>(gold.size());
}

} // namespace remp
