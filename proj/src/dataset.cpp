#include "uncle/dataset.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace uncle {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    fields.push_back(field);
  }
  return fields;
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out.precision(17);
  return out;
}

std::ifstream open_in(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  return in;
}

}  // namespace

void write_dataset_csv(const TimeSeriesDataset& d, const std::filesystem::path& file) {
  auto out = open_out(file);
  for (int i = 0; i < d.num_vars; ++i) out << (i ? "," : "") << d.var_names[i];
  out << "\n";
  for (int t = 0; t < d.num_steps; ++t) {
    for (int i = 0; i < d.num_vars; ++i) out << (i ? "," : "") << d.at(i, t);
    out << "\n";
  }
}

TimeSeriesDataset read_dataset_csv(const std::filesystem::path& file) {
  auto in = open_in(file);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset file " + file.string());
  TimeSeriesDataset d;
  d.var_names = split_csv_line(line);
  d.num_vars = static_cast<int>(d.var_names.size());
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != d.num_vars)
      throw std::runtime_error("ragged dataset row in " + file.string());
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) row[i] = std::stod(fields[i]);
    rows.push_back(std::move(row));
  }
  d.num_steps = static_cast<int>(rows.size());
  d.values.resize(static_cast<std::size_t>(d.num_vars) * d.num_steps);
  for (int t = 0; t < d.num_steps; ++t)
    for (int i = 0; i < d.num_vars; ++i) d.at(i, t) = rows[t][i];
  return d;
}

void write_matrix_csv(const Adjacency& m, const std::filesystem::path& file) {
  auto out = open_out(file);
  for (int j = 0; j < m.num_vars; ++j) {
    for (int i = 0; i < m.num_vars; ++i) out << (i ? "," : "") << m.at(j, i);
    out << "\n";
  }
}

Adjacency read_matrix_csv(const std::filesystem::path& file) {
  auto in = open_in(file);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) row[i] = std::stod(fields[i]);
    rows.push_back(std::move(row));
  }
  Adjacency m;
  m.num_vars = static_cast<int>(rows.size());
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != m.num_vars)
      throw std::runtime_error("adjacency matrix not square in " + file.string());
    m.entries.insert(m.entries.end(), row.begin(), row.end());
  }
  return m;
}

void write_truth(const GroundTruth& g, const std::filesystem::path& dir, const std::string& stem) {
  const std::string prefix = stem.empty() ? "" : stem + "_";
  if (g.kind == GroundTruth::Kind::kStatic) {
    write_matrix_csv(g.static_adj, dir / (prefix + "truth.csv"));
    return;
  }
  auto out = open_out(dir / (prefix + "truth_manifest.csv"));
  out << "t_start,t_end,adjacency_file\n";
  for (std::size_t s = 0; s < g.segments.size(); ++s) {
    const std::string seg_name = prefix + "truth_seg" + std::to_string(s) + ".csv";
    write_matrix_csv(g.segments[s].adj, dir / seg_name);
    out << g.segments[s].t_start << "," << g.segments[s].t_end << "," << seg_name << "\n";
  }
}

GroundTruth read_static_truth(const std::filesystem::path& adj_file) {
  GroundTruth g;
  g.kind = GroundTruth::Kind::kStatic;
  g.static_adj = read_matrix_csv(adj_file);
  return g;
}

GroundTruth read_dynamic_truth(const std::filesystem::path& manifest_file) {
  auto in = open_in(manifest_file);
  GroundTruth g;
  g.kind = GroundTruth::Kind::kDynamic;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 3) throw std::runtime_error("bad manifest row in " + manifest_file.string());
    TruthSegment seg;
    seg.t_start = std::stoi(fields[0]);
    seg.t_end = std::stoi(fields[1]);
    seg.adj = read_matrix_csv(manifest_file.parent_path() / fields[2]);
    g.segments.push_back(std::move(seg));
  }
  if (g.segments.empty()) throw std::runtime_error("manifest has no segments: " + manifest_file.string());
  return g;
}

}  // namespace uncle
