#include "fdrcurve/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fdrcurve {

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, delim)) fields.push_back(field);
  if (!line.empty() && line.back() == delim) fields.push_back("");
  return fields;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end != text.c_str() && *end == '\0' && !std::isnan(out);
}

char detect_delimiter(const std::string& header) {
  const std::size_t tabs =
      static_cast<std::size_t>(std::count(header.begin(), header.end(), '\t'));
  const std::size_t commas =
      static_cast<std::size_t>(std::count(header.begin(), header.end(), ','));
  return tabs > commas ? '\t' : ',';
}

std::vector<std::string> labels_from_file(
    const std::string& path, const std::vector<std::string>& sample_ids) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open group labels file: " + path);
  std::vector<std::string> labels(sample_ids.size());
  std::vector<bool> seen(sample_ids.size(), false);
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
    const auto fields = split(line, delim);
    if (fields.size() != 2)
      throw DataError(path + ": line " + std::to_string(lineno) +
                      ": expected `sample,label`");
    const auto it =
        std::find(sample_ids.begin(), sample_ids.end(), fields[0]);
    if (it == sample_ids.end()) {
      if (first) {
        first = false;
        continue;  // tolerate a header row
      }
      throw DataError(path + ": unknown sample id `" + fields[0] + "`");
    }
    first = false;
    const std::size_t idx =
        static_cast<std::size_t>(it - sample_ids.begin());
    if (seen[idx])
      throw DataError(path + ": duplicate label for sample `" + fields[0] +
                      "`");
    seen[idx] = true;
    labels[idx] = fields[1];
  }
  for (std::size_t i = 0; i < sample_ids.size(); ++i) {
    if (!seen[i])
      throw DataError(path + ": no label for sample `" + sample_ids[i] + "`");
  }
  return labels;
}

}  // namespace

GroupSpec GroupSpec::inline_list(std::vector<std::string> labels) {
  GroupSpec spec;
  spec.labels = std::move(labels);
  return spec;
}

GroupSpec GroupSpec::from_file(std::string path) {
  GroupSpec spec;
  spec.path = std::move(path);
  return spec;
}

std::vector<std::string> parse_group_list(const std::string& csv) {
  auto labels = split(csv, ',');
  for (auto& label : labels) {
    label.erase(std::remove(label.begin(), label.end(), ' '), label.end());
  }
  return labels;
}

ExpressionMatrix load_matrix(const std::string& path,
                             const GroupSpec& groups) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open matrix file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw DataError(path + ": empty file");
  strip_cr(header);
  const char delim = detect_delimiter(header);
  const auto header_fields = split(header, delim);
  if (header_fields.size() < 2)
    throw DataError(path + ": malformed header (need gene column + samples)");

  ExpressionMatrix matrix;
  matrix.sample_ids.assign(header_fields.begin() + 1, header_fields.end());
  const std::size_t samples = matrix.sample_ids.size();

  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split(line, delim);
    if (fields.size() != samples + 1)
      throw DataError(path + ": line " + std::to_string(lineno) + ": has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(samples + 1));
    std::vector<double> row(samples);
    bool numeric = true;
    for (std::size_t s = 0; s < samples; ++s) {
      if (!parse_double(fields[s + 1], row[s])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      ++matrix.dropped_non_numeric;
      continue;
    }
    matrix.gene_ids.push_back(fields[0]);
    matrix.values.push_back(std::move(row));
  }

  const std::vector<std::string> labels =
      groups.path.empty() ? groups.labels
                          : labels_from_file(groups.path, matrix.sample_ids);
  if (labels.size() != samples)
    throw DataError(path + ": " + std::to_string(labels.size()) +
                    " group labels for " + std::to_string(samples) +
                    " samples");
  matrix.group.resize(samples);
  std::size_t count_a = 0, count_b = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    if (labels[s] == "A") {
      matrix.group[s] = 0;
      ++count_a;
    } else if (labels[s] == "B") {
      matrix.group[s] = 1;
      ++count_b;
    } else {
      throw DataError("group labels must be `A` or `B`, got `" + labels[s] +
                      "`");
    }
  }
  if (count_a < 2 || count_b < 2)
    throw DataError("each group needs >= 2 samples (A: " +
                    std::to_string(count_a) + ", B: " +
                    std::to_string(count_b) + ")");
  return matrix;
}

GeneSummary group_summary(const ExpressionMatrix& matrix) {
  GeneSummary summary;
  for (std::size_t g = 0; g < matrix.values.size(); ++g) {
    double sum[2] = {0.0, 0.0};
    std::size_t n[2] = {0, 0};
    for (std::size_t s = 0; s < matrix.group.size(); ++s) {
      sum[matrix.group[s]] += matrix.values[g][s];
      ++n[matrix.group[s]];
    }
    const double mean_a = sum[0] / static_cast<double>(n[0]);
    const double mean_b = sum[1] / static_cast<double>(n[1]);
    double ss[2] = {0.0, 0.0};
    for (std::size_t s = 0; s < matrix.group.size(); ++s) {
      const double mean = matrix.group[s] == 0 ? mean_a : mean_b;
      const double d = matrix.values[g][s] - mean;
      ss[matrix.group[s]] += d * d;
    }
    const double var_a = ss[0] / static_cast<double>(n[0] - 1);
    const double var_b = ss[1] / static_cast<double>(n[1] - 1);
    const double se2 = var_a / static_cast<double>(n[0]) +
                       var_b / static_cast<double>(n[1]);
    if (se2 <= 0.0) {
      ++summary.dropped_zero_variance;
      continue;
    }
    summary.gene_ids.push_back(matrix.gene_ids[g]);
    summary.x.push_back(mean_b - mean_a);
    summary.sigma_hat.push_back(std::sqrt(se2));
  }
  return summary;
}

HypothesisSet build_hypotheses(const GeneSummary& summary, TestMode mode) {
  if (summary.x.empty())
    throw std::domain_error("build_hypotheses: no genes in summary");
  if (mode == TestMode::Snr) {
    std::vector<double> stats(summary.x.size());
    for (std::size_t i = 0; i < stats.size(); ++i)
      stats[i] = summary.x[i] / summary.sigma_hat[i];
    return HypothesisSet(std::move(stats),
                         FamilySet::shared(LocationFamily::standard_gaussian()));
  }
  std::vector<LocationFamily> families;
  families.reserve(summary.sigma_hat.size());
  for (double sigma : summary.sigma_hat)
    families.push_back(LocationFamily::scaled_gaussian(sigma));
  return HypothesisSet(summary.x,
                       FamilySet::per_hypothesis(std::move(families)));
}

}  // namespace fdrcurve
