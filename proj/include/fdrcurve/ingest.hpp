#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fdrcurve/errors.hpp"
#include "fdrcurve/testing.hpp"

namespace fdrcurve {

/// Two-group log2 expression matrix: genes in rows, samples in columns.
struct ExpressionMatrix {
  std::vector<std::string> gene_ids;
  std::vector<std::vector<double>> values;  // per gene, one value per sample
  std::vector<std::string> sample_ids;
  std::vector<int> group;  // 0 = A, 1 = B, aligned with sample_ids
  std::size_t dropped_non_numeric = 0;
};

/// Per-gene two-sample summary: x = mean(B) - mean(A) and its plug-in
/// standard deviation sqrt(s2_A/n_A + s2_B/n_B) (unbiased variances).
struct GeneSummary {
  std::vector<std::string> gene_ids;
  std::vector<double> x;
  std::vector<double> sigma_hat;
  std::size_t dropped_zero_variance = 0;
};

/// Per-sample group labels: either an inline list aligned with the header
/// columns, or a two-column `sample,label` file matched by sample id.
struct GroupSpec {
  static GroupSpec inline_list(std::vector<std::string> labels);
  static GroupSpec from_file(std::string path);

  std::vector<std::string> labels;  // used when path is empty
  std::string path;
};

/// Parses "A,A,B,B" style inline label lists.
std::vector<std::string> parse_group_list(const std::string& csv);

/// Loads a delimited matrix (comma or tab, auto-detected): header row of
/// sample ids, first column gene ids. Rows containing a non-numeric entry
/// are dropped and counted. Labels must be exactly the strings "A" and "B"
/// and each group needs >= 2 samples. Throws DataError on any violation.
ExpressionMatrix load_matrix(const std::string& path, const GroupSpec& groups);

/// Summarizes each gene; genes whose variance is zero in both groups are
/// dropped and counted.
GeneSummary group_summary(const ExpressionMatrix& matrix);

enum class TestMode { EffectSize, Snr };

/// EffectSize: statistics X_i with per-gene scaled-Gaussian families of
/// scale sigma_hat_i. Snr: statistics X_i / sigma_hat_i with the shared
/// standard Gaussian.
HypothesisSet build_hypotheses(const GeneSummary& summary, TestMode mode);

}  // namespace fdrcurve
