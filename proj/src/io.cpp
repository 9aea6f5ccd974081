#include "fdrcurve/io.hpp"

#include <cstdio>
#include <fstream>

#include "fdrcurve/errors.hpp"

namespace fdrcurve {

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

nlohmann::json curve_to_json(const TargetCurve& curve) {
  nlohmann::json constraints = nlohmann::json::array();
  for (const auto& jump : curve.jumps())
    constraints.push_back({{"theta", jump.theta}, {"q", jump.level}});
  return {{"constraints", constraints}};
}

TargetCurve curve_from_json(const nlohmann::json& json) {
  if (!json.contains("constraints") || !json["constraints"].is_array())
    throw DataError("curve JSON needs a `constraints` array");
  std::vector<Constraint> constraints;
  for (const auto& entry : json["constraints"]) {
    if (!entry.contains("theta") || !entry.contains("q"))
      throw DataError("curve JSON constraint needs `theta` and `q`");
    constraints.push_back(
        {entry["theta"].get<double>(), entry["q"].get<double>()});
  }
  return TargetCurve::from_constraints(std::move(constraints));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
  if (!out) throw DataError("failed writing file: " + path);
}

void write_curve_samples_csv(const std::string& path,
                             const CurveSamples& samples) {
  std::string text = "theta,q,q_star\n";
  for (std::size_t i = 0; i < samples.grid.size(); ++i) {
    text += format_number(samples.grid[i]);
    text += ',';
    text += format_number(samples.q[i]);
    text += ',';
    text += format_number(samples.q_star[i]);
    text += '\n';
  }
  write_text_file(path, text);
}

void write_rejection_report_csv(const std::string& path,
                                const std::vector<double>& statistics,
                                const RejectionResult& result) {
  std::vector<bool> selected(statistics.size(), false);
  for (std::size_t i : result.selected) selected[i] = true;
  std::string text = "index,x,normalized_pvalue,selected\n";
  for (std::size_t i = 0; i < statistics.size(); ++i) {
    text += std::to_string(i + 1);
    text += ',';
    text += format_number(statistics[i]);
    text += ',';
    text += format_number(result.normalized_pvalues[i]);
    text += ',';
    text += selected[i] ? '1' : '0';
    text += '\n';
  }
  write_text_file(path, text);
}

nlohmann::json rejection_summary_json(std::size_t m,
                                      const RejectionResult& result) {
  return {{"m", m},
          {"rejections", result.selected.size()},
          {"cutoff_rank", result.cutoff_rank}};
}

void write_estimate_csv(const std::string& path, const CurveSamples& samples,
                        const CurveEstimate& estimate,
                        const std::vector<double>& lower_exact,
                        const std::vector<double>& lower_exp) {
  std::string text = "theta,q,q_star,fdr_hat,std_err,lower_exact,lower_exp\n";
  for (std::size_t i = 0; i < samples.grid.size(); ++i) {
    text += format_number(samples.grid[i]);
    text += ',';
    text += format_number(samples.q[i]);
    text += ',';
    text += format_number(samples.q_star[i]);
    text += ',';
    text += format_number(estimate.fdr_hat[i]);
    text += ',';
    text += format_number(estimate.std_err[i]);
    text += ',';
    text += format_number(lower_exact[i]);
    text += ',';
    text += format_number(lower_exp[i]);
    text += '\n';
  }
  write_text_file(path, text);
}

void write_gene_summary_csv(const std::string& path,
                            const GeneSummary& summary) {
  std::string text = "gene_id,x,sigma_hat\n";
  for (std::size_t i = 0; i < summary.gene_ids.size(); ++i) {
    text += summary.gene_ids[i];
    text += ',';
    text += format_number(summary.x[i]);
    text += ',';
    text += format_number(summary.sigma_hat[i]);
    text += '\n';
  }
  write_text_file(path, text);
}

}  // namespace fdrcurve
