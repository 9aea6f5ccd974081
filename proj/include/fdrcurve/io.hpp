#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fdrcurve/fdr_curve.hpp"
#include "fdrcurve/ingest.hpp"
#include "fdrcurve/simulation.hpp"
#include "fdrcurve/testing.hpp"

namespace fdrcurve {

/// Fixed 12-significant-digit rendering used by every numeric export, so
/// identical runs produce byte-identical files.
std::string format_number(double value);

std::uint64_t fnv1a64(std::string_view text);

nlohmann::json curve_to_json(const TargetCurve& curve);
TargetCurve curve_from_json(const nlohmann::json& json);

void write_text_file(const std::string& path, const std::string& content);

/// CSV `theta,q,q_star`.
void write_curve_samples_csv(const std::string& path,
                             const CurveSamples& samples);

/// CSV `index,x,normalized_pvalue,selected` (1-based index).
void write_rejection_report_csv(const std::string& path,
                                const std::vector<double>& statistics,
                                const RejectionResult& result);

nlohmann::json rejection_summary_json(std::size_t m,
                                      const RejectionResult& result);

/// CSV `theta,q,q_star,fdr_hat,std_err,lower_exact,lower_exp`. The lower
/// bound columns carry the closed-form expressions at every grid point; they
/// bound the worst-case FDR only below the first jump.
void write_estimate_csv(const std::string& path, const CurveSamples& samples,
                        const CurveEstimate& estimate,
                        const std::vector<double>& lower_exact,
                        const std::vector<double>& lower_exp);

/// CSV `gene_id,x,sigma_hat`.
void write_gene_summary_csv(const std::string& path,
                            const GeneSummary& summary);

}  // namespace fdrcurve
