#pragma once

#include <string>
#include <vector>

#include "bridgebound/bounds.hpp"
#include "bridgebound/moments.hpp"

namespace bridgebound {

/// Deterministic float rendering: 17 significant digits (round-trip exact for
/// doubles), C locale, infinities spelled out.  Every serializer below goes
/// through this so identical runs produce byte-identical files.
std::string format_float(double x);

/// One report per line inside a JSON array; object keys are emitted in fixed
/// alphabetical order.  Non-finite numbers are serialized as JSON strings
/// ("inf", "-inf", "nan") since JSON has no literal for them.
std::string report_to_json(const BoundReport& r);
std::string reports_to_json(const std::vector<BoundReport>& reports);

/// name,lhs,rhs,slack,pass — one row per report, pass as 0/1.
std::string summary_csv(const std::vector<BoundReport>& reports);

/// n,H_n,bound_n
std::string decay_csv(const DecayCurve& curve);

struct TrajectoryRow {
  int n = 0;
  double residual_mu = 0.0;
  double residual_eta = 0.0;
  double kl = 0.0;    // H(P* | P_n); NaN when no reference bridge is available
  double gauge = 0.0; // mu-average of the even potential, 0 once centered
};

/// n,residual_mu,residual_eta,kl,gauge
std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);

/// Plot-ready dump of a matrix field: point coordinates followed by the
/// row-major entries of the value at that point.
std::string field_csv(const MatrixField& f);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace bridgebound
