#pragma once

#include <sivo/certificates.hpp>
#include <sivo/conic.hpp>
#include <sivo/oracle.hpp>
#include <sivo/problem.hpp>
#include <sivo/tolerances.hpp>

#include <json.hpp>

#include <string>
#include <vector>

namespace sivo::cli {

using Json = nlohmann::ordered_json;

Json to_json(const Vector& v);
Json to_json(const std::vector<Vector>& vs);
Json to_json(const Matrix& M);  // list of rows
Json to_json(const Tolerances& tol);

Vector vector_from_json(const Json& j);
Matrix matrix_from_json(const Json& j);

Json index_json(const Problem& P, const IndexRef& r);

// Objects carrying "kind": "kkt-certificate" or "convexity-certificate" are
// re-checked by verify_report wherever they appear in a report.
Json certificate_json(const Problem& P, const Certificate& c);
Json fuzzy_json(const Problem& P, const FuzzyCertificate& fc);
Json cq_json(const CqResult& r, const std::string& condition);
Json classification_json(const Problem& P, const ClassificationReport& r);
Json section_json(const SectionResult& s);
Json convexity_json(const Problem& P, const GenConvexityResult& r);
Json sufficiency_json(const Problem& P, const SufficiencyResult& r);
Json sdp_json(const Problem& P, const SdpCertificate& s);
Json grid_point_json(const GridPoint& g);
Json ekeland_json(const EkelandResult& e);

/// One line per failed check; empty when every emitted witness reproduces its claims.
struct VerifyOutcome {
  std::size_t checked = 0;
  std::vector<std::string> failures;
};
VerifyOutcome verify_report(const Json& report, double tol = 1e-10);

}  // namespace sivo::cli
