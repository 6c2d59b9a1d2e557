#pragma once

#include "maninforge/invariants.hpp"

#include <json.hpp>

namespace maninforge {

// Arbitrary-precision integers are written as decimal strings.
nlohmann::ordered_json space_json(const ModSymSpace& space);
nlohmann::ordered_json class_json(const NewformClass& cls);
nlohmann::ordered_json decomposition_json(long level, const std::vector<NewformClass>& classes);
nlohmann::ordered_json report_json(long level, const std::vector<DegCongReport>& reports);
nlohmann::ordered_json certificate_json(long level, const std::vector<ManinCertificate>& certs);
nlohmann::ordered_json anomaly_json(long level, const std::vector<Anomaly>& anomalies);

std::string rational_string(const Rational& q);

}  // namespace maninforge
