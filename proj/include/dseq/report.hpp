#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dseq/analysis.hpp"
#include "dseq/funcprobe.hpp"
#include "dseq/metricspace.hpp"
#include "dseq/subseq.hpp"
#include "dseq/witness.hpp"

namespace dseq::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "dseq/1";

/// Pretty JSON with 2-space indentation, keys in insertion order and every
/// floating value printed with 17 significant digits. Non-finite values
/// become null. Output is byte-stable for equal input.
std::string dump(const Json& j);

/// "%.17g".
std::string format_double(double v);

Json to_json(IndexPair p);
Json to_json(const Witness& w);
Json to_json(const WindowSample& s);
Json to_json(const DefectReport& r);
Json to_json(const ConvergenceVerdict& v);
Json to_json(const LimitEstimate& e);
Json to_json(const Point2& p);
Json to_json(const ProbeReport& r);
Json to_json(const Point& p);
Json to_json(const AxiomReport& r);
Json to_json(const NonIncrementalReport& r);
Json to_json(const EmbeddingCheck& c);

/// window_lo,window_hi,defect rows.
std::string defect_csv(const std::vector<WindowSample>& samples);

} // namespace dseq::report
